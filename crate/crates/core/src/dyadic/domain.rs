use std::fmt::Write as _;
use std::sync::OnceLock;

use super::complex::DyadicComplex;
use super::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::geom::{Aabb, Point, MAX_DIM};
use crate::scalar::{lit, to_f64, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    /// Cells whose farthest corner lies in the open ball of this radius
    /// (measured in units of `2^-m0`).
    Ball(f64),
    Boxes,
}

/// Star-shaped dyadic domain: a union of closed cells of side `2^-m0`,
/// symmetric under every coordinate reflection.
///
/// The domain is stored as the list of its maximal symmetric boxes
/// `[-b_1, b_1] x ... x [-b_n, b_n]` with `b_i` in units of `2^-m0`.
#[derive(Debug)]
pub struct Domain {
    pub n: usize,
    pub m0: i32,
    pub r1: f64,
    pub r2: f64,
    kind: Kind,
    boxes: Vec<[i64; MAX_DIM]>,
    boundary: OnceLock<DyadicComplex>,
}

impl Clone for Domain {
    fn clone(&self) -> Self {
        Domain {
            n: self.n,
            m0: self.m0,
            r1: self.r1,
            r2: self.r2,
            kind: self.kind.clone(),
            boxes: self.boxes.clone(),
            boundary: OnceLock::new(),
        }
    }
}

impl PartialEq for Domain {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.m0 == o.m0 && self.boxes == o.boxes
    }
}

fn unit_of(l: i64) -> i64 {
    l.abs().max((l + 1).abs())
}

/// Keeps the coordinatewise-maximal vectors.
fn pareto(mut v: Vec<[i64; MAX_DIM]>, n: usize) -> Vec<[i64; MAX_DIM]> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v.dedup();
    let mut out: Vec<[i64; MAX_DIM]> = Vec::new();
    if n == 2 {
        // sorted by first coordinate descending: keep strictly rising second
        let mut best = i64::MIN;
        for b in v {
            if b[1] > best {
                best = b[1];
                out.push(b);
            }
        }
    } else {
        for b in v {
            if !out.iter().any(|o| (0..n).all(|i| o[i] >= b[i])) {
                out.push(b);
            }
        }
    }
    out.sort_unstable();
    out
}

impl Domain {
    /// Union of all closed cells of side `2^-m0` contained in the open ball of
    /// radius `r1 + (r2 - r1) / 2`. Fails unless
    /// `2^-m0 < (r2 - r1) / 100` and `B(0, r1)` (closed) lies in the interior.
    pub fn build(n: usize, r1: f64, r2: f64, m0: i32) -> Result<Domain> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Invalid(format!("ambient dimension {n} not in 1..={MAX_DIM}")));
        }
        if !(r1 > 0.0 && r2 > r1) {
            return Err(Error::Precondition(format!("need 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
        }
        let h = 2f64.powi(-m0);
        if h >= (r2 - r1) / 100.0 {
            return Err(Error::Precondition(format!(
                "grid too coarse: 2^-{m0} = {h} must be below (r2 - r1)/100 = {}",
                (r2 - r1) / 100.0
            )));
        }
        let rad = (r1 + (r2 - r1) / 2.0) / h;
        let umax = rad.ceil() as i64;
        let mut boxes = Vec::new();
        let mut idx = vec![1i64; n - 1];
        loop {
            let s: i64 = idx.iter().map(|u| u * u).sum();
            if let Some(top) = ball_top(rad, s) {
                let mut b = [0i64; MAX_DIM];
                b[..n - 1].copy_from_slice(&idx);
                b[n - 1] = top;
                boxes.push(b);
            }
            if !advance(&mut idx, 1, umax) {
                break;
            }
        }
        if boxes.is_empty() {
            return Err(Error::Precondition("domain has no cells".into()));
        }
        let boxes = if n <= 2 { pareto(boxes, n) } else { boxes };
        let d = Domain {
            n,
            m0,
            r1,
            r2,
            kind: Kind::Ball(rad),
            boxes,
            boundary: OnceLock::new(),
        };
        let inner = d.inner_radius();
        if inner <= r1 {
            return Err(Error::Precondition(format!(
                "closed ball of radius r1 = {r1} not inside the domain interior (inner radius {inner})"
            )));
        }
        if d.outer_radius() >= r2 {
            return Err(Error::Precondition("domain not inside B(0, r2)".into()));
        }
        Ok(d)
    }

    /// Domain given directly by symmetric box half-widths (units of `2^-m0`).
    pub fn from_boxes(n: usize, m0: i32, boxes: &[Vec<i64>]) -> Result<Domain> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Invalid(format!("ambient dimension {n} not in 1..={MAX_DIM}")));
        }
        let mut v = Vec::new();
        for b in boxes {
            if b.len() != n || b.iter().any(|u| *u < 1) {
                return Err(Error::Invalid("box half-widths must be n positive integers".into()));
            }
            let mut a = [0i64; MAX_DIM];
            a[..n].copy_from_slice(b);
            v.push(a);
        }
        if v.is_empty() {
            return Err(Error::Invalid("domain needs at least one box".into()));
        }
        let mut d = Domain {
            n,
            m0,
            r1: 0.0,
            r2: 0.0,
            kind: Kind::Boxes,
            boxes: pareto(v, n),
            boundary: OnceLock::new(),
        };
        d.r1 = d.inner_radius();
        d.r2 = d.outer_radius();
        Ok(d)
    }

    /// Domain spanned by a list of top cells; the cells must be exactly the
    /// cells of the symmetric star-shaped set they generate.
    pub fn from_cells(n: usize, m0: i32, cells: &[DyadicCube]) -> Result<Domain> {
        let mut units = Vec::with_capacity(cells.len());
        for c in cells {
            if c.scale != m0 || c.ambient() != n || c.dim() != n {
                return Err(Error::Invalid(format!("cell {} is not a top cell at scale {m0}", c.id())));
            }
            units.push((0..n).map(|i| unit_of(c.corner[i])).collect::<Vec<_>>());
        }
        let mut d = Domain::from_boxes(n, m0, &units)?;
        let mut uniq: Vec<DyadicCube> = cells.to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        if d.num_cells() != uniq.len() {
            return Err(Error::Invalid("cells do not form a symmetric star-shaped domain".into()));
        }
        d.r1 = d.inner_radius();
        d.r2 = d.outer_radius();
        Ok(d)
    }

    pub fn side(&self) -> f64 {
        2f64.powi(-self.m0)
    }

    /// Maximal symmetric boxes as real boxes.
    pub fn boxes<T: Scalar>(&self) -> Vec<Aabb<T>> {
        let h: T = lit(self.side());
        self.boxes
            .iter()
            .map(|b| {
                let mut hi = Point::zero();
                for i in 0..self.n {
                    hi[i] = lit::<T>(b[i] as f64) * h;
                }
                let lo = Point::zero() - hi;
                Aabb::new(self.n, lo, hi)
            })
            .collect()
    }

    pub fn box_units(&self) -> &[[i64; MAX_DIM]] {
        &self.boxes
    }

    fn dominated(&self, u: &[i64; MAX_DIM]) -> bool {
        match self.kind {
            Kind::Ball(rad) => {
                let s: i64 = u[..self.n].iter().map(|v| v * v).sum();
                (s as f64) < rad * rad
            }
            Kind::Boxes => self.boxes.iter().any(|b| (0..self.n).all(|i| u[i] <= b[i])),
        }
    }

    /// Closed membership `x in r D`.
    pub fn contains_scaled<T: Scalar>(&self, x: &Point<T>, r: T) -> bool {
        if r <= T::zero() {
            return (0..self.n).all(|i| x[i] == T::zero()) && r == T::zero();
        }
        let h = self.side();
        let mut u = [0i64; MAX_DIM];
        for i in 0..self.n {
            let v = to_f64(x[i].abs() / r) / h;
            if !v.is_finite() {
                return false;
            }
            u[i] = (v.ceil() as i64).max(1);
        }
        self.dominated(&u)
    }

    /// Open membership `x in r D°`, equivalently `f(x) < r`.
    pub fn contains_open_scaled<T: Scalar>(&self, x: &Point<T>, r: T) -> bool {
        if r <= T::zero() {
            return false;
        }
        let h = self.side();
        let mut u = [0i64; MAX_DIM];
        for i in 0..self.n {
            let v = to_f64(x[i].abs() / r) / h;
            if !v.is_finite() {
                return false;
            }
            u[i] = v.floor() as i64 + 1;
        }
        self.dominated(&u)
    }

    pub fn contains<T: Scalar>(&self, x: &Point<T>) -> bool {
        self.contains_scaled(x, T::one())
    }

    pub fn contains_open<T: Scalar>(&self, x: &Point<T>) -> bool {
        self.contains_open_scaled(x, T::one())
    }

    /// Shape function `f(x) = inf { r : x in r D }`, closed form over the
    /// maximal boxes.
    pub fn shape<T: Scalar>(&self, x: &Point<T>) -> T {
        let h: T = lit(self.side());
        let mut best = T::infinity();
        for b in &self.boxes {
            let mut v = T::zero();
            for i in 0..self.n {
                v = v.max(x[i].abs() / (lit::<T>(b[i] as f64) * h));
            }
            best = best.min(v);
        }
        best
    }

    /// Shape function with the origin rejected (the value there carries no
    /// information about the boundary).
    pub fn shape_value<T: Scalar>(&self, x: &Point<T>) -> Result<T> {
        if x.max_abs() == T::zero() {
            return Err(Error::Invalid("shape value requested at the origin".into()));
        }
        Ok(self.shape(x))
    }

    /// Shape function by bisection on the membership oracle.
    pub fn shape_bisect<T: Scalar>(&self, x: &Point<T>) -> T {
        let h: T = lit(self.side());
        let mut hi = x.max_abs() / h + lit(1e-300);
        let mut lo = T::zero();
        if hi == T::zero() {
            return T::zero();
        }
        while !self.contains_scaled(x, hi) {
            hi = hi + hi;
        }
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.contains_scaled(x, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Lipschitz constant of the shape function: `2^m0 / min b_i`.
    pub fn lipschitz(&self) -> f64 {
        let mn = self.boxes.iter().flat_map(|b| b[..self.n].iter().copied()).min().unwrap_or(1);
        1.0 / (self.side() * mn as f64)
    }

    /// Largest distance from the origin to a point of `D`.
    pub fn outer_radius(&self) -> f64 {
        let h = self.side();
        self.boxes
            .iter()
            .map(|b| b[..self.n].iter().map(|u| (u * u) as f64).sum::<f64>().sqrt() * h)
            .fold(0.0, f64::max)
    }

    /// Distance from the origin to the boundary of `D`.
    pub fn inner_radius(&self) -> f64 {
        self.boundary_complex()
            .cells(self.n - 1)
            .iter()
            .map(|f| f.aabb::<f64>().dist_point(&Point::zero()))
            .fold(f64::INFINITY, f64::min)
    }

    /// Height of the cell column over the given units of the first `n - 1`
    /// axes (0 when empty).
    fn column_top(&self, u: &[i64]) -> i64 {
        match self.kind {
            Kind::Ball(rad) => {
                let s: i64 = u.iter().map(|v| v * v).sum();
                ball_top(rad, s).unwrap_or(0)
            }
            Kind::Boxes => self
                .boxes
                .iter()
                .filter(|b| u.iter().enumerate().all(|(i, v)| *v <= b[i]))
                .map(|b| b[self.n - 1])
                .max()
                .unwrap_or(0),
        }
    }

    fn max_unit(&self) -> i64 {
        self.boxes.iter().flat_map(|b| b[..self.n].iter().copied()).max().unwrap_or(0)
    }

    fn columns(&self) -> Vec<(Vec<i64>, i64)> {
        let n = self.n;
        let u = self.max_unit();
        let mut idx = vec![-u; n - 1];
        let mut out = Vec::new();
        loop {
            let units: Vec<i64> = idx.iter().map(|l| unit_of(*l)).collect();
            let t = self.column_top(&units);
            if t > 0 {
                out.push((idx.clone(), t));
            }
            if !advance(&mut idx, -u, u - 1) {
                break;
            }
        }
        out
    }

    pub fn num_cells(&self) -> usize {
        self.columns().iter().map(|(_, t)| 2 * *t as usize).sum()
    }

    /// All top cells, column by column.
    pub fn cells(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        let n = self.n;
        let m0 = self.m0;
        self.columns().into_iter().flat_map(move |(c, t)| {
            (-t..t).map(move |l| {
                let mut corner = [0i64; MAX_DIM];
                corner[..n - 1].copy_from_slice(&c);
                corner[n - 1] = l;
                DyadicCube::top(m0, &corner[..n])
            })
        })
    }

    /// Boundary complex `∂D` at scale `m0`.
    pub fn boundary_complex(&self) -> &DyadicComplex {
        self.boundary.get_or_init(|| self.compute_boundary())
    }

    fn compute_boundary(&self) -> DyadicComplex {
        let n = self.n;
        let last = n - 1;
        let mut out = DyadicComplex::empty(n, self.m0);
        let u = self.max_unit();
        let top_of = |idx: &[i64]| -> i64 {
            if idx.iter().any(|l| *l < -u || *l > u - 1) {
                return 0;
            }
            let units: Vec<i64> = idx.iter().map(|l| unit_of(*l)).collect();
            self.column_top(&units)
        };
        let mut idx = vec![-u - 1; n - 1];
        let all = (0..n).collect::<Vec<_>>();
        loop {
            let t = top_of(&idx);
            let mut corner = [0i64; MAX_DIM];
            corner[..n - 1].copy_from_slice(&idx);
            if t > 0 {
                for l in [t, -t] {
                    corner[last] = l;
                    let axes: Vec<usize> = all.iter().copied().filter(|a| *a != last).collect();
                    out.insert_closed(DyadicCube::new(self.m0, &corner[..n], &axes).unwrap());
                }
            }
            for j in 0..n - 1 {
                let mut nb = idx.clone();
                nb[j] += 1;
                let t2 = top_of(&nb);
                let (lo, hi) = (t.min(t2), t.max(t2));
                if lo == hi {
                    continue;
                }
                let axes: Vec<usize> = all.iter().copied().filter(|a| *a != j).collect();
                let mut fc = corner;
                fc[j] = idx[j] + 1;
                for l in (-hi..-lo).chain(lo..hi) {
                    fc[last] = l;
                    out.insert_closed(DyadicCube::new(self.m0, &fc[..n], &axes).unwrap());
                }
            }
            if !advance(&mut idx, -u - 1, u) {
                break;
            }
        }
        out
    }

    /// Text form: a header line followed by the top cells.
    pub fn to_text(&self, with_cells: bool) -> String {
        let mut s = format!("domain {} {} {} {}\n", self.n, self.m0, self.r1, self.r2);
        if let Kind::Boxes = self.kind {
            for b in &self.boxes {
                let v: Vec<String> = b[..self.n].iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "box {}", v.join(" "));
            }
        }
        if with_cells {
            for c in self.cells() {
                let _ = writeln!(s, "{}", c.to_line());
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Domain> {
        let mut header = None;
        let mut boxes = Vec::new();
        let mut cells = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", no + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "domain" => {
                    if toks.len() != 5 {
                        return Err(bad("expected `domain n m0 r1 r2`"));
                    }
                    let n: usize = toks[1].parse().map_err(|_| bad("bad n"))?;
                    let m0: i32 = toks[2].parse().map_err(|_| bad("bad m0"))?;
                    let r1: f64 = toks[3].parse().map_err(|_| bad("bad r1"))?;
                    let r2: f64 = toks[4].parse().map_err(|_| bad("bad r2"))?;
                    header = Some((n, m0, r1, r2));
                }
                "box" => {
                    let b: Vec<i64> = toks[1..]
                        .iter()
                        .map(|t| t.parse::<i64>().map_err(|_| bad("bad box unit")))
                        .collect::<Result<_>>()?;
                    boxes.push(b);
                }
                _ => cells.push(line.parse::<DyadicCube>().map_err(|e| bad(&e.to_string()))?),
            }
        }
        let (n, m0, r1, r2) = header.ok_or_else(|| Error::Parse("missing domain header".into()))?;
        let d = if !boxes.is_empty() {
            let mut d = Domain::from_boxes(n, m0, &boxes)?;
            d.r1 = r1;
            d.r2 = r2;
            d
        } else {
            Domain::build(n, r1, r2, m0)?
        };
        if !cells.is_empty() {
            let mut a = cells;
            a.sort_unstable();
            a.dedup();
            let mut b: Vec<DyadicCube> = d.cells().collect();
            b.sort_unstable();
            if a != b {
                return Err(Error::Invalid("cell list does not match the domain header".into()));
            }
        }
        Ok(d)
    }
}

/// Largest `b >= 1` with `s + b^2 < rad^2`.
fn ball_top(rad: f64, s: i64) -> Option<i64> {
    let r2 = rad * rad;
    let rest = r2 - s as f64;
    if rest <= 1.0 {
        return None;
    }
    let mut b = rest.sqrt().floor() as i64;
    while b > 0 && ((s + b * b) as f64) >= r2 {
        b -= 1;
    }
    while ((s + (b + 1) * (b + 1)) as f64) < r2 {
        b += 1;
    }
    (b >= 1).then_some(b)
}

/// Odometer increment over `[lo, hi]^k`; false once wrapped.
fn advance(idx: &mut [i64], lo: i64, hi: i64) -> bool {
    for v in idx.iter_mut() {
        if *v < hi {
            *v += 1;
            return true;
        }
        *v = lo;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_domain_shape() {
        let d = Domain::from_boxes(2, 1, &[vec![1, 1]]).unwrap();
        let x: Point<f64> = Point::from_f64(&[0.25, -0.1]);
        assert!((d.shape(&x) - 0.5).abs() < 1e-15);
        assert!((d.shape_bisect(&x) - 0.5).abs() < 1e-12);
        assert_eq!(d.num_cells(), 4);
        assert_eq!(d.boundary_complex().cells(1).len(), 8);
        assert!((d.inner_radius() - 0.5).abs() < 1e-15);
        assert!((d.lipschitz() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ball_domain_containment() {
        let d = Domain::build(2, 0.6, 0.65, 11).unwrap();
        assert!(d.inner_radius() > 0.6);
        assert!(d.outer_radius() < 0.65);
        for k in 0..64 {
            let a = k as f64 * std::f64::consts::TAU / 64.0;
            let p: Point<f64> = Point::from_f64(&[0.6 * a.cos(), 0.6 * a.sin()]);
            assert!(d.contains_open(&p));
            let q: Point<f64> = Point::from_f64(&[0.65 * a.cos(), 0.65 * a.sin()]);
            assert!(!d.contains(&q));
            let f = d.shape(&p);
            assert!((f - d.shape_bisect(&p)).abs() < 1e-9);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(matches!(Domain::build(2, 0.6, 0.65, 6), Err(Error::Precondition(_))));
    }

    #[test]
    fn boundary_is_closed_curve() {
        let d = Domain::build(2, 0.3, 0.5, 9).unwrap();
        let b = d.boundary_complex();
        // every vertex of a closed curve has exactly two edges
        for v in b.cells(0) {
            let deg = b.cells(1).iter().filter(|e| e.has_face(&v)).count();
            assert_eq!(deg, 2, "vertex {}", v.id());
        }
    }

    #[test]
    fn text_round_trip() {
        let d = Domain::build(2, 0.3, 0.5, 9).unwrap();
        let back = Domain::from_text(&d.to_text(true)).unwrap();
        assert_eq!(d, back);
        let s = Domain::from_boxes(2, 2, &[vec![3, 1], vec![1, 2]]).unwrap();
        let back = Domain::from_text(&s.to_text(false)).unwrap();
        assert_eq!(s, back);
    }
}
