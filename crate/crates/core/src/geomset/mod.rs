//! Finite unions of simplices ("polyhedral sets") and the measure,
//! distance and restriction operations used throughout the crate.

mod region;
mod union;

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use smallvec::{smallvec, SmallVec};

pub use region::{merge_intervals, Placement, Region};
pub use union::{union_area, union_area_2d, union_length};

use crate::error::{Error, Result};
use crate::geom::{dist_point_segment, dist_point_triangle, fan_triangles, Aabb, Point, Polygon, MAX_DIM};
use crate::scalar::{lit, to_f64, Scalar};

pub type Simplex<T> = SmallVec<[Point<T>; 3]>;

/// Finite union of closed `d`-simplices in `R^n` (`d <= 2`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolySet<T> {
    pub n: usize,
    pub d: usize,
    pub simplices: Vec<Simplex<T>>,
}

impl<T: Scalar> PolySet<T> {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::Invalid(format!("ambient dimension {n} not in 1..={MAX_DIM}")));
        }
        if d > 2 || d > n {
            return Err(Error::Unsupported(format!("simplices of dimension {d} in R^{n}")));
        }
        Ok(PolySet { n, d, simplices: Vec::new() })
    }

    pub fn from_segments(n: usize, segs: &[(Point<T>, Point<T>)]) -> Self {
        PolySet { n, d: 1, simplices: segs.iter().map(|(a, b)| smallvec![*a, *b]).collect() }
    }

    pub fn push(&mut self, s: &[Point<T>]) -> Result<()> {
        if s.len() != self.d + 1 {
            return Err(Error::Invalid(format!("expected {} vertices, got {}", self.d + 1, s.len())));
        }
        self.simplices.push(s.iter().copied().collect());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn bbox(&self) -> Option<Aabb<T>> {
        let pts: Vec<Point<T>> = self.simplices.iter().flatten().copied().collect();
        (!pts.is_empty()).then(|| Aabb::of_points(self.n, &pts))
    }

    pub fn extend(&mut self, other: &PolySet<T>) -> Result<()> {
        if other.n != self.n || other.d != self.d {
            return Err(Error::Invalid("union of sets of different dimensions".into()));
        }
        self.simplices.extend(other.simplices.iter().cloned());
        Ok(())
    }

    pub fn union(&self, other: &PolySet<T>) -> Result<PolySet<T>> {
        let mut out = self.clone();
        out.extend(other)?;
        Ok(out)
    }

    pub fn map<F: Fn(&Point<T>) -> Point<T>>(&self, f: F) -> PolySet<T> {
        PolySet {
            n: self.n,
            d: self.d,
            simplices: self.simplices.iter().map(|s| s.iter().map(&f).collect()).collect(),
        }
    }

    /// Blow-up `y -> (y - x) / r`.
    pub fn rescale(&self, x: &Point<T>, r: T) -> Result<PolySet<T>> {
        if r <= T::zero() {
            return Err(Error::Precondition("rescale radius must be positive".into()));
        }
        let inv = T::one() / r;
        Ok(self.map(|p| (*p - *x) * inv))
    }

    pub fn translate(&self, v: &Point<T>) -> PolySet<T> {
        self.map(|p| *p + *v)
    }

    /// Rotation by `theta` in the plane of the first two coordinates.
    pub fn rotate2(&self, theta: T) -> PolySet<T> {
        let (s, c) = theta.sin_cos();
        self.map(|p| {
            let mut q = *p;
            q[0] = c * p[0] - s * p[1];
            q[1] = s * p[0] + c * p[1];
            q
        })
    }

    /// Drops degenerate simplices (lower-dimensional debris) and duplicates.
    pub fn reduce(&self) -> PolySet<T> {
        let scale = self.bbox().map(|b| (b.hi - b.lo).norm()).unwrap_or(T::one()).max(T::one());
        let tol = T::epsilon() * lit(64.0) * scale;
        let mut seen = BTreeSet::new();
        let mut out = PolySet { n: self.n, d: self.d, simplices: Vec::new() };
        for s in &self.simplices {
            let size = match self.d {
                0 => T::one(),
                1 => s[0].dist(&s[1]),
                _ => crate::geom::triangle_area(&s[0], &s[1], &s[2]).sqrt(),
            };
            if size <= tol {
                continue;
            }
            let mut key: Vec<[u64; MAX_DIM]> = s.iter().map(|p| p.bit_key()).collect();
            key.sort_unstable();
            if seen.insert(key) {
                out.simplices.push(s.clone());
            }
        }
        out
    }

    /// The simplices of `self ∩ window` (triangles of clipped polygons).
    pub fn pieces(&self, window: &Region<T>) -> Result<Vec<Simplex<T>>> {
        let mut out = Vec::new();
        match self.d {
            0 => {
                for s in &self.simplices {
                    if window.contains(&s[0]) {
                        out.push(s.clone());
                    }
                }
            }
            1 => {
                for s in &self.simplices {
                    for (t0, t1) in window.segment_intervals(&s[0], &s[1]) {
                        let a = if t0 == T::zero() { s[0] } else { s[0].lerp(&s[1], t0) };
                        let b = if t1 == T::one() { s[1] } else { s[0].lerp(&s[1], t1) };
                        out.push(smallvec![a, b]);
                    }
                }
            }
            _ => {
                for s in &self.simplices {
                    for poly in window.polygon_pieces(s)? {
                        for t in fan_triangles(&poly, T::zero()) {
                            out.push(t.iter().copied().collect());
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn restrict(&self, window: &Region<T>) -> Result<PolySet<T>> {
        Ok(PolySet { n: self.n, d: self.d, simplices: self.pieces(window)? })
    }

    /// `H^d(self ∩ window)`: counting measure for points, exact union length
    /// or area otherwise.
    pub fn measure(&self, window: &Region<T>) -> Result<T> {
        match self.d {
            0 => {
                let pts: BTreeSet<[u64; MAX_DIM]> =
                    self.pieces(window)?.iter().map(|s| s[0].bit_key()).collect();
                Ok(lit(pts.len() as f64))
            }
            1 => {
                let segs: Vec<(Point<T>, Point<T>)> =
                    self.pieces(window)?.iter().map(|s| (s[0], s[1])).collect();
                Ok(union_length(&segs, self.n))
            }
            _ => {
                let mut polys: Vec<Polygon<T>> = Vec::new();
                for s in &self.simplices {
                    polys.extend(window.polygon_pieces(s)?);
                }
                Ok(union_area(&polys, self.n))
            }
        }
    }

    pub fn total_measure(&self) -> T {
        self.measure(&Region::All).expect("unrestricted measure")
    }

    /// Euclidean distance from a point to the set (`+inf` when empty).
    pub fn dist_to(&self, p: &Point<T>) -> T {
        self.simplices.iter().map(|s| dist_to_simplex(p, s)).fold(T::infinity(), T::min)
    }

    /// `sup { dist(x, other) : x in self ∩ window }`, to within `tol`.
    pub fn excess(&self, other: &PolySet<T>, window: &Region<T>, tol: T) -> Result<T> {
        let pieces = self.pieces(window)?;
        Ok(sup_distance(&pieces, other, tol))
    }

    /// Local Hausdorff-type distance `d_K(self, other)`: sum of the two excesses
    /// restricted to the window.
    pub fn local_hausdorff(&self, other: &PolySet<T>, window: &Region<T>, tol: T) -> Result<T> {
        let half = tol * lit(0.5);
        Ok(self.excess(other, window, half)? + other.excess(self, window, half)?)
    }

    /// Scene text: a header `n d` then one simplex per line (all vertex
    /// coordinates in order).
    pub fn to_scene(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.d);
        for simplex in &self.simplices {
            let mut first = true;
            for p in simplex {
                for i in 0..self.n {
                    if !first {
                        s.push(' ');
                    }
                    first = false;
                    let _ = write!(s, "{}", to_f64(p[i]));
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn from_scene(text: &str) -> Result<PolySet<T>> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hno, header) = lines.next().ok_or_else(|| Error::Parse("empty scene".into()))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {hno}: bad header {header:?}"))))
            .collect::<Result<_>>()?;
        if h.len() != 2 {
            return Err(Error::Parse(format!("line {hno}: header must be `n d`")));
        }
        let mut set = PolySet::new(h[0], h[1])?;
        let want = (set.d + 1) * set.n;
        for (no, line) in lines {
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {no}: bad number {t:?}"))))
                .collect::<Result<_>>()?;
            if v.len() != want {
                return Err(Error::Parse(format!("line {no}: expected {want} numbers, got {}", v.len())));
            }
            let pts: Vec<Point<T>> = v.chunks(set.n).map(Point::from_f64).collect();
            set.push(&pts)?;
        }
        Ok(set)
    }
}

fn dist_to_simplex<T: Scalar>(p: &Point<T>, s: &[Point<T>]) -> T {
    match s.len() {
        1 => p.dist(&s[0]),
        2 => dist_point_segment(p, &s[0], &s[1]),
        _ => dist_point_triangle(p, &s[0], &s[1], &s[2]),
    }
}

struct Cand<T> {
    ub: f64,
    s: Simplex<T>,
}

impl<T> PartialEq for Cand<T> {
    fn eq(&self, o: &Self) -> bool {
        self.ub == o.ub
    }
}
impl<T> Eq for Cand<T> {}
impl<T> PartialOrd for Cand<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Cand<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.ub.total_cmp(&o.ub)
    }
}

/// Branch and bound for the supremum of `dist(., target)` over a union of
/// simplices. Each target simplex contributes a convex distance function, so
/// its maximum over a piece sits at a vertex; the minimum over target simplices
/// of those vertex maxima bounds the supremum from above.
fn sup_distance<T: Scalar>(pieces: &[Simplex<T>], target: &PolySet<T>, tol: T) -> T {
    if pieces.is_empty() {
        return T::zero();
    }
    if target.is_empty() {
        return T::infinity();
    }
    let eval = |s: &Simplex<T>| -> (f64, SmallVec<[T; 3]>) {
        let mut ub = T::infinity();
        let mut vals: SmallVec<[T; 3]> = smallvec![T::infinity(); s.len()];
        for t in &target.simplices {
            let mut worst = T::zero();
            for (k, p) in s.iter().enumerate() {
                let d = dist_to_simplex(p, t);
                worst = worst.max(d);
                vals[k] = vals[k].min(d);
            }
            ub = ub.min(worst);
        }
        (to_f64(ub), vals)
    };
    let mut best = T::zero();
    let mut heap = BinaryHeap::new();
    for s in pieces {
        let (ub, vals) = eval(s);
        best = vals.iter().copied().fold(best, T::max);
        heap.push(Cand { ub, s: s.clone() });
    }
    let tol = to_f64(tol);
    let mut steps = 0usize;
    let half = lit::<T>(0.5);
    while let Some(c) = heap.pop() {
        if c.ub - to_f64(best) <= tol || steps > 100_000 {
            return best.max(lit(c.ub.min(to_f64(best) + tol)));
        }
        steps += 1;
        let children: Vec<Simplex<T>> = match c.s.len() {
            1 => vec![],
            2 => {
                let m = c.s[0].mid(&c.s[1]);
                vec![smallvec![c.s[0], m], smallvec![m, c.s[1]]]
            }
            _ => {
                let (a, b, d) = (c.s[0], c.s[1], c.s[2]);
                let (ab, bd, da) = (a.lerp(&b, half), b.lerp(&d, half), d.lerp(&a, half));
                vec![
                    smallvec![a, ab, da],
                    smallvec![ab, b, bd],
                    smallvec![da, bd, d],
                    smallvec![ab, bd, da],
                ]
            }
        };
        for s in children {
            let (ub, vals) = eval(&s);
            best = vals.iter().copied().fold(best, T::max);
            if ub > to_f64(best) + tol {
                heap.push(Cand { ub, s });
            }
        }
    }
    best
}

/// Sequence of sets indexed by `k`, all with the same `(n, d)`.
#[derive(Clone, Debug)]
pub struct SetSequence<T> {
    pub index: Vec<u64>,
    pub sets: Vec<PolySet<T>>,
}

impl<T: Scalar> SetSequence<T> {
    pub fn new(index: Vec<u64>, sets: Vec<PolySet<T>>) -> Result<Self> {
        if index.len() != sets.len() {
            return Err(Error::Invalid("index and set counts differ".into()));
        }
        if let Some(f) = sets.first() {
            if sets.iter().any(|s| s.n != f.n || s.d != f.d) {
                return Err(Error::Invalid("sequence members differ in dimension".into()));
            }
        }
        Ok(SetSequence { index, sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport<T> {
    /// `distances[j][k]`: `d_{K_j}(E, E_k)`.
    pub distances: Vec<Vec<T>>,
    /// First position of the tail (the second half of the sequence).
    pub tail_start: usize,
    pub tail_sup: Vec<T>,
    pub pass: bool,
}

/// Local Hausdorff convergence test of `seq` towards `limit` on each window.
/// The verdict is taken on the second half of the sequence.
pub fn check_convergence<T: Scalar>(
    seq: &SetSequence<T>,
    limit: &PolySet<T>,
    windows: &[Region<T>],
    tol: T,
) -> Result<ConvergenceReport<T>> {
    if seq.is_empty() {
        return Err(Error::Invalid("empty sequence".into()));
    }
    let mut distances = Vec::with_capacity(windows.len());
    for w in windows {
        let mut row = Vec::with_capacity(seq.len());
        for s in &seq.sets {
            row.push(limit.local_hausdorff(s, w, tol * lit(1e-2))?);
        }
        distances.push(row);
    }
    let tail_start = seq.len() / 2;
    let tail_sup: Vec<T> = distances
        .iter()
        .map(|row| row[tail_start..].iter().copied().fold(T::zero(), T::max))
        .collect();
    let pass = tail_sup.iter().all(|v| *v <= tol);
    Ok(ConvergenceReport { distances, tail_start, tail_sup, pass })
}

/// Density ratios `H^d(E ∩ B(x, r)) / r^d` at points of `E`.
pub fn ahlfors_ratios<T: Scalar>(set: &PolySet<T>, balls: &[(Point<T>, T)], tol: T) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(balls.len());
    for (x, r) in balls {
        if set.dist_to(x) > tol {
            return Err(Error::Precondition("ball center not on the set".into()));
        }
        if *r <= T::zero() {
            return Err(Error::Precondition("ball radius must be positive".into()));
        }
        let m = set.measure(&Region::ball(*x, *r))?;
        out.push(m / r.powi(set.d as i32));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::from_f64(&[x, y])
    }

    #[test]
    fn points_at_distance() {
        let mut a = PolySet::new(2, 0).unwrap();
        a.push(&[p(0.0, 0.0)]).unwrap();
        let mut b = PolySet::new(2, 0).unwrap();
        b.push(&[p(0.1, 0.0)]).unwrap();
        let w = Region::ball(p(0.0, 0.0), 1.0);
        let d = a.local_hausdorff(&b, &w, 1e-12).unwrap();
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn segment_excess_by_bisection() {
        let a = PolySet::from_segments(2, &[(p(0.0, 0.0), p(1.0, 0.0))]);
        let mut b = PolySet::new(2, 0).unwrap();
        b.push(&[p(0.0, 0.0)]).unwrap();
        let e = a.excess(&b, &Region::All, 1e-9).unwrap();
        assert!((e - 1.0).abs() < 1e-8);
    }

    #[test]
    fn reduce_drops_debris() {
        let a = PolySet::from_segments(2, &[(p(0.0, 0.0), p(1.0, 0.0)), (p(3.0, 3.0), p(3.0, 3.0))]);
        let r = a.reduce();
        assert_eq!(r.len(), 1);
        assert_eq!(r.reduce(), r);
    }

    #[test]
    fn ahlfors_on_line_and_junction() {
        let line = PolySet::from_segments(2, &[(p(-5.0, 0.0), p(5.0, 0.0))]);
        let r = ahlfors_ratios(&line, &[(p(0.0, 0.0), 1.0)], 1e-12).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-12);
        let y = PolySet::from_segments(
            2,
            &[(p(0.0, 0.0), p(3.0, 0.0)), (p(0.0, 0.0), p(-3.0, 3.0)), (p(0.0, 0.0), p(-3.0, -3.0))],
        );
        let r = ahlfors_ratios(&y, &[(p(0.0, 0.0), 1.0)], 1e-12).unwrap();
        assert!((r[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn scene_round_trip() {
        let a = PolySet::from_segments(2, &[(p(0.1, 0.2), p(1.0 / 3.0, -4.0))]);
        let back = PolySet::<f64>::from_scene(&a.to_scene()).unwrap();
        assert_eq!(a, back);
        assert!(PolySet::<f64>::from_scene("2 1\n0 0 1\n").is_err());
    }

    #[test]
    fn alternating_sequence_fails() {
        let e = PolySet::from_segments(2, &[(p(-1.0, 0.0), p(1.0, 0.0))]);
        let far = e.translate(&p(0.0, 1.0));
        let sets: Vec<_> = (0..20).map(|k| if k % 2 == 0 { e.clone() } else { far.clone() }).collect();
        let seq = SetSequence::new((0..20).collect(), sets).unwrap();
        let w = [Region::ball(p(0.0, 0.0), 2.0)];
        assert!(!check_convergence(&seq, &e, &w, 0.1).unwrap().pass);
        let sets: Vec<_> = (1..=100).map(|k| e.translate(&p(0.0, 1.0 / k as f64))).collect();
        let seq = SetSequence::new((1..=100).collect(), sets).unwrap();
        assert!(check_convergence(&seq, &e, &w, 0.1).unwrap().pass);
    }
}
