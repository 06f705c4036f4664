//! Low level geometry: points, boxes, half-spaces and clipping.
//!
//! Points always carry [`MAX_DIM`] coordinates; coordinates past the ambient
//! dimension are kept at zero so that vector arithmetic never needs `n`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use smallvec::SmallVec;

use crate::scalar::{lit, Scalar};

pub const MAX_DIM: usize = 4;

#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct Point<T>(pub [T; MAX_DIM]);

impl<T: Scalar> Point<T> {
    pub fn zero() -> Self {
        Point([T::zero(); MAX_DIM])
    }

    /// Builds a point from the leading coordinates of `c`.
    pub fn from_slice(c: &[T]) -> Self {
        assert!(c.len() <= MAX_DIM, "ambient dimension above {MAX_DIM}");
        let mut p = Self::zero();
        p.0[..c.len()].copy_from_slice(c);
        p
    }

    pub fn from_f64(c: &[f64]) -> Self {
        assert!(c.len() <= MAX_DIM, "ambient dimension above {MAX_DIM}");
        let mut p = Self::zero();
        for (dst, v) in p.0.iter_mut().zip(c) {
            *dst = lit(*v);
        }
        p
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| *a * *b).sum()
    }

    pub fn norm2(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm2().sqrt()
    }

    pub fn dist(&self, o: &Self) -> T {
        (*self - *o).norm()
    }

    pub fn lerp(&self, o: &Self, t: T) -> Self {
        *self + (*o - *self) * t
    }

    pub fn mid(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        let half = lit::<T>(0.5);
        for i in 0..MAX_DIM {
            p.0[i] = (self.0[i] + o.0[i]) * half;
        }
        p
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Bitwise key, used for exact point identity.
    pub fn bit_key(&self) -> [u64; MAX_DIM] {
        let mut k = [0u64; MAX_DIM];
        for i in 0..MAX_DIM {
            let v = self.0[i].to_f64().unwrap_or(f64::NAN);
            // -0.0 and 0.0 are the same point
            k[i] = if v == 0.0 { 0 } else { v.to_bits() };
        }
        k
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Point<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut p = self;
        for i in 0..MAX_DIM {
            p.0[i] = p.0[i] + o.0[i];
        }
        p
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut p = self;
        for i in 0..MAX_DIM {
            p.0[i] = p.0[i] - o.0[i];
        }
        p
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        let mut p = self;
        for v in p.0.iter_mut() {
            *v = *v * s;
        }
        p
    }
}

/// Axis-aligned closed box in the first `n` coordinates.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Aabb<T> {
    pub n: usize,
    pub lo: Point<T>,
    pub hi: Point<T>,
}

impl<T: Scalar> Aabb<T> {
    pub fn new(n: usize, lo: Point<T>, hi: Point<T>) -> Self {
        Aabb { n, lo, hi }
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        (0..self.n).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    pub fn contains_open(&self, p: &Point<T>) -> bool {
        (0..self.n).all(|i| p[i] > self.lo[i] && p[i] < self.hi[i])
    }

    pub fn intersects(&self, o: &Self) -> bool {
        (0..self.n).all(|i| self.lo[i] <= o.hi[i] && o.lo[i] <= self.hi[i])
    }

    pub fn center(&self) -> Point<T> {
        self.lo.mid(&self.hi)
    }

    /// Distance from a point to the box (zero inside).
    pub fn dist_point(&self, p: &Point<T>) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            let d = if p[i] < self.lo[i] {
                self.lo[i] - p[i]
            } else if p[i] > self.hi[i] {
                p[i] - self.hi[i]
            } else {
                T::zero()
            };
            s = s + d * d;
        }
        s.sqrt()
    }

    /// Largest distance from a point to a point of the box.
    pub fn far_dist_point(&self, p: &Point<T>) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            let d = (p[i] - self.lo[i]).abs().max((p[i] - self.hi[i]).abs());
            s = s + d * d;
        }
        s.sqrt()
    }

    pub fn expand(&self, r: T) -> Self {
        let mut b = *self;
        for i in 0..self.n {
            b.lo[i] = b.lo[i] - r;
            b.hi[i] = b.hi[i] + r;
        }
        b
    }

    pub fn of_points(n: usize, pts: &[Point<T>]) -> Self {
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts[1..] {
            for i in 0..n {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Aabb { n, lo, hi }
    }
}

/// Closed half-space `{ y : normal . (y - origin) >= 0 }`.
#[derive(Clone, Copy, Debug)]
pub struct HalfSpace<T> {
    pub origin: Point<T>,
    pub normal: Point<T>,
}

impl<T: Scalar> HalfSpace<T> {
    #[inline]
    pub fn eval(&self, p: &Point<T>) -> T {
        self.normal.dot(&(*p - self.origin))
    }

    /// Axis-aligned half-space `sign * (y_axis - c) >= 0`.
    pub fn axis(axis: usize, c: T, sign: T) -> Self {
        let mut origin = Point::zero();
        origin[axis] = c;
        let mut normal = Point::zero();
        normal[axis] = sign;
        HalfSpace { origin, normal }
    }
}

/// Parameter interval of a segment `a + s (b - a)` inside a closed (or open)
/// box, Liang-Barsky style. Returns `None` when empty.
pub fn clip_segment_box<T: Scalar>(
    a: &Point<T>,
    b: &Point<T>,
    bx: &Aabb<T>,
    open: bool,
) -> Option<(T, T)> {
    let mut t0 = T::zero();
    let mut t1 = T::one();
    for i in 0..bx.n {
        let d = b[i] - a[i];
        for (p, q) in [(-d, a[i] - bx.lo[i]), (d, bx.hi[i] - a[i])] {
            if p == T::zero() {
                if q < T::zero() || (open && q == T::zero()) {
                    return None;
                }
            } else {
                let r = q / p;
                if p < T::zero() {
                    if r > t1 {
                        return None;
                    }
                    if r > t0 {
                        t0 = r;
                    }
                } else {
                    if r < t0 {
                        return None;
                    }
                    if r < t1 {
                        t1 = r;
                    }
                }
            }
        }
    }
    if t0 > t1 || (open && t0 >= t1) {
        return None;
    }
    Some((t0, t1))
}

/// Clips a segment parameter range against a half-space.
pub fn clip_segment_halfspace<T: Scalar>(
    a: &Point<T>,
    b: &Point<T>,
    range: (T, T),
    h: &HalfSpace<T>,
) -> Option<(T, T)> {
    let fa = h.eval(a);
    let fb = h.eval(b);
    let (mut t0, mut t1) = range;
    let df = fb - fa;
    if df == T::zero() {
        return if fa >= T::zero() { Some(range) } else { None };
    }
    let r = -fa / df;
    if df > T::zero() {
        t0 = t0.max(r);
    } else {
        t1 = t1.min(r);
    }
    if t0 <= t1 {
        Some((t0, t1))
    } else {
        None
    }
}

pub type Polygon<T> = SmallVec<[Point<T>; 8]>;

/// Sutherland-Hodgman clip of a planar convex polygon (embedded in any
/// ambient dimension) against a half-space. `open` drops polygons lying
/// entirely on the bounding hyperplane.
pub fn clip_polygon<T: Scalar>(poly: &[Point<T>], h: &HalfSpace<T>, open: bool) -> Polygon<T> {
    let mut out = Polygon::new();
    if poly.is_empty() {
        return out;
    }
    let vals: SmallVec<[T; 8]> = poly.iter().map(|p| h.eval(p)).collect();
    if open && vals.iter().all(|v| *v <= T::zero()) {
        return out;
    }
    let k = poly.len();
    for i in 0..k {
        let j = (i + 1) % k;
        let (p, q) = (poly[i], poly[j]);
        let (fp, fq) = (vals[i], vals[j]);
        if fp >= T::zero() {
            out.push(p);
        }
        if (fp > T::zero() && fq < T::zero()) || (fp < T::zero() && fq > T::zero()) {
            let t = fp / (fp - fq);
            out.push(p.lerp(&q, t));
        }
    }
    out
}

pub fn clip_polygon_box<T: Scalar>(poly: &[Point<T>], bx: &Aabb<T>, open: bool) -> Polygon<T> {
    let mut cur: Polygon<T> = poly.iter().copied().collect();
    for i in 0..bx.n {
        cur = clip_polygon(&cur, &HalfSpace::axis(i, bx.lo[i], T::one()), open);
        if cur.is_empty() {
            return cur;
        }
        cur = clip_polygon(&cur, &HalfSpace::axis(i, bx.hi[i], -T::one()), open);
        if cur.is_empty() {
            return cur;
        }
    }
    cur
}

pub fn triangle_area<T: Scalar>(a: &Point<T>, b: &Point<T>, c: &Point<T>) -> T {
    let u = *b - *a;
    let v = *c - *a;
    let uu = u.norm2();
    let vv = v.norm2();
    let uv = u.dot(&v);
    let g = uu * vv - uv * uv;
    if g <= T::zero() {
        T::zero()
    } else {
        g.sqrt() * lit(0.5)
    }
}

pub fn polygon_area<T: Scalar>(poly: &[Point<T>]) -> T {
    if poly.len() < 3 {
        return T::zero();
    }
    (1..poly.len() - 1)
        .map(|i| triangle_area(&poly[0], &poly[i], &poly[i + 1]))
        .sum()
}

/// Fan triangulation of a convex polygon, skipping degenerate triangles.
pub fn fan_triangles<T: Scalar>(poly: &[Point<T>], min_area: T) -> Vec<[Point<T>; 3]> {
    let mut out = Vec::new();
    if poly.len() < 3 {
        return out;
    }
    for i in 1..poly.len() - 1 {
        let t = [poly[0], poly[i], poly[i + 1]];
        if triangle_area(&t[0], &t[1], &t[2]) > min_area {
            out.push(t);
        }
    }
    out
}

pub fn dist_point_segment<T: Scalar>(p: &Point<T>, a: &Point<T>, b: &Point<T>) -> T {
    let d = *b - *a;
    let l2 = d.norm2();
    if l2 == T::zero() {
        return p.dist(a);
    }
    let t = ((*p - *a).dot(&d) / l2).max(T::zero()).min(T::one());
    p.dist(&a.lerp(b, t))
}

pub fn dist_point_triangle<T: Scalar>(p: &Point<T>, a: &Point<T>, b: &Point<T>, c: &Point<T>) -> T {
    // Solve for the projection onto the plane in barycentric form.
    let u = *b - *a;
    let v = *c - *a;
    let w = *p - *a;
    let uu = u.dot(&u);
    let uv = u.dot(&v);
    let vv = v.dot(&v);
    let wu = w.dot(&u);
    let wv = w.dot(&v);
    let det = uu * vv - uv * uv;
    if det > T::zero() {
        let s = (vv * wu - uv * wv) / det;
        let t = (uu * wv - uv * wu) / det;
        if s >= T::zero() && t >= T::zero() && s + t <= T::one() {
            let q = *a + u * s + v * t;
            return p.dist(&q);
        }
    }
    dist_point_segment(p, a, b)
        .min(dist_point_segment(p, b, c))
        .min(dist_point_segment(p, c, a))
}

/// Distance between two segments, by minimising the convex distance function
/// over the parameter square.
pub fn dist_segment_segment<T: Scalar>(a: &Point<T>, b: &Point<T>, c: &Point<T>, d: &Point<T>) -> T {
    let u = *b - *a;
    let v = *d - *c;
    let w = *a - *c;
    let uu = u.dot(&u);
    let uv = u.dot(&v);
    let vv = v.dot(&v);
    let uw = u.dot(&w);
    let vw = v.dot(&w);
    let det = uu * vv - uv * uv;
    let mut best = dist_point_segment(a, c, d)
        .min(dist_point_segment(b, c, d))
        .min(dist_point_segment(c, a, b))
        .min(dist_point_segment(d, a, b));
    if det > T::zero() {
        let s = (uv * vw - vv * uw) / det;
        let t = (uu * vw - uv * uw) / det;
        if s >= T::zero() && s <= T::one() && t >= T::zero() && t <= T::one() {
            let p = *a + u * s;
            let q = *c + v * t;
            best = best.min(p.dist(&q));
        }
    }
    best
}

/// Golden-section minimisation of a convex function on `[lo, hi]`.
pub fn golden_min<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, iters: usize) -> T {
    let g = lit::<T>(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * g;
    let mut d = a + (b - a) * g;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * g;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * g;
            fd = f(d);
        }
    }
    f(lo).min(f(hi)).min(fc).min(fd)
}

/// Distance between a segment and a box.
pub fn dist_segment_box<T: Scalar>(a: &Point<T>, b: &Point<T>, bx: &Aabb<T>) -> T {
    if clip_segment_box(a, b, bx, false).is_some() {
        return T::zero();
    }
    golden_min(|t| bx.dist_point(&a.lerp(b, t)), T::zero(), T::one(), 80)
}

/// Distance between a triangle and a box.
pub fn dist_triangle_box<T: Scalar>(tri: &[Point<T>; 3], bx: &Aabb<T>) -> T {
    if !clip_polygon_box(tri, bx, false).is_empty() {
        return T::zero();
    }
    // convex in (s, t) over the simplex; nested golden section
    let [a, b, c] = *tri;
    golden_min(
        |s| {
            let p = a.lerp(&b, s);
            let q = a.lerp(&c, s);
            golden_min(|t| bx.dist_point(&p.lerp(&q, t)), T::zero(), T::one(), 50)
        },
        T::zero(),
        T::one(),
        50,
    )
}

/// Whether a closed segment meets a closed triangle (coplanar or transversal),
/// up to the given tolerance.
pub fn segment_meets_triangle<T: Scalar>(a: &Point<T>, b: &Point<T>, tri: &[Point<T>; 3], tol: T) -> bool {
    let f = |t: T| dist_point_triangle(&a.lerp(b, t), &tri[0], &tri[1], &tri[2]);
    golden_min(f, T::zero(), T::one(), 80) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::from_f64(&[x, y])
    }

    #[test]
    fn liang_barsky_basic() {
        let bx = Aabb::new(2, p(0.0, 0.0), p(1.0, 1.0));
        let (t0, t1) = clip_segment_box(&p(-1.0, 0.5), &p(2.0, 0.5), &bx, false).unwrap();
        assert!((t0 - 1.0 / 3.0).abs() < 1e-15 && (t1 - 2.0 / 3.0).abs() < 1e-15);
        // on the boundary: closed keeps, open drops
        assert!(clip_segment_box(&p(0.0, 0.0), &p(1.0, 0.0), &bx, false).is_some());
        assert!(clip_segment_box(&p(0.0, 0.0), &p(1.0, 0.0), &bx, true).is_none());
        assert!(clip_segment_box(&p(2.0, 2.0), &p(3.0, 2.0), &bx, false).is_none());
    }

    #[test]
    fn polygon_clip_area() {
        let sq = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let h = HalfSpace::axis(0, 0.25, 1.0);
        let c = clip_polygon(&sq, &h, false);
        assert!((polygon_area(&c) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn segment_distances() {
        let d = dist_segment_segment(&p(0.0, 0.0), &p(1.0, 0.0), &p(0.0, 1.0), &p(1.0, 2.0));
        assert!((d - 1.0).abs() < 1e-12);
        let bx = Aabb::new(2, p(2.0, 0.0), p(3.0, 1.0));
        let d = dist_segment_box(&p(0.0, 0.0), &p(1.0, 0.5), &bx);
        assert!((d - 1.0).abs() < 1e-9);
    }
}
