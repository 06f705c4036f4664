//! Exact measure of finite unions of segments and planar convex polygons.

use std::collections::BTreeMap;

use crate::geom::{Point, Polygon};
use crate::scalar::{lit, to_f64, Scalar};

const KEY_QUANTUM: f64 = 1e-9;

fn quantize(v: f64) -> i64 {
    (v / KEY_QUANTUM).round() as i64
}

/// Unit direction normalised so that its first significant coordinate is positive.
fn canonical_dir<T: Scalar>(d: Point<T>, n: usize) -> Point<T> {
    let u = d * (T::one() / d.norm());
    let lead = (0..n).find(|i| u[*i].abs() > lit(1e-6)).unwrap_or(0);
    if u[lead] < T::zero() {
        u * -T::one()
    } else {
        u
    }
}

/// `H^1` of a union of closed segments.
pub fn union_length<T: Scalar>(segs: &[(Point<T>, Point<T>)], n: usize) -> T {
    let mut groups: BTreeMap<Vec<i64>, (Point<T>, Vec<(T, T)>)> = BTreeMap::new();
    for (a, b) in segs {
        let d = *b - *a;
        if d.norm2() == T::zero() {
            continue;
        }
        let u = canonical_dir(d, n);
        let foot = *a - u * a.dot(&u);
        let mut key = Vec::with_capacity(2 * n);
        for i in 0..n {
            key.push(quantize(to_f64(u[i])));
        }
        for i in 0..n {
            key.push(quantize(to_f64(foot[i])));
        }
        let e = groups.entry(key).or_insert_with(|| (u, Vec::new()));
        let (ta, tb) = (a.dot(&e.0), b.dot(&e.0));
        e.1.push((ta.min(tb), ta.max(tb)));
    }
    let mut total = T::zero();
    for (_, (_, mut iv)) in groups {
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let (mut lo, mut hi) = iv[0];
        for &(a, b) in &iv[1..] {
            if a > hi {
                total = total + (hi - lo);
                lo = a;
                hi = b;
            } else {
                hi = hi.max(b);
            }
        }
        total = total + (hi - lo);
    }
    total
}

/// Orthonormal basis of the plane of a polygon, `None` if degenerate.
fn plane_basis<T: Scalar>(poly: &[Point<T>]) -> Option<(Point<T>, Point<T>)> {
    let o = poly[0];
    let mut e1: Option<Point<T>> = None;
    for p in &poly[1..] {
        let v = *p - o;
        let l = v.norm();
        match e1 {
            None => {
                if l > T::zero() {
                    e1 = Some(v * (T::one() / l));
                }
            }
            Some(u) => {
                let w = v - u * v.dot(&u);
                let lw = w.norm();
                if lw > l * lit(1e-9) && lw > T::zero() {
                    return Some((u, w * (T::one() / lw)));
                }
            }
        }
    }
    None
}

/// `H^2` of a union of planar convex polygons embedded in `R^n`.
pub fn union_area<T: Scalar>(polys: &[Polygon<T>], n: usize) -> T {
    let mut groups: BTreeMap<Vec<i64>, (Point<T>, Point<T>, Point<T>, Vec<Vec<[T; 2]>>)> = BTreeMap::new();
    for poly in polys {
        if poly.len() < 3 {
            continue;
        }
        let Some((e1, e2)) = plane_basis(poly) else { continue };
        let key = if n == 2 {
            Vec::new()
        } else {
            // projector onto the plane plus the foot of the origin
            let mut k = Vec::with_capacity(n * n + n);
            for i in 0..n {
                for j in 0..n {
                    k.push(quantize(to_f64(e1[i] * e1[j] + e2[i] * e2[j])));
                }
            }
            let o = poly[0];
            let foot = o - e1 * o.dot(&e1) - e2 * o.dot(&e2);
            for i in 0..n {
                k.push(quantize(to_f64(foot[i])));
            }
            k
        };
        let (ex, ey) = if n == 2 {
            let mut x = Point::zero();
            x[0] = T::one();
            let mut y = Point::zero();
            y[1] = T::one();
            (x, y)
        } else {
            (e1, e2)
        };
        let e = groups.entry(key).or_insert_with(|| (poly[0], ex, ey, Vec::new()));
        let (o, bx, by) = (e.0, e.1, e.2);
        let mut flat: Vec<[T; 2]> = poly.iter().map(|p| [(*p - o).dot(&bx), (*p - o).dot(&by)]).collect();
        if signed_area(&flat) < T::zero() {
            flat.reverse();
        }
        e.3.push(flat);
    }
    groups.into_values().map(|(_, _, _, g)| union_area_2d(&g)).sum()
}

fn signed_area<T: Scalar>(p: &[[T; 2]]) -> T {
    let mut s = T::zero();
    for i in 0..p.len() {
        let j = (i + 1) % p.len();
        s = s + p[i][0] * p[j][1] - p[j][0] * p[i][1];
    }
    s * lit(0.5)
}

fn bbox2<T: Scalar>(p: &[[T; 2]]) -> [T; 4] {
    let mut b = [p[0][0], p[0][0], p[0][1], p[0][1]];
    for q in p {
        b[0] = b[0].min(q[0]);
        b[1] = b[1].max(q[0]);
        b[2] = b[2].min(q[1]);
        b[3] = b[3].max(q[1]);
    }
    b
}

/// Union area of convex polygons in the plane: clusters of overlapping
/// bounding boxes are swept by vertical slabs free of edge crossings, inside
/// which the covered length is affine in `x`.
pub fn union_area_2d<T: Scalar>(polys: &[Vec<[T; 2]>]) -> T {
    let m = polys.len();
    if m == 0 {
        return T::zero();
    }
    let boxes: Vec<[T; 4]> = polys.iter().map(|p| bbox2(p)).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| boxes[*a][0].partial_cmp(&boxes[*b][0]).unwrap());
    // union-find over bounding boxes with overlapping interiors
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        active.retain(|j| boxes[*j][1] > boxes[i][0]);
        for &j in &active {
            if boxes[j][2] < boxes[i][3] && boxes[i][2] < boxes[j][3] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        active.push(i);
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        clusters.entry(r).or_default().push(i);
    }
    let mut total = T::zero();
    for (_, idx) in clusters {
        if idx.len() == 1 {
            total = total + signed_area(&polys[idx[0]]).abs();
        } else {
            let c: Vec<&Vec<[T; 2]>> = idx.iter().map(|i| &polys[*i]).collect();
            total = total + sweep_cluster(&c);
        }
    }
    total
}

fn sweep_cluster<T: Scalar>(polys: &[&Vec<[T; 2]>]) -> T {
    let mut xs: Vec<T> = polys.iter().flat_map(|p| p.iter().map(|q| q[0])).collect();
    let edges: Vec<Vec<([T; 2], [T; 2])>> = polys
        .iter()
        .map(|p| (0..p.len()).map(|i| (p[i], p[(i + 1) % p.len()])).collect())
        .collect();
    for a in 0..polys.len() {
        for b in a + 1..polys.len() {
            for &(p, q) in &edges[a] {
                for &(r, s) in &edges[b] {
                    if let Some(x) = seg_cross_x(p, q, r, s) {
                        xs.push(x);
                    }
                }
            }
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut total = T::zero();
    let half = lit::<T>(0.5);
    for w in xs.windows(2) {
        let width = w[1] - w[0];
        if width <= T::zero() {
            continue;
        }
        let xm = (w[0] + w[1]) * half;
        let mut iv: Vec<(T, T)> = Vec::new();
        for e in &edges {
            if let Some(v) = vertical_extent(e, xm) {
                iv.push(v);
            }
        }
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut len = T::zero();
        let mut cur: Option<(T, T)> = None;
        for (a, b) in iv {
            match cur {
                Some((lo, hi)) if a <= hi => cur = Some((lo, hi.max(b))),
                Some((lo, hi)) => {
                    len = len + (hi - lo);
                    cur = Some((a, b));
                }
                None => cur = Some((a, b)),
            }
        }
        if let Some((lo, hi)) = cur {
            len = len + (hi - lo);
        }
        total = total + len * width;
    }
    total
}

fn vertical_extent<T: Scalar>(edges: &[([T; 2], [T; 2])], x: T) -> Option<(T, T)> {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &(p, q) in edges {
        let (a, b) = if p[0] <= q[0] { (p, q) } else { (q, p) };
        if a[0] <= x && x <= b[0] && b[0] > a[0] {
            let t = (x - a[0]) / (b[0] - a[0]);
            let y = a[1] + (b[1] - a[1]) * t;
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// `x` coordinate of a proper crossing of two segments.
fn seg_cross_x<T: Scalar>(p: [T; 2], q: [T; 2], r: [T; 2], s: [T; 2]) -> Option<T> {
    let d1 = [q[0] - p[0], q[1] - p[1]];
    let d2 = [s[0] - r[0], s[1] - r[1]];
    let den = d1[0] * d2[1] - d1[1] * d2[0];
    if den == T::zero() {
        return None;
    }
    let w = [r[0] - p[0], r[1] - p[1]];
    let t = (w[0] * d2[1] - w[1] * d2[0]) / den;
    let u = (w[0] * d1[1] - w[1] * d1[0]) / den;
    if t >= T::zero() && t <= T::one() && u >= T::zero() && u <= T::one() {
        Some(p[0] + d1[0] * t)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::from_f64(&[x, y])
    }

    #[test]
    fn overlapping_collinear_segments() {
        let s = [(p(0.0, 0.0), p(2.0, 0.0)), (p(1.0, 0.0), p(3.0, 0.0)), (p(0.0, 1.0), p(0.0, 2.0))];
        assert!((union_length(&s, 2) - 4.0).abs() < 1e-12);
        // reversed orientation lands in the same group
        let s = [(p(0.0, 0.0), p(2.0, 2.0)), (p(3.0, 3.0), p(1.0, 1.0))];
        assert!((union_length(&s, 2) - 3.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn overlapping_squares() {
        let a: Polygon<f64> = smallvec![p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)];
        let b: Polygon<f64> = smallvec![p(1.0, 1.0), p(3.0, 1.0), p(3.0, 3.0), p(1.0, 3.0)];
        let c: Polygon<f64> = smallvec![p(10.0, 0.0), p(11.0, 0.0), p(10.0, 1.0)];
        assert!((union_area(&[a, b, c], 2) - 7.5).abs() < 1e-12);
    }

    #[test]
    fn rotated_overlap() {
        let a: Polygon<f64> = smallvec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let b: Polygon<f64> = smallvec![p(0.5, -0.2), p(1.2, 0.5), p(0.5, 1.2), p(-0.2, 0.5)];
        // the diamond sticks out of the square by four triangles of base 0.4, height 0.2
        assert!((union_area(&[a, b], 2) - 1.16).abs() < 1e-12);
    }

    #[test]
    fn planes_in_three_space() {
        let q = |x: f64, y: f64, z: f64| Point::from_f64(&[x, y, z]);
        let a: Polygon<f64> = smallvec![q(0.0, 0.0, 1.0), q(1.0, 0.0, 1.0), q(1.0, 1.0, 1.0), q(0.0, 1.0, 1.0)];
        let b: Polygon<f64> = smallvec![q(0.5, 0.0, 1.0), q(1.5, 0.0, 1.0), q(1.5, 1.0, 1.0), q(0.5, 1.0, 1.0)];
        let c: Polygon<f64> = smallvec![q(0.0, 0.0, 2.0), q(1.0, 0.0, 2.0), q(1.0, 1.0, 2.0)];
        assert!((union_area(&[a, b, c], 3) - 2.0).abs() < 1e-12);
    }
}
