use std::collections::BTreeSet;
use std::sync::Arc;

use smallvec::smallvec;

use crate::dyadic::Domain;
use crate::error::{Error, Result};
use crate::geom::{clip_polygon_box, clip_segment_box, fan_triangles, Aabb, Point, MAX_DIM};
use crate::geomset::{union_length, Placement, PolySet, Region, Simplex};
use crate::scalar::{lit, to_f64, Scalar};

/// `E ∩ ∂(rD)`: transversal pieces (points for curves, segments for
/// surfaces) and pieces lying inside the boundary itself.
#[derive(Clone, Debug)]
pub struct SliceTrace<T> {
    pub pieces: Vec<Simplex<T>>,
    pub overlaps: Vec<Simplex<T>>,
    /// Number of distinct points (`d = 1`) or total length (`d = 2`) of the
    /// transversal part.
    pub measure: T,
}

impl<T: Scalar> SliceTrace<T> {
    /// The set has positive `d`-measure inside the boundary.
    pub fn degenerate(&self) -> bool {
        self.overlaps.iter().any(|s| match s.len() {
            2 => s[0] != s[1],
            3 => crate::geom::triangle_area(&s[0], &s[1], &s[2]) > T::zero(),
            _ => false,
        })
    }
}

fn scaled_facets<T: Scalar>(d0: &Domain, r: T) -> Vec<(usize, Aabb<T>)> {
    let n = d0.n;
    d0.boundary_complex()
        .cells(n - 1)
        .into_iter()
        .map(|f| {
            let b = f.aabb::<T>();
            let a = f.flat_axes().next().expect("facet has a flat axis");
            (a, Aabb::new(n, b.lo * r, b.hi * r))
        })
        .collect()
}

fn within<T: Scalar>(p: &Point<T>, bx: &Aabb<T>, skip: usize) -> bool {
    let tol = bx.hi.max_abs().max(T::one()) * T::epsilon() * lit(64.0);
    (0..bx.n).filter(|i| *i != skip).all(|i| p[i] >= bx.lo[i] - tol && p[i] <= bx.hi[i] + tol)
}

/// Intersection of a polyhedral set with the boundary of the dilate `rD`,
/// computed facet by facet.
pub fn boundary_trace<T: Scalar>(set: &PolySet<T>, d0: &Arc<Domain>, r: T) -> Result<SliceTrace<T>> {
    if set.n != d0.n {
        return Err(Error::Invalid(format!("set lives in R^{} but the domain in R^{}", set.n, d0.n)));
    }
    if set.d == 0 || set.d > 2 {
        return Err(Error::Unsupported(format!("boundary slices of {}-dimensional sets", set.d)));
    }
    let n = set.n;
    let facets = scaled_facets(d0, r);
    let closed = Region::scaled(d0, r);
    let open = Region::scaled_open(d0, r);
    let mut pieces: Vec<Simplex<T>> = Vec::new();
    let mut overlaps: Vec<Simplex<T>> = Vec::new();
    for s in &set.simplices {
        let bx = Aabb::of_points(n, s);
        if open.classify(&bx) == Placement::Inside || closed.classify(&bx) == Placement::Outside {
            continue;
        }
        for (a, fb) in &facets {
            if !fb.intersects(&bx) {
                continue;
            }
            let c = fb.lo[*a];
            if s.len() == 2 {
                trace_segment(s[0], s[1], *a, c, fb, &mut pieces, &mut overlaps);
            } else {
                trace_triangle(s, *a, c, fb, &mut pieces, &mut overlaps);
            }
        }
    }
    let measure = if set.d == 1 {
        let keys: BTreeSet<[u64; MAX_DIM]> = pieces.iter().map(|p| p[0].bit_key()).collect();
        lit(keys.len() as f64)
    } else {
        let segs: Vec<(Point<T>, Point<T>)> = pieces.iter().map(|p| (p[0], p[1])).collect();
        union_length(&segs, n)
    };
    Ok(SliceTrace { pieces, overlaps, measure })
}

fn trace_segment<T: Scalar>(
    p: Point<T>,
    q: Point<T>,
    a: usize,
    c: T,
    fb: &Aabb<T>,
    pieces: &mut Vec<Simplex<T>>,
    overlaps: &mut Vec<Simplex<T>>,
) {
    if p[a] == c && q[a] == c {
        if let Some((t0, t1)) = clip_segment_box(&p, &q, fb, false) {
            let (u, v) = (p.lerp(&q, t0), p.lerp(&q, t1));
            if t1 > t0 {
                overlaps.push(smallvec![u, v]);
            } else {
                pieces.push(smallvec![u]);
            }
        }
        return;
    }
    if (p[a] - c) * (q[a] - c) > T::zero() {
        return;
    }
    let x = if p[a] == c {
        p
    } else if q[a] == c {
        q
    } else {
        let mut x = p.lerp(&q, (c - p[a]) / (q[a] - p[a]));
        x[a] = c;
        x
    };
    if within(&x, fb, a) {
        pieces.push(smallvec![x]);
    }
}

fn trace_triangle<T: Scalar>(
    s: &Simplex<T>,
    a: usize,
    c: T,
    fb: &Aabb<T>,
    pieces: &mut Vec<Simplex<T>>,
    overlaps: &mut Vec<Simplex<T>>,
) {
    if s.iter().all(|p| p[a] == c) {
        let poly = clip_polygon_box(s, fb, false);
        for t in fan_triangles(&poly, T::zero()) {
            overlaps.push(t.iter().copied().collect());
        }
        return;
    }
    let mut pts: Vec<Point<T>> = Vec::new();
    for i in 0..3 {
        let (p, q) = (s[i], s[(i + 1) % 3]);
        if p[a] == c {
            pts.push(p);
        }
        if (p[a] - c) * (q[a] - c) < T::zero() {
            let mut x = p.lerp(&q, (c - p[a]) / (q[a] - p[a]));
            x[a] = c;
            pts.push(x);
        }
    }
    pts.sort_by_key(|u| u.bit_key());
    pts.dedup();
    if pts.len() < 2 {
        return;
    }
    let (u, v) = (pts[0], pts[pts.len() - 1]);
    // an edge lying in the plane shows up as the segment itself
    if let Some((t0, t1)) = clip_segment_box(&u, &v, fb, false) {
        if t1 > t0 {
            pieces.push(smallvec![u.lerp(&v, t0), u.lerp(&v, t1)]);
        }
    }
}

/// Outcome of the slice search.
#[derive(Clone, Debug)]
pub struct SliceChoice {
    pub r0: f64,
    pub measure: f64,
    /// `(r, slice measure, degenerate)` for every sampled radius, in sampling order.
    pub table: Vec<(f64, f64, bool)>,
}

/// Picks `r0 ∈ (1 - eps1, 1 + eps1)` among `samples` evenly spaced radii (and
/// `r = 1`) minimizing the `(d-1)`-measure of `E ∩ ∂(rD)`; radii where `E`
/// has positive `d`-measure inside the boundary are rejected. Ties go to the
/// radius closest to 1.
pub fn select_slice<T: Scalar>(e: &PolySet<T>, d0: &Arc<Domain>, eps1: f64, samples: usize) -> Result<SliceChoice> {
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::Precondition(format!("eps1 = {eps1} must lie in (0, 1)")));
    }
    let mut radii = vec![1.0];
    for i in 0..samples {
        radii.push(1.0 - eps1 + 2.0 * eps1 * (i as f64 + 0.5) / samples as f64);
    }
    let mut table = Vec::with_capacity(radii.len());
    for &r in &radii {
        let tr = boundary_trace(e, d0, lit::<T>(r))?;
        table.push((r, to_f64(tr.measure), tr.degenerate()));
    }
    let best = table
        .iter()
        .filter(|row| !row.2)
        .min_by(|x, y| {
            x.1.partial_cmp(&y.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then((x.0 - 1.0).abs().partial_cmp(&(y.0 - 1.0).abs()).unwrap_or(std::cmp::Ordering::Equal))
        })
        .copied();
    match best {
        Some((r0, measure, _)) => Ok(SliceChoice { r0, measure, table }),
        None => Err(Error::Exhausted(format!(
            "all {} sampled slices carry positive measure of the set; sample more radii",
            table.len()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Arc<Domain> {
        Arc::new(Domain::from_boxes(2, 1, &[vec![1, 1]]).unwrap())
    }

    fn polygon(k: usize, r: f64, phase: f64) -> PolySet<f64> {
        let pts: Vec<Point<f64>> = (0..k)
            .map(|i| {
                let a = phase + std::f64::consts::TAU * i as f64 / k as f64;
                Point::from_f64(&[r * a.cos(), r * a.sin()])
            })
            .collect();
        let segs: Vec<_> = (0..k).map(|i| (pts[i], pts[(i + 1) % k])).collect();
        PolySet::from_segments(2, &segs)
    }

    #[test]
    fn far_set_has_empty_slices() {
        let e = polygon(8, 0.1, 0.0);
        let c = select_slice(&e, &square(), 0.1, 5).unwrap();
        assert!(c.table.iter().all(|row| row.1 == 0.0));
        assert_eq!(c.r0, 1.0);
    }

    #[test]
    fn circle_crossings_match_segment_oracle() {
        // radius 0.55 circle against the square of half-width 0.5 scaled by r
        let e = polygon(64, 0.55, 0.01);
        let d = square();
        for r in [0.99, 1.0, 1.01] {
            let tr = boundary_trace(&e, &d, r).unwrap();
            // oracle: intersect every chord with the four sides of the square
            let h = 0.5 * r;
            let mut pts: Vec<[u64; MAX_DIM]> = Vec::new();
            for s in &e.simplices {
                let (p, q) = (s[0], s[1]);
                for axis in 0..2 {
                    for side in [-h, h] {
                        let (a, b) = (p[axis] - side, q[axis] - side);
                        if a * b <= 0.0 && a != b {
                            let t = a / (a - b);
                            let mut x = p.lerp(&q, t);
                            x[axis] = side;
                            if x[1 - axis].abs() <= h {
                                pts.push(x.bit_key());
                            }
                        }
                    }
                }
            }
            pts.sort_unstable();
            pts.dedup();
            assert_eq!(tr.measure, pts.len() as f64, "r = {r}");
            assert!(tr.measure >= 8.0);
        }
    }

    #[test]
    fn boundary_edge_is_rejected() {
        let a = Point::from_f64(&[0.5, -0.2]);
        let b = Point::from_f64(&[0.5, 0.2]);
        let e = PolySet::from_segments(2, &[(a, b)]);
        let tr = boundary_trace(&e, &square(), 1.0).unwrap();
        assert!(tr.degenerate());
        let c = select_slice(&e, &square(), 0.1, 4).unwrap();
        assert_ne!(c.r0, 1.0);
        assert!(c.table[0].2);
    }
}
