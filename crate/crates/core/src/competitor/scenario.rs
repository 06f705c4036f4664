//! Shipped planar scenarios: a circle with radial spokes against the
//! inscribed square with the same spokes, and the pairs used to exercise the
//! competitor checker.

use std::f64::consts::{PI, TAU};

use super::params::GlueParams;
use crate::error::Result;
use crate::geom::Point;
use crate::geomset::{PolySet, SetSequence};

/// Vertex count of the polygonal circle.
pub const POLY_SIDES: usize = 256;
pub const RADIUS: f64 = 0.5;
/// Angle of the spoke attached to the circle (a polygon vertex).
pub const ATTACHED_ANGLE: f64 = 3.0 * TAU / POLY_SIDES as f64;
/// Angle of the dangling spoke, generic with respect to the polygon.
pub const DANGLING_ANGLE: f64 = PI + 5.0 * TAU / POLY_SIDES as f64;
/// Inner radius of the dangling spoke.
pub const DANGLING_START: f64 = 0.7;

fn pt(r: f64, a: f64) -> Point<f64> {
    Point::from_f64(&[r * a.cos(), r * a.sin()])
}

/// Point on the ray of angle `a` where it leaves `[-1, 1]^2`.
fn exit_point(a: f64) -> Point<f64> {
    let (c, s) = (a.cos(), a.sin());
    let r = 1.0 / c.abs().max(s.abs());
    let mut p = Point::from_f64(&[r * c, r * s]);
    // snap the coordinate lying on the box side
    if c.abs() >= s.abs() {
        p[0] = c.signum();
    } else {
        p[1] = s.signum();
    }
    p
}

/// Vertices of the regular polygon with `k` sides, radius `r` and phase 0.
pub fn polygon_vertices(k: usize, r: f64) -> Vec<Point<f64>> {
    (0..k).map(|i| pt(r, TAU * i as f64 / k as f64)).collect()
}

/// Closed polygon through the given vertices, with `skip` edges left out
/// starting at edge `from`.
pub fn polygon(vertices: &[Point<f64>], from: usize, skip: usize) -> PolySet<f64> {
    let k = vertices.len();
    let segs: Vec<_> = (0..k)
        .filter(|i| (i + k - from) % k >= skip)
        .map(|i| (vertices[i], vertices[(i + 1) % k]))
        .collect();
    PolySet::from_segments(2, &segs)
}

pub fn circle() -> PolySet<f64> {
    polygon(&polygon_vertices(POLY_SIDES, RADIUS), 0, 0)
}

/// Square with vertices `(±r, 0)`, `(0, ±r)`.
pub fn square() -> PolySet<f64> {
    polygon(&polygon_vertices(4, RADIUS), 0, 0)
}

fn spoke(from: Point<f64>, a: f64) -> (Point<f64>, Point<f64>) {
    (from, exit_point(a))
}

/// Circle with a spoke attached at a vertex and a dangling spoke, both
/// running out to the boundary of `[-1, 1]^2`.
pub fn glue_limit() -> PolySet<f64> {
    let v = polygon_vertices(POLY_SIDES, RADIUS);
    let mut e = polygon(&v, 0, 0);
    let attached = spoke(v[3], ATTACHED_ANGLE);
    let dangling = spoke(pt(DANGLING_START, DANGLING_ANGLE), DANGLING_ANGLE);
    e.extend(&PolySet::from_segments(2, &[attached, dangling])).expect("same dimensions");
    e
}

/// The square with the same two spokes; its attached spoke now dangles.
pub fn glue_replacement() -> PolySet<f64> {
    let v = polygon_vertices(POLY_SIDES, RADIUS);
    let mut f = square();
    let attached = spoke(v[3], ATTACHED_ANGLE);
    let dangling = spoke(pt(DANGLING_START, DANGLING_ANGLE), DANGLING_ANGLE);
    f.extend(&PolySet::from_segments(2, &[attached, dangling])).expect("same dimensions");
    f
}

/// `E_k`: the limit set rotated by `1/k`.
pub fn glue_sequence(ks: &[u64]) -> Result<SetSequence<f64>> {
    let e = glue_limit();
    let sets = ks.iter().map(|k| e.rotate2(1.0 / *k as f64)).collect();
    SetSequence::new(ks.to_vec(), sets)
}

/// Parameters of the shipped gluing run.
pub fn glue_params() -> GlueParams {
    GlueParams {
        r1: 0.52,
        r2: 0.95,
        m0: 8,
        m2: 7,
        m3: 26,
        eps1: 0.015,
        eps2: 1.0 / 128.0,
        t1: 1e-4,
        tau: 5e-6,
        ks: (0..10).map(|i| 10u64.pow(i)).collect(),
        slice_samples: 16,
        cert_scale: None,
        seed: 7,
        tol: 1e-9,
    }
}

/// Circle with `skip` consecutive edges deleted starting at edge 0, and the
/// center and radius of a ball holding the gap.
pub fn arc_deleted_circle(skip: usize) -> (PolySet<f64>, Point<f64>, f64) {
    let v = polygon_vertices(POLY_SIDES, RADIUS);
    let f = polygon(&v, 0, skip);
    let mid = pt(RADIUS, TAU * skip as f64 / (2 * POLY_SIDES) as f64);
    let half = v[0].dist(&v[skip]) / 2.0;
    (f, mid, half + 0.05)
}

/// Circle with two spokes attached at opposite vertices, against the square
/// whose spokes reach in to its sides. Both pairs agree outside `B(0, 0.51)`
/// and separate the upper half of `[-1, 1]^2 \ B` from the lower half.
pub fn two_spoke_pair() -> (PolySet<f64>, PolySet<f64>) {
    let v = polygon_vertices(POLY_SIDES, RADIUS);
    let (i, j) = (3, 3 + POLY_SIDES / 2);
    let angles = [TAU * i as f64 / POLY_SIDES as f64, TAU * j as f64 / POLY_SIDES as f64];
    let mut e = polygon(&v, 0, 0);
    let mut f = square();
    for (idx, a) in [i, j].into_iter().zip(angles) {
        let outer = spoke(v[idx], a);
        e.extend(&PolySet::from_segments(2, &[outer])).expect("same dimensions");
        // the ray meets the square side |x| + |y| = r at this radius
        let rs = RADIUS / (a.cos().abs() + a.sin().abs());
        f.extend(&PolySet::from_segments(2, &[(pt(rs, a), v[idx]), outer])).expect("same dimensions");
    }
    (e, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomset::Region;

    #[test]
    fn lengths_match_closed_forms() {
        let n = POLY_SIDES as f64;
        let per = n * 2.0 * RADIUS * (PI / n).sin();
        assert!((circle().total_measure() - per).abs() < 1e-12);
        assert!((square().total_measure() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn limit_and_replacement_agree_outside_b1() {
        let (e, f) = (glue_limit(), glue_replacement());
        let w = Region::open_ball(Point::zero(), 0.52).not();
        let cmp = super::super::compare_in_window(&e, &f, &w, 0.0).unwrap();
        assert!(cmp.exact);
    }

    #[test]
    fn spokes_end_on_the_box() {
        for a in [ATTACHED_ANGLE, DANGLING_ANGLE] {
            let p = exit_point(a);
            assert!(p[0].abs() == 1.0 || p[1].abs() == 1.0);
        }
    }
}
