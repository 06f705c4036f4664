use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use super::{DyadicComplex, DyadicCube, Domain};
use crate::error::{Error, Result};
use crate::geom::{clip_polygon_box, clip_segment_box, dist_segment_box, dist_triangle_box, Aabb, Point};
use crate::geomset::{PolySet, Region, Simplex};
use crate::scalar::{dyadic_len, lit, to_f64, Scalar};

/// Closed top cubes of scale `m` meeting a simplex, found by descending
/// from a coarse cover so long simplices stay cheap.
pub fn cubes_meeting<T: Scalar>(s: &[Point<T>], n: usize, m: i32) -> Vec<DyadicCube> {
    cubes_near(s, n, m, T::zero())
}

/// Closed top cubes of scale `m` at distance at most `delta` from a simplex.
pub fn cubes_near<T: Scalar>(s: &[Point<T>], n: usize, m: i32, delta: T) -> Vec<DyadicCube> {
    let bx = Aabb::of_points(n, s).expand(delta);
    let extent = (0..n).map(|i| to_f64(bx.hi[i] - bx.lo[i])).fold(0.0, f64::max);
    let coarse = if extent > 0.0 { (-extent.log2()).floor() as i32 } else { m };
    let coarse = coarse.min(m);
    let inv = T::one() / dyadic_len::<T>(coarse);
    let lo: Vec<i64> = (0..n).map(|i| to_f64((bx.lo[i] * inv).floor()) as i64 - 1).collect();
    let hi: Vec<i64> = (0..n).map(|i| to_f64((bx.hi[i] * inv).floor()) as i64).collect();
    let mut stack = Vec::new();
    let mut idx = lo.clone();
    'outer: loop {
        stack.push(DyadicCube::top(coarse, &idx));
        for i in 0..n {
            if idx[i] < hi[i] {
                idx[i] += 1;
                continue 'outer;
            }
            idx[i] = lo[i];
        }
        break;
    }
    let mut out = Vec::new();
    while let Some(c) = stack.pop() {
        if !simplex_near_box(s, &c.aabb::<T>(), delta) {
            continue;
        }
        if c.scale == m {
            out.push(c);
        } else {
            stack.extend(c.refine(c.scale + 1).into_iter().filter(|k| k.dim() == n));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub(crate) fn simplex_near_box<T: Scalar>(s: &[Point<T>], bx: &Aabb<T>, delta: T) -> bool {
    if delta > T::zero() {
        let d = match s.len() {
            1 => bx.dist_point(&s[0]),
            2 => dist_segment_box(&s[0], &s[1], bx),
            _ => dist_triangle_box(&[s[0], s[1], s[2]], bx),
        };
        return d <= delta;
    }
    match s.len() {
        1 => bx.contains(&s[0]),
        2 => clip_segment_box(&s[0], &s[1], bx, false).is_some(),
        _ => !clip_polygon_box(s, bx, false).is_empty(),
    }
}

/// Complexes around `E` near `∂D0` at one scale.
#[derive(Clone, Debug)]
pub struct Neighborhoods {
    pub scale: i32,
    /// Top cubes meeting `E` in the closed shell.
    pub core: Vec<DyadicCube>,
    /// `Q`: the core cubes together with every cube touching one of them.
    pub q: Vec<DyadicCube>,
    /// `Q'`: one further adjacency layer.
    pub q_prime: Vec<DyadicCube>,
    pub s: DyadicComplex,
    pub s_prime: DyadicComplex,
    pub s_prime_d: DyadicComplex,
    /// `∂D0` at the domain scale; its support is the boundary at every finer scale.
    pub t: DyadicComplex,
    /// Cells of `S'` lying in `∂D0`.
    pub t_prime: DyadicComplex,
    pub t_prime_d: DyadicComplex,
    /// `E ∩ (1+3t/4)D0 \ (1-3t/4)D0°` lies in the interior of `|S|`.
    pub interior_ok: bool,
    pub warnings: Vec<String>,
}

/// Optional parameters that turn regime checks on.
#[derive(Clone, Copy, Debug, Default)]
pub struct RegimeCheck {
    pub m2: Option<i32>,
    pub eps1: Option<f64>,
}

pub fn neighborhood_complexes<T: Scalar>(
    d0: &Arc<Domain>,
    e: &PolySet<T>,
    m: i32,
    t: T,
) -> Result<Neighborhoods> {
    neighborhood_complexes_checked(d0, e, m, t, RegimeCheck::default())
}

pub fn neighborhood_complexes_checked<T: Scalar>(
    d0: &Arc<Domain>,
    e: &PolySet<T>,
    m: i32,
    t: T,
    regime: RegimeCheck,
) -> Result<Neighborhoods> {
    let n = d0.n;
    if e.n != n {
        return Err(Error::Invalid(format!("set lives in R^{} but the domain in R^{n}", e.n)));
    }
    if m < d0.m0 {
        return Err(Error::Precondition(format!("scale {m} is coarser than the domain scale {}", d0.m0)));
    }
    if let Some(m2) = regime.m2 {
        if m < d0.m0 + m2 {
            return Err(Error::Precondition(format!("scale {m} below m0 + m2 = {}", d0.m0 + m2)));
        }
    }
    let tf = to_f64(t);
    let mut warnings = Vec::new();
    if tf <= 0.0 {
        warnings.push(format!("t = {tf} is not positive"));
    }
    if let Some(eps1) = regime.eps1 {
        if tf >= 1e-2 * eps1 {
            warnings.push(format!("t = {tf} is not below 1e-2 * eps1 = {}", 1e-2 * eps1));
        }
    }
    if 2f64.powi(-m) >= tf * d0.side() {
        warnings.push(format!("cube side 2^-{m} is not below t * 2^-{}", d0.m0));
    }

    let one = T::one();
    let shell = Region::shell(d0, one - t, one + t);
    let pieces = e.pieces(&shell)?;
    let core = collect(&pieces, n, m);
    let q = dilate(&core);
    let q_prime = dilate(&q);

    let inner: Vec<Simplex<T>> = e.pieces(&Region::shell(d0, one - t * lit(0.75), one + t * lit(0.75)))?;
    let qset: BTreeSet<DyadicCube> = q.iter().copied().collect();
    let interior_ok = collect(&inner, n, m).iter().all(|c| qset.contains(c));

    let s = DyadicComplex::from_top(q.iter().copied())?;
    let s_prime = DyadicComplex::from_top(q_prime.iter().copied())?;
    let s_prime_d = s_prime.skeleton(e.d);
    let tb = d0.boundary_complex().clone();
    let t_prime = s_prime.filter(|c| c.dim() < n && tb.contains(&c.carrier(d0.m0)));
    let t_prime_d = t_prime.skeleton(e.d);
    Ok(Neighborhoods {
        scale: m,
        core,
        q,
        q_prime,
        s: normalize(s, n, m),
        s_prime: normalize(s_prime, n, m),
        s_prime_d: normalize(s_prime_d, n, m),
        t: tb,
        t_prime: normalize(t_prime, n, m),
        t_prime_d: normalize(t_prime_d, n, m),
        interior_ok,
        warnings,
    })
}

fn collect<T: Scalar>(pieces: &[Simplex<T>], n: usize, m: i32) -> Vec<DyadicCube> {
    let found: Vec<Vec<DyadicCube>> = pieces.par_iter().map(|p| cubes_meeting(p, n, m)).collect();
    let set: BTreeSet<DyadicCube> = found.into_iter().flatten().collect();
    set.into_iter().collect()
}

fn dilate(cubes: &[DyadicCube]) -> Vec<DyadicCube> {
    let mut set: BTreeSet<DyadicCube> = cubes.iter().copied().collect();
    for c in cubes {
        set.extend(c.neighbors());
    }
    set.into_iter().collect()
}

// Empty complexes come back from `from_top` without ambient data.
fn normalize(k: DyadicComplex, n: usize, m: i32) -> DyadicComplex {
    if k.is_empty() {
        DyadicComplex::empty(n, m)
    } else {
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Arc<Domain> {
        Arc::new(Domain::from_boxes(2, 1, &[vec![1, 1]]).unwrap())
    }

    fn seg(a: [f64; 2], b: [f64; 2]) -> PolySet<f64> {
        PolySet::from_segments(2, &[(Point::from_f64(&a), Point::from_f64(&b))])
    }

    #[test]
    fn far_set_gives_nothing() {
        let e = seg([-0.1, 0.0], [0.1, 0.0]);
        let nb = neighborhood_complexes(&square(), &e, 6, 0.05).unwrap();
        assert!(nb.q.is_empty() && nb.s_prime.is_empty() && nb.t_prime.is_empty());
        assert!(nb.interior_ok);
    }

    #[test]
    fn single_cube_block() {
        // A short segment inside one cube at scale 6, just left of x = 0.5.
        let h = 1.0 / 64.0;
        let e = seg([0.5 - 0.3 * h, 0.25 + 0.4 * h], [0.5 - 0.1 * h, 0.25 + 0.6 * h]);
        let nb = neighborhood_complexes(&square(), &e, 6, 0.05).unwrap();
        assert_eq!(nb.core.len(), 1);
        assert_eq!(nb.q.len(), 9);
        assert_eq!(nb.q_prime.len(), 25);
        assert!(nb.interior_ok);
        // The boundary x = 0.5 crosses the 5x5 block: five unit edges, six vertices.
        assert_eq!(nb.t_prime.cells(1).len(), 5);
        assert_eq!(nb.t_prime.cells(0).len(), 6);
    }

    #[test]
    fn monotone_in_t() {
        let e = seg([0.3, 0.1], [0.7, 0.2]);
        let a = neighborhood_complexes(&square(), &e, 7, 0.02).unwrap();
        let b = neighborhood_complexes(&square(), &e, 7, 0.08).unwrap();
        assert!(a.s.is_subcomplex_of(&b.s));
        assert!(a.q.len() < b.q.len());
    }

    #[test]
    fn carrier_detects_boundary() {
        let c = DyadicCube::new(4, &[8, 3], &[1]).unwrap();
        assert_eq!(c.carrier(1), DyadicCube::new(1, &[1, 0], &[1]).unwrap());
        let c = DyadicCube::new(4, &[7, 3], &[1]).unwrap();
        assert_eq!(c.carrier(1).dim(), 2);
    }
}
