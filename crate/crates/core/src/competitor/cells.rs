use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::dyadic::{cubes_near, simplex_near_box, Domain, DyadicComplex, DyadicCube};
use crate::error::{Error, Result};
use crate::geom::Aabb;
use crate::geomset::PolySet;
use crate::homology::{cube_boundary, ChainComplexZ};
use crate::scalar::{lit, to_f64, Scalar};

/// Cells of `region` (every dimension) at distance more than `delta` from
/// the set. Faces of kept cells are kept too, so the result is a complex.
pub fn cell_complement<T: Scalar>(region: &DyadicComplex, set: &PolySet<T>, delta: T) -> Result<DyadicComplex> {
    let n = region.n;
    let m = region.scale;
    if !set.is_empty() && set.n != n {
        return Err(Error::Invalid(format!("set lives in R^{} but the region in R^{n}", set.n)));
    }
    if delta <= T::zero() {
        return Err(Error::Precondition("complement margin must be positive".into()));
    }
    let found: Vec<Vec<DyadicCube>> = set.simplices.par_iter().map(|s| cubes_near(s, n, m, delta)).collect();
    let mut near: HashMap<DyadicCube, Vec<usize>> = HashMap::new();
    for (i, tops) in found.into_iter().enumerate() {
        for c in tops {
            near.entry(c).or_default().push(i);
        }
    }
    let cells: Vec<DyadicCube> = region.iter().copied().collect();
    let keep: Vec<bool> = cells
        .par_iter()
        .map(|c| {
            let mut cand: Vec<usize> = c.star_top().iter().filter_map(|t| near.get(t)).flatten().copied().collect();
            if cand.is_empty() {
                return true;
            }
            cand.sort_unstable();
            cand.dedup();
            let bx = c.aabb::<T>();
            cand.iter().all(|&i| !simplex_near_box(&set.simplices[i], &bx, delta))
        })
        .collect();
    DyadicComplex::from_cells(n, m, cells.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c))
}

/// All cells of the box `[lo, hi]` at scale `m`; corners must lie on the lattice.
pub fn box_complex(n: usize, m: i32, lo: &[f64], hi: &[f64]) -> Result<DyadicComplex> {
    let s = 2f64.powi(m);
    let mut a = [0i64; 4];
    let mut b = [0i64; 4];
    for i in 0..n {
        let (x, y) = (lo[i] * s, hi[i] * s);
        if x.fract() != 0.0 || y.fract() != 0.0 || x >= y {
            return Err(Error::Precondition(format!("box side {i} is not a lattice interval at scale {m}")));
        }
        a[i] = x as i64;
        b[i] = y as i64;
    }
    let mut tops = Vec::new();
    let mut idx = a;
    'outer: loop {
        tops.push(DyadicCube::top(m, &idx[..n]));
        for i in 0..n {
            if idx[i] + 1 < b[i] {
                idx[i] += 1;
                continue 'outer;
            }
            idx[i] = a[i];
        }
        break;
    }
    DyadicComplex::from_top(tops)
}

/// All cells of the domain refined to scale `m`.
pub fn domain_complex(d0: &Domain, m: i32) -> Result<DyadicComplex> {
    if m < d0.m0 {
        return Err(Error::Precondition(format!("scale {m} is coarser than the domain scale {}", d0.m0)));
    }
    DyadicComplex::from_top(d0.cells().flat_map(|c| c.refine(m)))
}

/// Margin used for complements at scale `m`: just above the cube diameter.
pub fn default_margin(n: usize, m: i32) -> f64 {
    1.01 * (n as f64).sqrt() * 2f64.powi(-m)
}

/// Cube-keyed chain, the form in which chains move between complexes.
pub type CubeChain = BTreeMap<DyadicCube, i64>;

pub fn to_cube_chain(cx: &ChainComplexZ, k: usize, z: &[i64]) -> CubeChain {
    cx.cubes(k).iter().zip(z).filter(|(_, v)| **v != 0).map(|(c, v)| (*c, *v)).collect()
}

pub fn from_cube_chain(cx: &ChainComplexZ, k: usize, z: &CubeChain) -> Result<Vec<i64>> {
    let terms: Vec<(DyadicCube, i64)> = z.iter().map(|(c, v)| (*c, *v)).collect();
    cx.chain(k, &terms)
}

fn reduce(v: i64, q: i64) -> i64 {
    if q == 0 {
        v
    } else {
        v.rem_euclid(q)
    }
}

/// `a + f b` with coefficients taken mod `q` (`q = 0` for `Z`); zero terms dropped.
pub fn chain_axpy(a: &CubeChain, f: i64, b: &CubeChain, q: i64) -> Result<CubeChain> {
    let mut out = a.clone();
    for (c, v) in b {
        let e = out.entry(*c).or_insert(0);
        *e = reduce(e.checked_add(f.checked_mul(*v).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?, q);
    }
    out.retain(|_, v| *v != 0);
    for v in out.values_mut() {
        *v = reduce(*v, q);
    }
    Ok(out)
}

/// Boundary of a cube-keyed chain, independent of any complex. Degree-0
/// chains have the empty boundary.
pub fn chain_boundary(z: &CubeChain, q: i64) -> Result<CubeChain> {
    let mut out = CubeChain::new();
    for (c, v) in z {
        for (f, s) in cube_boundary(c) {
            let e = out.entry(f).or_insert(0);
            *e = reduce(e.checked_add(s * v).ok_or(Error::Overflow)?, q);
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Sum of coefficients (the augmentation of a 0-chain).
pub fn augmentation(z: &CubeChain, q: i64) -> i64 {
    z.values().fold(0, |a, v| reduce(a + v, q))
}

/// `true` when no cell of the chain touches the set.
pub fn chain_misses<T: Scalar>(z: &CubeChain, set: &PolySet<T>) -> bool {
    if z.is_empty() || set.is_empty() {
        return true;
    }
    let n = set.n;
    let boxes: Vec<Aabb<T>> = set.simplices.iter().map(|s| Aabb::of_points(n, s)).collect();
    z.keys().all(|c| {
        let bx = c.aabb::<T>();
        set.simplices
            .iter()
            .zip(&boxes)
            .filter(|(_, b)| b.intersects(&bx))
            .all(|(s, _)| !simplex_near_box(s, &bx, T::zero()))
    })
}

/// Smallest distance between the cells of a chain and a set.
pub fn chain_distance<T: Scalar>(z: &CubeChain, set: &PolySet<T>) -> f64 {
    let mut best = f64::INFINITY;
    for c in z.keys() {
        let bx = c.aabb::<T>();
        for s in &set.simplices {
            let d = match s.len() {
                1 => to_f64(bx.dist_point(&s[0])),
                2 => to_f64(crate::geom::dist_segment_box(&s[0], &s[1], &bx)),
                _ => to_f64(crate::geom::dist_triangle_box(&[s[0], s[1], s[2]], &bx)),
            };
            best = best.min(d);
        }
    }
    best
}

/// Cells of a complex whose closed cube lies in the closed dilate `rD`
/// (`inside = true`, decided on corners and center, exact for lattice
/// cells when `r = 1`) or misses the open dilate `rD°` (`inside = false`).
pub fn cells_by_domain(k: &DyadicComplex, d0: &Domain, r: f64, inside: bool) -> Vec<DyadicCube> {
    let r: f64 = lit(r);
    k.iter()
        .filter(|c| {
            let b = c.aabb::<f64>();
            let corners = corners(&b);
            if inside {
                corners.iter().all(|p| d0.contains_scaled(p, r)) && d0.contains_scaled(&b.center(), r)
            } else {
                // the scaled domain is a union of centered boxes, so a cell
                // misses the open dilate exactly when its closest point does
                let mut p = b.lo;
                for i in 0..b.n {
                    p[i] = if b.lo[i] > 0.0 {
                        b.lo[i]
                    } else if b.hi[i] < 0.0 {
                        b.hi[i]
                    } else {
                        0.0
                    };
                }
                !d0.contains_open_scaled(&p, r)
            }
        })
        .copied()
        .collect()
}

fn corners(b: &Aabb<f64>) -> Vec<crate::geom::Point<f64>> {
    let n = b.n;
    (0..1usize << n)
        .map(|code| {
            let mut p = b.lo;
            for i in 0..n {
                if code & (1 << i) != 0 {
                    p[i] = b.hi[i];
                }
            }
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::homology::{homology_group, FgAbelianGroup};

    fn seg(a: [f64; 2], b: [f64; 2]) -> PolySet<f64> {
        PolySet::from_segments(2, &[(Point::from_f64(&a), Point::from_f64(&b))])
    }

    #[test]
    fn spanning_segment_splits_box() {
        let r = box_complex(2, 4, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let e = seg([0.51, -0.1], [0.51, 1.1]);
        let c = cell_complement(&r, &e, default_margin(2, 4)).unwrap();
        let cx = ChainComplexZ::from_complex(&c).unwrap().reduced();
        let h = homology_group(&cx, 0, &FgAbelianGroup::integers()).unwrap();
        assert_eq!(h.free_rank(), 1);
        // cellwise: vertices on the column left of the segment survive
        assert!(c.cells(0).len() > 0);
        assert!(c.is_face_closed());
    }

    #[test]
    fn cellwise_keeps_more_than_topwise() {
        let r = box_complex(2, 3, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let e = seg([0.3, 0.3], [0.3, 0.3001]);
        let delta = default_margin(2, 3);
        let cw = cell_complement(&r, &e, delta).unwrap();
        let tw = crate::homology::complement_complex(&r, &e, 3, delta).unwrap();
        assert!(tw.is_subcomplex_of(&cw));
        for c in cw.iter() {
            assert!(to_f64(e.dist_to(&c.center())) > 0.0);
        }
    }

    #[test]
    fn boundary_of_path_is_endpoints() {
        let a = DyadicCube::new(0, &[0, 0], &[0]).unwrap();
        let b = DyadicCube::new(0, &[1, 0], &[0]).unwrap();
        let z: CubeChain = [(a, 1), (b, 1)].into_iter().collect();
        let bd = chain_boundary(&z, 0).unwrap();
        assert_eq!(bd.len(), 2);
        assert_eq!(augmentation(&bd, 0), 0);
    }

    #[test]
    fn domain_cells_split_by_dilate() {
        let d = Domain::from_boxes(2, 1, &[vec![1, 1]]).unwrap();
        let k = box_complex(2, 2, &[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let inside = cells_by_domain(&k, &d, 1.0, true);
        let outside = cells_by_domain(&k, &d, 1.0, false);
        // [-1/2, 1/2]^2 holds a 4 x 4 block of the 8 x 8 squares
        assert_eq!(inside.iter().filter(|c| c.dim() == 2).count(), 16);
        assert_eq!(outside.iter().filter(|c| c.dim() == 2).count(), 48);
        // the boundary square ring is in both families at the edge level
        assert!(inside.iter().any(|c| outside.contains(c)));
    }
}
