use std::sync::Arc;

use rayon::prelude::*;

use crate::dyadic::{neighborhood_complexes, Domain};
use crate::error::{Error, Result};
use crate::geomset::{PolySet, Region, SetSequence};
use crate::report::{csv_row, fmt_num};
use crate::scalar::{lit, to_f64, Scalar};

/// `H^d(|S'^d_{m,t}|)` over a grid: row `i` is `ts[i]`, column `j` is `ms[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTable {
    pub ts: Vec<f64>,
    pub ms: Vec<i32>,
    pub values: Vec<Vec<f64>>,
}

impl ProbeTable {
    /// Each row is non-increasing as `m` grows.
    pub fn decreasing_in_m(&self) -> bool {
        self.values.iter().all(|row| row.windows(2).all(|w| w[1] <= w[0]))
    }

    /// Rows (by `t`) where the value increases somewhere along `m`.
    pub fn increasing_rows(&self) -> Vec<f64> {
        self.ts
            .iter()
            .zip(&self.values)
            .filter(|(_, row)| row.windows(2).any(|w| w[1] > w[0]))
            .map(|(t, _)| *t)
            .collect()
    }

    /// Value at (smallest `t`, largest `m`) over value at (largest `t`, smallest `m`).
    pub fn corner_ratio(&self) -> Option<f64> {
        let it_small = (0..self.ts.len()).min_by(|a, b| self.ts[*a].total_cmp(&self.ts[*b]))?;
        let it_large = (0..self.ts.len()).max_by(|a, b| self.ts[*a].total_cmp(&self.ts[*b]))?;
        let jm_large = (0..self.ms.len()).max_by_key(|j| self.ms[*j])?;
        let jm_small = (0..self.ms.len()).min_by_key(|j| self.ms[*j])?;
        let den = self.values[it_large][jm_small];
        if den <= 0.0 {
            return None;
        }
        Some(self.values[it_small][jm_large] / den)
    }

    /// CSV matrix: header `t,m=...`, one row per `t`.
    pub fn to_csv(&self) -> String {
        let mut head = vec!["t".to_string()];
        head.extend(self.ms.iter().map(|m| format!("m={m}")));
        let mut s = csv_row(&head);
        s.push('\n');
        for (t, row) in self.ts.iter().zip(&self.values) {
            let mut r = vec![fmt_num(*t)];
            r.extend(row.iter().map(|v| fmt_num(*v)));
            s.push_str(&csv_row(&r));
            s.push('\n');
        }
        s
    }
}

/// Measure of the weld skeleton `|S'^d_{m,t}|` around `E` near `∂D0` for
/// every pair `(t, m)`.
pub fn grid_vanishing_probe<T: Scalar>(e: &PolySet<T>, d0: &Arc<Domain>, ts: &[f64], ms: &[i32]) -> Result<ProbeTable> {
    if e.d >= e.n {
        return Err(Error::Precondition(format!("d must be < n, got d = {}, n = {}", e.d, e.n)));
    }
    if ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Precondition("shell widths must be positive".into()));
    }
    let cells: Vec<(usize, usize)> = (0..ts.len()).flat_map(|i| (0..ms.len()).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| {
            let nb = neighborhood_complexes(d0, e, ms[j], lit::<T>(ts[i]))?;
            Ok(to_f64(nb.s_prime_d.cell_measure::<T>(e.d)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let values = vals.chunks(ms.len().max(1)).map(|c| c.to_vec()).collect();
    Ok(ProbeTable { ts: ts.to_vec(), ms: ms.to_vec(), values })
}

/// Largest shell measure over the sequence, per shell half-width.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusProbe {
    pub ts: Vec<f64>,
    /// `sup_k H^d(E_k ∩ ((1+t)D0 \ (1-t)D0°))`.
    pub sup: Vec<f64>,
}

impl AnnulusProbe {
    /// The sup shrinks (weakly) as `t` decreases.
    pub fn shrinks(&self) -> bool {
        let mut pairs: Vec<(f64, f64)> = self.ts.iter().copied().zip(self.sup.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

pub fn annulus_probe<T: Scalar>(seq: &SetSequence<T>, d0: &Arc<Domain>, ts: &[f64]) -> Result<AnnulusProbe> {
    let mut sup = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Precondition(format!("shell half-width {t} must lie in (0, 1)")));
        }
        let shell = Region::shell(d0, lit::<T>(1.0 - t), lit::<T>(1.0 + t));
        let mut best = 0.0f64;
        for s in &seq.sets {
            best = best.max(to_f64(s.measure(&shell)?));
        }
        sup.push(best);
    }
    Ok(AnnulusProbe { ts: ts.to_vec(), sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn square() -> Arc<Domain> {
        Arc::new(Domain::from_boxes(2, 1, &[vec![1, 1]]).unwrap())
    }

    #[test]
    fn empty_set_gives_zeros() {
        let e = PolySet::<f64>::new(2, 1).unwrap();
        let p = grid_vanishing_probe(&e, &square(), &[0.1, 0.01], &[6, 7]).unwrap();
        assert!(p.values.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(p.corner_ratio(), None);
    }

    #[test]
    fn full_dimension_is_rejected() {
        let mut e = PolySet::<f64>::new(2, 2).unwrap();
        e.push(&[Point::from_f64(&[0.0, 0.0]), Point::from_f64(&[1.0, 0.0]), Point::from_f64(&[0.0, 1.0])]).unwrap();
        assert!(matches!(grid_vanishing_probe(&e, &square(), &[0.1], &[6]), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_crossing_matches_block_count() {
        // a horizontal segment through the side x = 0.5 at y = 0.1 + h/2: at a
        // coarse scale the shell piece sits in one column of cubes
        let m = 5;
        let h = 2f64.powi(-m);
        let y = 0.1 + h / 2.0;
        let e: PolySet<f64> = PolySet::from_segments(2, &[(Point::from_f64(&[0.4, y]), Point::from_f64(&[0.6, y]))]);
        let p = grid_vanishing_probe(&e, &square(), &[0.001], &[m]).unwrap();
        // core: the two cubes on either side of x = 0.5; dilated twice: a
        // 6 x 5 block, whose 1-skeleton has 6*6 + 7*5 unit edges
        assert_eq!(p.values[0][0], (6.0 * 6.0 + 7.0 * 5.0) * h);
    }
}
