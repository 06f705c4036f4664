//! Sparse column reduction over a prime field: Betti numbers and ranks of
//! inclusion-induced maps for complexes too large for the dense engine.

use std::collections::HashMap;

use super::chain::ChainComplexZ;
use crate::error::{Error, Result};

/// Prime used for rank computations (`2^31 - 1`).
pub const PRIME: u64 = 2_147_483_647;

type Col = Vec<(usize, u64)>;

fn inv(a: u64, p: u64) -> u64 {
    let (mut b, mut e, mut r) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn to_field(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

// a - f * b, both sorted by row.
fn axpy(a: &Col, f: u64, b: &Col, p: u64) -> Col {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, (p - f * b[j].1 % p) % p));
            j += 1;
        } else {
            let v = (a[i].1 + p - f * b[j].1 % p) % p;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Column echelon form keyed by the lowest nonzero row.
pub struct Echelon {
    p: u64,
    pivots: HashMap<usize, Col>,
}

impl Default for Echelon {
    fn default() -> Self {
        Self::new()
    }
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { p: PRIME, pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut col: Col) -> Col {
        let p = self.p;
        while let Some(&(low, v)) = col.last() {
            let Some(piv) = self.pivots.get(&low) else { break };
            let f = v * inv(piv.last().unwrap().1, p) % p;
            col = axpy(&col, f, piv, p);
        }
        col
    }

    /// Adds a column; `true` when it was independent of the stored ones.
    pub fn insert(&mut self, col: Col) -> bool {
        let col = self.reduce(col);
        match col.last() {
            Some(&(low, _)) => {
                self.pivots.insert(low, col);
                true
            }
            None => false,
        }
    }
}

fn column(cx: &ChainComplexZ, k: usize, j: usize, p: u64) -> Col {
    let mut c: Col = cx.column(k, j).into_iter().map(|(i, v)| (i, to_field(v, p))).filter(|x| x.1 != 0).collect();
    c.sort_unstable();
    c
}

/// Rank of `∂_k` over the prime field.
pub fn boundary_rank(cx: &ChainComplexZ, k: usize) -> usize {
    let mut e = Echelon::new();
    for j in 0..cx.count(k) {
        e.insert(column(cx, k, j, PRIME));
    }
    e.rank()
}

/// Betti number in degree `k` over the prime field (reduced when the
/// complex is augmented).
pub fn betti(cx: &ChainComplexZ, k: usize) -> usize {
    cx.count(k) - boundary_rank(cx, k) - boundary_rank(cx, k + 1)
}

/// Basis of the `k`-cycles over the prime field, as sparse chains.
pub fn cycle_basis(cx: &ChainComplexZ, k: usize) -> Vec<Col> {
    let p = PRIME;
    // Reduce columns while tracking the combination that produced each.
    let mut pivots: HashMap<usize, (Col, Col)> = HashMap::new();
    let mut cycles = Vec::new();
    for j in 0..cx.count(k) {
        let mut col = column(cx, k, j, p);
        let mut comb: Col = vec![(j, 1)];
        while let Some(&(low, v)) = col.last() {
            let Some((pc, pv)) = pivots.get(&low) else { break };
            let f = v * inv(pc.last().unwrap().1, p) % p;
            col = axpy(&col, f, pc, p);
            comb = axpy(&comb, f, pv, p);
        }
        match col.last() {
            Some(&(low, _)) => {
                pivots.insert(low, (col, comb));
            }
            None => cycles.push(comb),
        }
    }
    cycles
}

/// Rank of `H_k(sub) -> H_k(sup)` over the prime field; `sub` must be a
/// subcomplex of `sup` (cells matched by cube).
pub fn induced_rank(sub: &ChainComplexZ, sup: &ChainComplexZ, k: usize) -> Result<usize> {
    let map = sup.inclusion(sub, k)?;
    let mut e = Echelon::new();
    for j in 0..sup.count(k + 1) {
        e.insert(column(sup, k + 1, j, PRIME));
    }
    let base = e.rank();
    for z in cycle_basis(sub, k) {
        let mut col: Col = z.iter().map(|(i, v)| (map[*i], *v)).collect();
        col.sort_unstable();
        e.insert(col);
    }
    let r = e.rank() - base;
    if r > betti(sub, k) {
        return Err(Error::Check("induced rank exceeds source rank".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicComplex, DyadicCube};

    #[test]
    fn annulus_betti() {
        let tops = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| (i, j) != (1, 1))
            .map(|(i, j)| DyadicCube::top(0, &[i, j]));
        let k = DyadicComplex::from_top(tops).unwrap();
        let cx = ChainComplexZ::from_complex(&k).unwrap();
        assert_eq!(betti(&cx, 0), 1);
        assert_eq!(betti(&cx, 1), 1);
        assert_eq!(betti(&cx, 2), 0);
        assert_eq!(cycle_basis(&cx, 1).len(), cx.count(1) - boundary_rank(&cx, 1));
    }
}
