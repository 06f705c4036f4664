//! Homology of one degree with coefficients in one cyclic group (`Z` or
//! `Z/q`), with explicit generators and a classifier for cycles.

use std::collections::VecDeque;

use super::chain::ChainComplexZ;
use super::snf::{ext_gcd, gcd, mul_add, smith_normal_form, IntMatrix, Snf};
use crate::error::{Error, Result};

/// Largest cell count per degree handled by the dense engine.
pub const DENSE_LIMIT: usize = 6000;

/// Result of classifying a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Class {
    /// Bounds: `∂ witness = z` (modulo the coefficient modulus).
    Zero { witness: Vec<i64> },
    /// Coordinates in the generator list (torsion coordinates reduced).
    NonZero { coords: Vec<i64> },
}

/// `H_k(X; Z)` (`modulus = 0`) or `H_k(X; Z/modulus)`.
#[derive(Clone, Debug)]
pub struct FactorHomology {
    pub modulus: i64,
    pub degree: usize,
    /// Order of each generator; `0` means infinite order.
    pub orders: Vec<i64>,
    pub generators: Vec<Vec<i64>>,
    basis: Basis,
}

#[derive(Clone, Debug)]
enum Basis {
    Dense(Box<Dense>),
    Components(Components),
}

#[derive(Clone, Debug)]
struct Dense {
    a: Snf,
    b: Snf,
    x: Snf,
    /// Scale of each cycle basis vector (modular case), empty over `Z`.
    s: Vec<i64>,
    /// Indices (in `x`) of the reported generators.
    picked: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Components {
    label: Vec<usize>,
    roots: Vec<usize>,
    /// Tree edge to the parent: `(edge, sign of the vertex in ∂edge, parent)`.
    parent: Vec<Option<(usize, i64, usize)>>,
    order: Vec<usize>,
}

fn reduce(v: i64, q: i64) -> i64 {
    if q == 0 {
        v
    } else {
        v.rem_euclid(q)
    }
}

fn reduce_all(z: &mut [i64], q: i64) {
    if q != 0 {
        for v in z {
            *v = v.rem_euclid(q);
        }
    }
}

impl FactorHomology {
    pub fn compute(cx: &ChainComplexZ, k: usize, modulus: i64) -> Result<Self> {
        if modulus < 0 || modulus == 1 {
            return Err(Error::Invalid(format!("coefficient modulus {modulus} is not 0 or at least 2")));
        }
        if k == 0 && simple_edges(cx) {
            return Ok(Self::components(cx, modulus));
        }
        Self::dense(cx, k, modulus)
    }

    /// Number of infinite-order generators.
    pub fn free_rank(&self) -> usize {
        self.orders.iter().filter(|o| **o == 0).count()
    }

    pub fn torsion(&self) -> Vec<i64> {
        self.orders.iter().copied().filter(|o| *o != 0).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    fn components(cx: &ChainComplexZ, q: i64) -> Self {
        let nv = cx.count(0);
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
        for e in 0..cx.count(1) {
            let col = cx.column(1, e);
            if col.len() == 2 {
                adj[col[0].0].push((col[1].0, e));
                adj[col[1].0].push((col[0].0, e));
            }
        }
        let mut label = vec![usize::MAX; nv];
        let mut parent = vec![None; nv];
        let mut roots = Vec::new();
        let mut order = Vec::with_capacity(nv);
        for r in 0..nv {
            if label[r] != usize::MAX {
                continue;
            }
            let id = roots.len();
            roots.push(r);
            label[r] = id;
            let mut queue = VecDeque::from([r]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &(w, e) in &adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        let sign = cx.column(1, e).iter().find(|(i, _)| *i == w).map_or(1, |p| p.1);
                        parent[w] = Some((e, sign, v));
                        queue.push_back(w);
                    }
                }
            }
        }
        let (orders, generators): (Vec<i64>, Vec<Vec<i64>>) = if cx.augmented {
            roots
                .iter()
                .skip(1)
                .map(|&r| {
                    let mut g = vec![0i64; nv];
                    g[r] = 1;
                    g[roots[0]] = reduce(-1, q);
                    (q, g)
                })
                .unzip()
        } else {
            roots
                .iter()
                .map(|&r| {
                    let mut g = vec![0i64; nv];
                    g[r] = 1;
                    (q, g)
                })
                .unzip()
        };
        FactorHomology {
            modulus: q,
            degree: 0,
            orders,
            generators,
            basis: Basis::Components(Components { label, roots, parent, order }),
        }
    }

    fn dense(cx: &ChainComplexZ, k: usize, q: i64) -> Result<Self> {
        let n = cx.count(k);
        if n > DENSE_LIMIT || cx.count(k + 1) > DENSE_LIMIT {
            return Err(Error::Unsupported(format!(
                "degree {k} homology with {n} cells exceeds the dense limit {DENSE_LIMIT}"
            )));
        }
        let a = smith_normal_form(&cx.boundary_matrix(k))?;
        let b = smith_normal_form(&cx.boundary_matrix(k + 1))?;
        let (ra, rb) = (a.rank(), b.rank());
        let (x, s) = if q == 0 {
            let bb = cx.boundary_matrix(k + 1).mul(&b.v.cols_range(0, rb))?;
            let y = a.v_inv.mul(&bb)?;
            if !y.rows_range(0, ra).is_zero() {
                return Err(Error::Check("boundaries are not cycles".into()));
            }
            (y.rows_range(ra, n), Vec::new())
        } else {
            let s: Vec<i64> = (0..n).map(|i| if i < ra { q / gcd(a.diag[i], q) } else { 1 }).collect();
            let t: Vec<i64> = (0..n).map(|i| if i < rb { gcd(b.diag[i], q) } else { q }).collect();
            let mut m = a.v_inv.mul(&b.u_inv)?;
            for i in 0..n {
                for j in 0..n {
                    let v = m.get(i, j).checked_mul(t[j]).ok_or(Error::Overflow)?;
                    if v % s[i] != 0 {
                        return Err(Error::Check("boundary lattice not inside cycle lattice".into()));
                    }
                    m.set(i, j, v / s[i]);
                }
            }
            (m, s)
        };
        let xs = smith_normal_form(&x)?;
        let rho = xs.rank();
        let mut picked = Vec::new();
        let mut orders = Vec::new();
        for i in 0..x.rows {
            let f = if i < rho { xs.diag[i] } else { 0 };
            if f != 1 {
                picked.push(i);
                orders.push(f);
            }
        }
        let mut generators = Vec::with_capacity(picked.len());
        for &i in &picked {
            let coords = xs.u_inv.col(i);
            let mut g = cycle_from_coords(&a, &s, ra, q, &coords)?;
            reduce_all(&mut g, q);
            generators.push(g);
        }
        Ok(FactorHomology {
            modulus: q,
            degree: k,
            orders,
            generators,
            basis: Basis::Dense(Box::new(Dense { a, b, x: xs, s, picked })),
        })
    }

    /// Class of the cycle `z`; `Error::NotACycle` when `∂z ≠ 0`.
    pub fn classify(&self, cx: &ChainComplexZ, z: &[i64]) -> Result<Class> {
        let q = self.modulus;
        let mut bz = cx.boundary(self.degree, z)?;
        reduce_all(&mut bz, q);
        if bz.iter().any(|v| *v != 0) {
            return Err(Error::NotACycle);
        }
        let mut z = z.to_vec();
        reduce_all(&mut z, q);
        let class = match &self.basis {
            Basis::Components(c) => self.classify_components(cx, c, &z)?,
            Basis::Dense(d) => self.classify_dense(cx, d, &z)?,
        };
        if let Class::Zero { witness } = &class {
            let mut b = cx.boundary(self.degree + 1, witness)?;
            reduce_all(&mut b, q);
            if b != z {
                return Err(Error::Check("witness boundary differs from the cycle".into()));
            }
        }
        Ok(class)
    }

    fn classify_components(&self, cx: &ChainComplexZ, c: &Components, z: &[i64]) -> Result<Class> {
        let q = self.modulus;
        let mut sums = vec![0i64; c.roots.len()];
        for (v, coef) in z.iter().enumerate() {
            sums[c.label[v]] = reduce(sums[c.label[v]] + coef, q);
        }
        if sums.iter().any(|s| *s != 0) {
            let coords = if cx.augmented { sums[1..].to_vec() } else { sums };
            return Ok(Class::NonZero { coords });
        }
        let mut sub: Vec<i64> = z.to_vec();
        let mut w = vec![0i64; cx.count(1)];
        for &v in c.order.iter().rev() {
            if let Some((e, sign, p)) = c.parent[v] {
                let s = sub[v];
                if s != 0 {
                    w[e] = reduce(s * sign, q);
                    sub[p] = reduce(sub[p] + s, q);
                }
            }
        }
        Ok(Class::Zero { witness: w })
    }

    fn classify_dense(&self, cx: &ChainComplexZ, d: &Dense, z: &[i64]) -> Result<Class> {
        let q = self.modulus;
        let ra = d.a.rank();
        let rb = d.b.rank();
        let y0 = d.a.v_inv.mul_vec(z)?;
        let y: Vec<i64> = if q == 0 {
            y0[ra..].to_vec()
        } else {
            y0.iter().zip(&d.s).map(|(v, s)| v / s).collect()
        };
        let h = d.x.u.mul_vec(&y)?;
        let rho = d.x.rank();
        let zero = h.iter().enumerate().all(|(i, v)| if i < rho { v % d.x.diag[i] == 0 } else { *v == 0 });
        if !zero {
            let coords = d
                .picked
                .iter()
                .zip(&self.orders)
                .map(|(&i, &o)| if o == 0 { h[i] } else { h[i].rem_euclid(o) })
                .collect();
            return Ok(Class::NonZero { coords });
        }
        let mut u = vec![0i64; d.x.cols];
        for i in 0..rho {
            u[i] = h[i] / d.x.diag[i];
        }
        let v = d.x.v.mul_vec(&u)?;
        let nk1 = cx.count(self.degree + 1);
        let mut w = vec![0i64; nk1];
        for (i, vi) in v.iter().enumerate().take(rb) {
            let coef = if q == 0 {
                *vi
            } else {
                let (_, a, _) = ext_gcd(d.b.diag[i], q);
                vi.rem_euclid(q) * a.rem_euclid(q) % q
            };
            if coef == 0 {
                continue;
            }
            for (r, wr) in w.iter_mut().enumerate() {
                let bv = d.b.v.get(r, i);
                if bv != 0 {
                    *wr = reduce(mul_add(*wr, coef, bv)?, q);
                }
            }
        }
        Ok(Class::Zero { witness: w })
    }
}

fn cycle_from_coords(a: &Snf, s: &[i64], ra: usize, q: i64, coords: &[i64]) -> Result<Vec<i64>> {
    let n = a.cols;
    let mut full = vec![0i64; n];
    if q == 0 {
        full[ra..].copy_from_slice(coords);
    } else {
        for i in 0..n {
            full[i] = coords[i].checked_mul(s[i]).ok_or(Error::Overflow)?;
        }
    }
    a.v.mul_vec(&full)
}

// Degree-0 shortcut applies when every edge has boundary `±(v - u)`.
fn simple_edges(cx: &ChainComplexZ) -> bool {
    (0..cx.count(1)).all(|e| {
        let col = cx.column(1, e);
        col.len() == 2 && col[0].1 == -col[1].1 && col[0].1.abs() == 1
    })
}

/// Matrix of generator images: column `j` holds the coordinates in `target`
/// of the `j`-th generator of `source`, pushed through `map`.
pub fn induced_matrix(
    source: &FactorHomology,
    target: &FactorHomology,
    target_cx: &ChainComplexZ,
    map: &[usize],
) -> Result<IntMatrix> {
    let mut m = IntMatrix::zeros(target.orders.len(), source.generators.len());
    for (j, g) in source.generators.iter().enumerate() {
        let mut z = vec![0i64; target_cx.count(source.degree)];
        for (i, v) in g.iter().enumerate() {
            z[map[i]] += v;
        }
        match target.classify(target_cx, &z)? {
            Class::Zero { .. } => {}
            Class::NonZero { coords } => {
                for (i, c) in coords.iter().enumerate() {
                    m.set(i, j, *c);
                }
            }
        }
    }
    Ok(m)
}
