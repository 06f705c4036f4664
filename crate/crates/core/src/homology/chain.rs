use std::collections::HashMap;
use std::fmt::Write as _;

use super::snf::{parse_err, IntMatrix};
use crate::dyadic::{DyadicComplex, DyadicCube};
use crate::error::{Error, Result};

/// Sparse column: `(row, coefficient)` pairs.
pub type SparseCol = Vec<(usize, i64)>;

/// Integer chain complex with cells listed per degree.
///
/// When built from a cubical complex every cell carries its cube; abstract
/// complexes (read from text) have no cube labels. With `augmented` set the
/// degree-0 boundary is the augmentation, so homology comes out reduced.
#[derive(Clone, Debug)]
pub struct ChainComplexZ {
    counts: Vec<usize>,
    cubes: Vec<Vec<DyadicCube>>,
    index: HashMap<DyadicCube, usize>,
    bd: Vec<Vec<SparseCol>>,
    pub augmented: bool,
}

/// Boundary of an oriented cube: facets with alternating signs, axes taken in
/// increasing order.
pub fn cube_boundary(c: &DyadicCube) -> Vec<(DyadicCube, i64)> {
    let mut out = Vec::with_capacity(2 * c.dim());
    for (j, a) in c.axes().enumerate() {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let mut lo = *c;
        lo.axes &= !(1 << a);
        let mut hi = lo;
        hi.corner[a] += 1;
        out.push((lo, -sign));
        out.push((hi, sign));
    }
    out
}

impl ChainComplexZ {
    pub fn from_complex(k: &DyadicComplex) -> Result<Self> {
        let top = k.dim().unwrap_or(0);
        let mut cubes: Vec<Vec<DyadicCube>> = vec![Vec::new(); top + 1];
        for c in k.iter() {
            cubes[c.dim()].push(*c);
        }
        let mut index = HashMap::with_capacity(k.len());
        for list in &cubes {
            for (i, c) in list.iter().enumerate() {
                index.insert(*c, i);
            }
        }
        let mut bd: Vec<Vec<SparseCol>> = vec![Vec::new(); top + 1];
        for d in 1..=top {
            let mut cols = Vec::with_capacity(cubes[d].len());
            for c in &cubes[d] {
                let mut col = SparseCol::with_capacity(2 * d);
                for (f, s) in cube_boundary(c) {
                    let Some(&i) = index.get(&f) else {
                        return Err(Error::Invalid(format!("complex is not face-closed at {}", c.id())));
                    };
                    col.push((i, s));
                }
                col.sort_unstable();
                cols.push(col);
            }
            bd[d] = cols;
        }
        bd[0] = vec![Vec::new(); cubes[0].len()];
        let counts = cubes.iter().map(|v| v.len()).collect();
        Ok(ChainComplexZ { counts, cubes, index, bd, augmented: false })
    }

    /// Abstract complex from boundary columns: `columns[k][j]` is the boundary
    /// of the `j`-th cell of degree `k` (ignored for `k = 0`).
    pub fn from_columns(counts: Vec<usize>, mut columns: Vec<Vec<SparseCol>>) -> Result<Self> {
        if columns.len() != counts.len() {
            return Err(Error::Invalid("one column list per degree expected".into()));
        }
        for k in 0..counts.len() {
            if k == 0 {
                columns[0] = vec![Vec::new(); counts[0]];
                continue;
            }
            if columns[k].len() != counts[k] {
                return Err(Error::Invalid(format!("degree {k}: column count mismatch")));
            }
            for col in &mut columns[k] {
                if col.iter().any(|(r, _)| *r >= counts[k - 1]) {
                    return Err(Error::Invalid(format!("degree {k}: row index out of range")));
                }
                col.retain(|(_, v)| *v != 0);
                col.sort_unstable();
            }
        }
        let cx = ChainComplexZ {
            cubes: vec![Vec::new(); counts.len()],
            counts,
            index: HashMap::new(),
            bd: columns,
            augmented: false,
        };
        cx.verify()?;
        Ok(cx)
    }

    pub fn reduced(mut self) -> Self {
        self.augmented = true;
        self
    }

    pub fn top(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// Number of cells in degree `k` (zero outside the range).
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn cubes(&self, k: usize) -> &[DyadicCube] {
        self.cubes.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, c: &DyadicCube) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Boundary column of cell `j` in degree `k` (sparse).
    pub fn column(&self, k: usize, j: usize) -> SparseCol {
        if k == 0 {
            return if self.augmented { vec![(0, 1)] } else { Vec::new() };
        }
        self.bd[k][j].clone()
    }

    /// Dense matrix of `∂_k : C_k -> C_{k-1}`.
    pub fn boundary_matrix(&self, k: usize) -> IntMatrix {
        let rows = if k == 0 { usize::from(self.augmented) } else { self.count(k - 1) };
        let cols = self.count(k);
        let mut m = IntMatrix::zeros(rows, cols);
        for j in 0..cols {
            for (i, v) in self.column(k, j) {
                m.set(i, j, v);
            }
        }
        m
    }

    /// `∂_k z` for a chain given by coefficients.
    pub fn boundary(&self, k: usize, z: &[i64]) -> Result<Vec<i64>> {
        if z.len() != self.count(k) {
            return Err(Error::Invalid(format!("chain length {} but {} cells in degree {k}", z.len(), self.count(k))));
        }
        let rows = if k == 0 { usize::from(self.augmented) } else { self.count(k - 1) };
        let mut out = vec![0i64; rows];
        for (j, c) in z.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            for (i, v) in self.column(k, j) {
                out[i] = super::snf::mul_add(out[i], *c, v)?;
            }
        }
        Ok(out)
    }

    /// Checks `∂∂ = 0` in every degree.
    pub fn verify(&self) -> Result<()> {
        for k in 1..=self.top() {
            for j in 0..self.count(k) {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for (f, a) in self.column(k, j) {
                    for (g, b) in self.column(k - 1, f) {
                        *acc.entry(g).or_default() += a * b;
                    }
                }
                if acc.values().any(|v| *v != 0) {
                    return Err(Error::Check(format!("boundary of boundary nonzero at degree {k}, cell {j}")));
                }
            }
        }
        Ok(())
    }

    /// Chain from weighted cubes of one degree.
    pub fn chain(&self, k: usize, terms: &[(DyadicCube, i64)]) -> Result<Vec<i64>> {
        let mut z = vec![0i64; self.count(k)];
        for (c, v) in terms {
            if c.dim() != k {
                return Err(Error::Invalid(format!("cube {} is not of degree {k}", c.id())));
            }
            let i = self.index_of(c).ok_or_else(|| Error::Invalid(format!("cube {} not in complex", c.id())))?;
            z[i] += v;
        }
        Ok(z)
    }

    /// Positions in `self` of the degree-`k` cells of `sub`.
    pub fn inclusion(&self, sub: &ChainComplexZ, k: usize) -> Result<Vec<usize>> {
        sub.cubes(k)
            .iter()
            .map(|c| {
                self.index_of(c)
                    .ok_or_else(|| Error::Invalid(format!("cell {} of the subcomplex is missing", c.id())))
            })
            .collect()
    }

    /// Text form: a `chaincomplex` header with the cell counts, then each
    /// boundary matrix in degree order.
    pub fn to_text(&self) -> String {
        let counts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        let mut s = format!("chaincomplex {} {}\n", u8::from(self.augmented), counts.join(" "));
        for k in 1..=self.top() {
            let _ = writeln!(s, "boundary {k}");
            s.push_str(&self.boundary_matrix(k).to_text());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let head = lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
        let mut toks = head.split_whitespace();
        if toks.next() != Some("chaincomplex") {
            return Err(parse_err(1, "expected `chaincomplex`"));
        }
        let nums: Vec<usize> = toks
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(1, e))?;
        if nums.is_empty() {
            return Err(parse_err(1, "missing augmentation flag"));
        }
        let augmented = nums[0] == 1;
        let counts = nums[1..].to_vec();
        let mut columns: Vec<Vec<SparseCol>> = vec![Vec::new(); counts.len()];
        let mut pos = 1;
        for (k, cols) in columns.iter_mut().enumerate().skip(1) {
            if lines.get(pos).map(|l| l.trim()) != Some(&format!("boundary {k}")) {
                return Err(parse_err(pos + 1, format!("expected `boundary {k}`")));
            }
            let rows = counts[k - 1];
            let block = lines[pos + 1..].iter().take(rows + 1).copied().collect::<Vec<_>>().join("\n");
            let m = IntMatrix::from_text(&block).map_err(|e| parse_err(pos + 2, e))?;
            if m.rows != rows || m.cols != counts[k] {
                return Err(parse_err(pos + 2, format!("boundary {k} has the wrong shape")));
            }
            *cols = (0..m.cols)
                .map(|j| (0..m.rows).filter(|&i| m.get(i, j) != 0).map(|i| (i, m.get(i, j))).collect())
                .collect();
            pos += rows + 2;
        }
        let mut cx = Self::from_columns(counts, columns)?;
        cx.augmented = augmented;
        Ok(cx)
    }
}

/// Text form of a chain: `chain k len` then the coefficients on one line.
pub fn chain_to_text(k: usize, z: &[i64]) -> String {
    let body: Vec<String> = z.iter().map(|v| v.to_string()).collect();
    format!("chain {k} {}\n{}\n", z.len(), body.join(" "))
}

pub fn chain_from_text(text: &str) -> Result<(usize, Vec<i64>)> {
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    if head.len() != 3 || head[0] != "chain" {
        return Err(parse_err(1, "expected `chain k len`"));
    }
    let k: usize = head[1].parse().map_err(|e| parse_err(1, e))?;
    let len: usize = head[2].parse().map_err(|e| parse_err(1, e))?;
    let z: Vec<i64> = lines
        .next()
        .unwrap_or("")
        .split_whitespace()
        .map(|t| t.parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(2, e))?;
    if z.len() != len {
        return Err(parse_err(2, format!("expected {len} coefficients")));
    }
    Ok((k, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_boundary_squares_to_zero() {
        let k = DyadicComplex::from_top([DyadicCube::top(0, &[0, 0, 0])]).unwrap();
        let cx = ChainComplexZ::from_complex(&k).unwrap();
        cx.verify().unwrap();
        assert_eq!(cx.count(0), 8);
        assert_eq!(cx.count(2), 6);
    }

    #[test]
    fn text_round_trip() {
        let k = DyadicComplex::from_top([DyadicCube::top(0, &[0, 0]), DyadicCube::top(0, &[1, 0])]).unwrap();
        let cx = ChainComplexZ::from_complex(&k).unwrap().reduced();
        let back = ChainComplexZ::from_text(&cx.to_text()).unwrap();
        assert_eq!(back.to_text(), cx.to_text());
        let (k, z) = chain_from_text(&chain_to_text(1, &[1, -1, 0])).unwrap();
        assert_eq!((k, z), (1, vec![1, -1, 0]));
    }
}
