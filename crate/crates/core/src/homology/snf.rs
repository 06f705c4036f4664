use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

fn overflow() -> Error {
    Error::Overflow
}

pub(crate) fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

pub(crate) fn mul_add(a: i64, q: i64, b: i64) -> Result<i64> {
    q.checked_mul(b).and_then(|p| a.checked_add(p)).ok_or_else(overflow)
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Invalid("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn from_diag(d: &[i64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = *v;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != o.rows {
            return Err(Error::Invalid(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = mul_add(out.data[idx], a, b)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.cols {
            return Err(Error::Invalid("vector length does not match matrix".into()));
        }
        let mut out = vec![0i64; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, xv) in x.iter().enumerate() {
                let a = self.get(i, j);
                if a != 0 && *xv != 0 {
                    *o = mul_add(*o, a, *xv)?;
                }
            }
        }
        Ok(out)
    }

    /// Columns `range` as a new matrix.
    pub fn cols_range(&self, lo: usize, hi: usize) -> IntMatrix {
        let mut out = Self::zeros(self.rows, hi - lo);
        for i in 0..self.rows {
            for j in lo..hi {
                out.set(i, j - lo, self.get(i, j));
            }
        }
        out
    }

    pub fn rows_range(&self, lo: usize, hi: usize) -> IntMatrix {
        IntMatrix { rows: hi - lo, cols: self.cols, data: self.data[lo * self.cols..hi * self.cols].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0)
    }

    /// Text form: `rows cols` then one line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let dims: Vec<usize> = head
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln + 1, format!("bad header: {e}")))?;
        if dims.len() != 2 {
            return Err(parse_err(ln + 1, "header must be `rows cols`"));
        }
        let mut rows = Vec::with_capacity(dims[0]);
        for (ln, l) in lines.take(dims[0]) {
            let row: Vec<i64> = l
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(ln + 1, format!("bad entry: {e}")))?;
            if row.len() != dims[1] {
                return Err(parse_err(ln + 1, format!("expected {} entries", dims[1])));
            }
            rows.push(row);
        }
        if rows.len() != dims[0] {
            return Err(parse_err(ln + 1, format!("expected {} rows", dims[0])));
        }
        let mut m = Self::from_rows(&rows)?;
        m.rows = dims[0];
        m.cols = dims[1];
        Ok(m)
    }
}

/// `u · m · v = diag`, with `u`, `v` unimodular and their inverses kept for
/// change of basis.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero invariant factors `d_1 | d_2 | ...`, all positive.
    pub diag: Vec<i64>,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, v) in self.diag.iter().enumerate() {
            d.set(i, i, *v);
        }
        d
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    ui: IntMatrix,
    v: IntMatrix,
    vi: IntMatrix,
}

impl Work {
    // row_i += q * row_j
    fn row_add(&mut self, i: usize, j: usize, q: i64, from: usize) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        let c = self.a.cols;
        for k in from..c {
            let b = self.a.data[j * c + k];
            if b != 0 {
                self.a.data[i * c + k] = mul_add(self.a.data[i * c + k], q, b)?;
            }
        }
        let r = self.u.cols;
        for k in 0..r {
            let b = self.u.data[j * r + k];
            if b != 0 {
                self.u.data[i * r + k] = mul_add(self.u.data[i * r + k], q, b)?;
            }
        }
        // inverse: col_j -= q * col_i
        for k in 0..r {
            let b = self.ui.data[k * r + i];
            if b != 0 {
                self.ui.data[k * r + j] = mul_add(self.ui.data[k * r + j], -q, b)?;
            }
        }
        Ok(())
    }

    // col_j += q * col_i
    fn col_add(&mut self, j: usize, i: usize, q: i64, from: usize) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        let c = self.a.cols;
        for k in from..self.a.rows {
            let b = self.a.data[k * c + i];
            if b != 0 {
                self.a.data[k * c + j] = mul_add(self.a.data[k * c + j], q, b)?;
            }
        }
        let n = self.v.cols;
        for k in 0..n {
            let b = self.v.data[k * n + i];
            if b != 0 {
                self.v.data[k * n + j] = mul_add(self.v.data[k * n + j], q, b)?;
            }
        }
        // inverse: row_i -= q * row_j
        for k in 0..n {
            let b = self.vi.data[j * n + k];
            if b != 0 {
                self.vi.data[i * n + k] = mul_add(self.vi.data[i * n + k], -q, b)?;
            }
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_rows(&mut self.a, i, j);
        swap_rows(&mut self.u, i, j);
        swap_cols(&mut self.ui, i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_cols(&mut self.a, i, j);
        swap_cols(&mut self.v, i, j);
        swap_rows(&mut self.vi, i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            let c = m.cols;
            for v in &mut m.data[i * c..(i + 1) * c] {
                *v = -*v;
            }
        }
        let r = self.ui.rows;
        let c = self.ui.cols;
        for k in 0..r {
            self.ui.data[k * c + i] = -self.ui.data[k * c + i];
        }
    }
}

fn swap_rows(m: &mut IntMatrix, i: usize, j: usize) {
    let c = m.cols;
    for k in 0..c {
        m.data.swap(i * c + k, j * c + k);
    }
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    let c = m.cols;
    for k in 0..m.rows {
        m.data.swap(k * c + i, k * c + j);
    }
}

/// Smith normal form over the integers.
pub fn smith_normal_form(m: &IntMatrix) -> Result<Snf> {
    let (r, c) = (m.rows, m.cols);
    let mut w = Work {
        a: m.clone(),
        u: IntMatrix::identity(r),
        ui: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
        vi: IntMatrix::identity(c),
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = find_pivot(&w.a, t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut moved = false;
            for i in t + 1..r {
                let x = w.a.get(i, t);
                if x == 0 {
                    continue;
                }
                let p = w.a.get(t, t);
                w.row_add(i, t, -(x / p), t)?;
                if w.a.get(i, t) != 0 {
                    w.swap_rows(t, i);
                    moved = true;
                }
            }
            for j in t + 1..c {
                let x = w.a.get(t, j);
                if x == 0 {
                    continue;
                }
                let p = w.a.get(t, t);
                w.col_add(j, t, -(x / p), t)?;
                if w.a.get(t, j) != 0 {
                    w.swap_cols(t, j);
                    moved = true;
                }
            }
            if moved {
                continue;
            }
            let p = w.a.get(t, t);
            if p.abs() != 1 {
                if let Some(i) = (t + 1..r).find(|&i| (t + 1..c).any(|j| w.a.get(i, j) % p != 0)) {
                    w.row_add(t, i, 1, t)?;
                    continue;
                }
            }
            break;
        }
        if w.a.get(t, t) < 0 {
            w.negate_row(t);
        }
        diag.push(w.a.get(t, t));
        t += 1;
    }
    Ok(Snf { u: w.u, u_inv: w.ui, v: w.v, v_inv: w.vi, diag, rows: r, cols: c })
}

// Smallest nonzero entry of the trailing block, preferring units in sparse lines.
fn find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let v = a.get(i, j).abs();
            if v == 0 {
                continue;
            }
            if v == 1 {
                return Some((i, j));
            }
            if best.map_or(true, |(b, _, _)| v < b) {
                best = Some((v, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b)`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Snf {
        let s = smith_normal_form(m).unwrap();
        let d = s.u.mul(m).unwrap().mul(&s.v).unwrap();
        assert_eq!(d, s.diagonal_matrix());
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(m.rows));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(m.cols));
        for w in s.diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        s
    }

    #[test]
    fn small_cases() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]).unwrap();
        assert_eq!(check(&m).diag, vec![2, 4]);
        assert_eq!(check(&IntMatrix::identity(3)).diag, vec![1, 1, 1]);
        assert!(check(&IntMatrix::zeros(2, 3)).diag.is_empty());
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(check(&m).diag, vec![1, 6]);
    }

    #[test]
    fn text_round_trip() {
        let m = IntMatrix::from_rows(&[vec![1, -2, 3], vec![0, 5, -7]]).unwrap();
        assert_eq!(IntMatrix::from_text(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn bezout() {
        let (g, x, y) = ext_gcd(12, -18);
        assert_eq!(g, 6);
        assert_eq!(12 * x - 18 * y, 6);
    }
}
