use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point, MAX_DIM};
use crate::scalar::{dyadic_coord, dyadic_len, Scalar};

/// A closed dyadic cube of side `2^-scale`.
///
/// `corner` holds integer lattice coordinates; the cube extends by one unit in
/// each axis of `axes` (a bitmask) and is flat in the remaining ones.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DyadicCube {
    pub scale: i32,
    pub n: u8,
    pub axes: u8,
    pub corner: [i64; MAX_DIM],
}

impl DyadicCube {
    pub fn new(scale: i32, corner: &[i64], axes: &[usize]) -> Result<Self> {
        let n = corner.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Invalid(format!("ambient dimension {n} not in 1..={MAX_DIM}")));
        }
        let mut mask = 0u8;
        for &a in axes {
            if a >= n {
                return Err(Error::Invalid(format!("axis {a} out of range for n = {n}")));
            }
            if mask & (1 << a) != 0 {
                return Err(Error::Invalid(format!("axis {a} repeated")));
            }
            mask |= 1 << a;
        }
        let mut c = [0i64; MAX_DIM];
        c[..n].copy_from_slice(corner);
        Ok(DyadicCube { scale, n: n as u8, axes: mask, corner: c })
    }

    /// Full-dimensional cube with the given corner.
    pub fn top(scale: i32, corner: &[i64]) -> Self {
        let n = corner.len();
        let mut c = [0i64; MAX_DIM];
        c[..n].copy_from_slice(corner);
        DyadicCube { scale, n: n as u8, axes: ((1u16 << n) - 1) as u8, corner: c }
    }

    pub fn ambient(&self) -> usize {
        self.n as usize
    }

    pub fn dim(&self) -> usize {
        self.axes.count_ones() as usize
    }

    pub fn has_axis(&self, a: usize) -> bool {
        self.axes & (1 << a) != 0
    }

    pub fn axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ambient()).filter(move |a| self.has_axis(*a))
    }

    pub fn flat_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ambient()).filter(move |a| !self.has_axis(*a))
    }

    pub fn side<T: Scalar>(&self) -> T {
        dyadic_len(self.scale)
    }

    pub fn lo<T: Scalar>(&self, axis: usize) -> T {
        dyadic_coord(self.corner[axis], self.scale)
    }

    pub fn hi<T: Scalar>(&self, axis: usize) -> T {
        if self.has_axis(axis) {
            dyadic_coord(self.corner[axis] + 1, self.scale)
        } else {
            self.lo(axis)
        }
    }

    pub fn aabb<T: Scalar>(&self) -> Aabb<T> {
        let mut lo = Point::zero();
        let mut hi = Point::zero();
        for i in 0..self.ambient() {
            lo[i] = self.lo(i);
            hi[i] = self.hi(i);
        }
        Aabb::new(self.ambient(), lo, hi)
    }

    pub fn center<T: Scalar>(&self) -> Point<T> {
        self.aabb::<T>().center()
    }

    /// Side length to the `dim` power.
    pub fn volume<T: Scalar>(&self) -> T {
        self.side::<T>().powi(self.dim() as i32)
    }

    /// The `2k` codimension-one faces, low face first for each axis.
    pub fn facets(&self) -> Vec<DyadicCube> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for a in self.axes() {
            let mut lo = *self;
            lo.axes &= !(1 << a);
            let mut hi = lo;
            hi.corner[a] += 1;
            out.push(lo);
            out.push(hi);
        }
        out
    }

    /// All faces of every dimension, including the cube itself.
    pub fn all_faces(&self) -> Vec<DyadicCube> {
        let axes: Vec<usize> = self.axes().collect();
        let k = axes.len();
        let mut out = Vec::with_capacity(3usize.pow(k as u32));
        // each kept axis is either free, fixed low or fixed high
        for code in 0..3usize.pow(k as u32) {
            let mut c = *self;
            let mut rest = code;
            for &a in &axes {
                match rest % 3 {
                    0 => {}
                    1 => c.axes &= !(1 << a),
                    _ => {
                        c.axes &= !(1 << a);
                        c.corner[a] += 1;
                    }
                }
                rest /= 3;
            }
            out.push(c);
        }
        out
    }

    pub fn faces_of_dim(&self, dim: usize) -> Vec<DyadicCube> {
        self.all_faces().into_iter().filter(|f| f.dim() == dim).collect()
    }

    /// Whether `other` (same scale) is a face of `self`.
    pub fn has_face(&self, other: &DyadicCube) -> bool {
        if other.scale != self.scale || other.n != self.n || other.axes & !self.axes != 0 {
            return false;
        }
        (0..self.ambient()).all(|i| {
            if self.has_axis(i) {
                other.corner[i] == self.corner[i] || (!other.has_axis(i) && other.corner[i] == self.corner[i] + 1)
            } else {
                other.corner[i] == self.corner[i]
            }
        })
    }

    /// Integer bounds of the cube at a finer (or equal) scale `m`.
    pub fn int_bounds(&self, m: i32) -> ([i64; MAX_DIM], [i64; MAX_DIM]) {
        assert!(m >= self.scale, "int_bounds needs a finer scale");
        let f = 1i64 << (m - self.scale);
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for i in 0..self.ambient() {
            lo[i] = self.corner[i] * f;
            hi[i] = if self.has_axis(i) { (self.corner[i] + 1) * f } else { lo[i] };
        }
        (lo, hi)
    }

    /// Exact closed intersection test between cubes of possibly different scales.
    pub fn meets(&self, other: &DyadicCube) -> bool {
        let m = self.scale.max(other.scale);
        let (a0, a1) = self.int_bounds(m);
        let (b0, b1) = other.int_bounds(m);
        (0..self.ambient()).all(|i| a0[i] <= b1[i] && b0[i] <= a1[i])
    }

    /// Whether the closed cube contains `other` (any scale at least as fine).
    pub fn contains_cube(&self, other: &DyadicCube) -> bool {
        let m = self.scale.max(other.scale);
        let (a0, a1) = self.int_bounds(m);
        let (b0, b1) = other.int_bounds(m);
        (0..self.ambient()).all(|i| a0[i] <= b0[i] && b1[i] <= a1[i])
    }

    /// Smallest cube of the coarser scale `m` containing this one.
    pub fn carrier(&self, m: i32) -> DyadicCube {
        assert!(m <= self.scale, "carrier needs a coarser scale");
        let k = self.scale - m;
        let mut out = *self;
        out.scale = m;
        out.axes = 0;
        for i in 0..self.ambient() {
            let c = self.corner[i];
            out.corner[i] = c >> k;
            let exact = c & ((1i64 << k) - 1) == 0;
            if self.has_axis(i) || !exact {
                out.axes |= 1 << i;
            }
        }
        out
    }

    /// Subdivision into cubes of scale `m >= self.scale` of the same dimension.
    pub fn refine(&self, m: i32) -> Vec<DyadicCube> {
        assert!(m >= self.scale, "refine needs a finer scale");
        let f = 1i64 << (m - self.scale);
        let axes: Vec<usize> = self.axes().collect();
        let mut base = *self;
        base.scale = m;
        for i in 0..self.ambient() {
            base.corner[i] *= f;
        }
        let count = (f as usize).pow(axes.len() as u32);
        let mut out = Vec::with_capacity(count);
        for code in 0..count {
            let mut c = base;
            let mut rest = code as i64;
            for &a in &axes {
                c.corner[a] += rest % f;
                rest /= f;
            }
            out.push(c);
        }
        out
    }

    /// Full-dimensional cubes of the ambient lattice that contain this face.
    pub fn star_top(&self) -> Vec<DyadicCube> {
        let flat: Vec<usize> = self.flat_axes().collect();
        let mut out = Vec::with_capacity(1 << flat.len());
        for code in 0..(1usize << flat.len()) {
            let mut c = *self;
            c.axes = ((1u16 << self.n) - 1) as u8;
            for (j, &a) in flat.iter().enumerate() {
                if code & (1 << j) != 0 {
                    c.corner[a] -= 1;
                }
            }
            out.push(c);
        }
        out
    }

    /// Same-dimension lattice cubes whose closures meet this cube (excluding itself).
    pub fn neighbors(&self) -> Vec<DyadicCube> {
        let n = self.ambient();
        let mut out = Vec::with_capacity(3usize.pow(n as u32));
        for code in 0..3usize.pow(n as u32) {
            let mut c = *self;
            let mut rest = code;
            let mut zero = true;
            for i in 0..n {
                let off = (rest % 3) as i64 - 1;
                rest /= 3;
                if off != 0 {
                    zero = false;
                }
                c.corner[i] += off;
            }
            if !zero {
                out.push(c);
            }
        }
        out
    }

    /// Text form: `m k corner... axes...`.
    pub fn to_line(&self) -> String {
        let mut s = format!("{} {}", self.scale, self.dim());
        for i in 0..self.ambient() {
            s.push_str(&format!(" {}", self.corner[i]));
        }
        for a in self.axes() {
            s.push_str(&format!(" {a}"));
        }
        s
    }

    /// Hash that is stable across runs and platforms (splitmix64 chain).
    pub fn stable_hash(&self) -> u64 {
        let mut h = splitmix(self.scale as u64 ^ ((self.n as u64) << 32) ^ ((self.axes as u64) << 40));
        for i in 0..self.ambient() {
            h = splitmix(h ^ self.corner[i] as u64);
        }
        h
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        let c: Vec<String> = (0..self.ambient()).map(|i| self.corner[i].to_string()).collect();
        let a: Vec<String> = self.axes().map(|a| a.to_string()).collect();
        format!("{}:{}:{}", self.scale, c.join(","), a.join(""))
    }
}

pub fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

impl FromStr for DyadicCube {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<i64> = s
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad integer {t:?}"))))
            .collect::<Result<_>>()?;
        if toks.len() < 3 {
            return Err(Error::Parse(format!("cube line too short: {s:?}")));
        }
        let m = toks[0] as i32;
        let k = toks[1];
        if k < 0 || (toks.len() as i64) < 2 + k + 1 {
            return Err(Error::Parse(format!("bad cube dimension in {s:?}")));
        }
        let n = toks.len() - 2 - k as usize;
        let corner = &toks[2..2 + n];
        let axes: Vec<usize> = toks[2 + n..].iter().map(|a| *a as usize).collect();
        DyadicCube::new(m, corner, &axes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_faces() {
        let sq = DyadicCube::top(0, &[0, 0]);
        let f = sq.all_faces();
        assert_eq!(f.len(), 9);
        assert_eq!(f.iter().filter(|c| c.dim() == 1).count(), 4);
        assert_eq!(f.iter().filter(|c| c.dim() == 0).count(), 4);
        for c in &f {
            assert!(sq.has_face(c));
        }
    }

    #[test]
    fn line_round_trip() {
        let c = DyadicCube::new(3, &[1, -2, 5], &[0, 2]).unwrap();
        let back: DyadicCube = c.to_line().parse().unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn refine_and_contain() {
        let c = DyadicCube::top(1, &[1, 0]);
        let kids = c.refine(3);
        assert_eq!(kids.len(), 16);
        assert!(kids.iter().all(|k| c.contains_cube(k)));
        let far = DyadicCube::top(3, &[0, 0]);
        assert!(!c.contains_cube(&far));
        assert!(!c.meets(&DyadicCube::top(3, &[2, 5])));
        assert!(c.meets(&DyadicCube::top(3, &[3, 4])));
    }

    #[test]
    fn star_of_vertex() {
        let v = DyadicCube::new(0, &[0, 0], &[]).unwrap();
        let s = v.star_top();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|c| c.has_face(&v) || c.all_faces().contains(&v)));
    }
}
