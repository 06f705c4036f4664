use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::cube::DyadicCube;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::Scalar;

/// Finite face-closed family of dyadic cubes at one scale.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DyadicComplex {
    pub n: usize,
    pub scale: i32,
    cubes: BTreeSet<DyadicCube>,
}

impl DyadicComplex {
    pub fn empty(n: usize, scale: i32) -> Self {
        DyadicComplex { n, scale, cubes: BTreeSet::new() }
    }

    /// `K(Q)`: all faces of the given top cubes. All inputs must share one
    /// scale and one dimension.
    pub fn from_top<I: IntoIterator<Item = DyadicCube>>(cubes: I) -> Result<Self> {
        let mut it = cubes.into_iter().peekable();
        let Some(first) = it.peek().copied() else {
            return Ok(DyadicComplex::default());
        };
        let mut out = DyadicComplex::empty(first.ambient(), first.scale);
        for c in it {
            if c.scale != first.scale {
                return Err(Error::Invalid(format!(
                    "mixed scales in complex: {} and {}",
                    first.scale, c.scale
                )));
            }
            if c.dim() != first.dim() || c.n != first.n {
                return Err(Error::Invalid("mixed cube dimensions in complex".into()));
            }
            out.cubes.extend(c.all_faces());
        }
        Ok(out)
    }

    /// Closure of an arbitrary family of cubes at one scale (mixed dimension allowed).
    pub fn closure<I: IntoIterator<Item = DyadicCube>>(n: usize, scale: i32, cubes: I) -> Result<Self> {
        let mut out = DyadicComplex::empty(n, scale);
        for c in cubes {
            if c.scale != scale || c.ambient() != n {
                return Err(Error::Invalid("cube does not match complex scale".into()));
            }
            out.cubes.extend(c.all_faces());
        }
        Ok(out)
    }

    /// Complex from a family that is already face-closed.
    pub fn from_cells<I: IntoIterator<Item = DyadicCube>>(n: usize, scale: i32, cells: I) -> Result<Self> {
        let out = DyadicComplex { n, scale, cubes: cells.into_iter().collect() };
        if out.cubes.iter().any(|c| c.scale != scale || c.ambient() != n) {
            return Err(Error::Invalid("cube does not match complex scale".into()));
        }
        if !out.is_face_closed() {
            return Err(Error::Invalid("cell family is not face-closed".into()));
        }
        Ok(out)
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn contains(&self, c: &DyadicCube) -> bool {
        self.cubes.contains(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DyadicCube> {
        self.cubes.iter()
    }

    pub fn dim(&self) -> Option<usize> {
        self.cubes.iter().map(|c| c.dim()).max()
    }

    /// `K_i`: cells of dimension exactly `i`, in deterministic order.
    pub fn cells(&self, i: usize) -> Vec<DyadicCube> {
        self.cubes.iter().filter(|c| c.dim() == i).copied().collect()
    }

    /// `K^i`: the sub-complex of cells of dimension at most `i`.
    pub fn skeleton(&self, i: usize) -> DyadicComplex {
        DyadicComplex {
            n: self.n,
            scale: self.scale,
            cubes: self.cubes.iter().filter(|c| c.dim() <= i).copied().collect(),
        }
    }

    /// Cells that are maximal (not a proper face of another member).
    pub fn maximal(&self) -> Vec<DyadicCube> {
        let mut faces = BTreeSet::new();
        for c in &self.cubes {
            for f in c.facets() {
                faces.insert(f);
            }
        }
        self.cubes.iter().filter(|c| !faces.contains(c)).copied().collect()
    }

    pub fn insert_closed(&mut self, c: DyadicCube) {
        self.cubes.extend(c.all_faces());
    }

    pub fn union(&self, other: &DyadicComplex) -> DyadicComplex {
        let mut out = self.clone();
        if out.cubes.is_empty() {
            out.n = other.n;
            out.scale = other.scale;
        }
        out.cubes.extend(other.cubes.iter().copied());
        out
    }

    pub fn filter<F: Fn(&DyadicCube) -> bool>(&self, f: F) -> DyadicComplex {
        DyadicComplex {
            n: self.n,
            scale: self.scale,
            cubes: self.cubes.iter().filter(|c| f(c)).copied().collect(),
        }
    }

    pub fn is_subcomplex_of(&self, other: &DyadicComplex) -> bool {
        self.cubes.iter().all(|c| other.contains(c))
    }

    /// Every face of every member is a member.
    pub fn is_face_closed(&self) -> bool {
        self.cubes.iter().all(|c| c.facets().iter().all(|f| self.cubes.contains(f)))
    }

    /// For an `n`-dimensional complex: faces whose relative interior misses
    /// the topological boundary of `|K|`.
    pub fn is_interior_face(&self, f: &DyadicCube) -> bool {
        f.star_top().iter().all(|c| self.cubes.contains(c))
    }

    /// Boundary complex of an `n`-dimensional complex.
    pub fn boundary(&self) -> DyadicComplex {
        let mut out = DyadicComplex::empty(self.n, self.scale);
        for c in self.cubes.iter().filter(|c| c.dim() + 1 == self.n) {
            let tops = c.star_top().iter().filter(|t| self.cubes.contains(t)).count();
            if tops == 1 {
                out.insert_closed(*c);
            }
        }
        out
    }

    /// Subdivision to a finer scale.
    pub fn refine(&self, m: i32) -> DyadicComplex {
        let mut out = DyadicComplex::empty(self.n, m);
        for c in self.maximal() {
            for k in c.refine(m) {
                out.insert_closed(k);
            }
        }
        out
    }

    /// Membership in the support `|K|` (closed cells).
    pub fn support_contains<T: Scalar>(&self, p: &Point<T>) -> bool {
        self.cubes.iter().any(|c| c.aabb::<T>().contains(p))
    }

    /// Sum of `d`-volumes of the `d`-cells: the `H^d` measure of `|K^d|` when
    /// `d` is the top dimension of the skeleton.
    pub fn cell_measure<T: Scalar>(&self, d: usize) -> T {
        self.cubes.iter().filter(|c| c.dim() == d).map(|c| c.volume::<T>()).sum()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.cubes {
            let _ = writeln!(s, "{}", c.to_line());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cubes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let c: DyadicCube = line
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            cubes.push(c);
        }
        let Some(first) = cubes.first().copied() else {
            return Ok(DyadicComplex::default());
        };
        DyadicComplex::closure(first.ambient(), first.scale, cubes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_square() {
        let k = DyadicComplex::from_top([DyadicCube::top(0, &[0, 0])]).unwrap();
        assert_eq!(k.cells(2).len(), 1);
        assert_eq!(k.cells(1).len(), 4);
        assert_eq!(k.cells(0).len(), 4);
        assert!(k.is_face_closed());
    }

    #[test]
    fn adjacent_squares_share_edge() {
        let k = DyadicComplex::from_top([DyadicCube::top(0, &[0, 0]), DyadicCube::top(0, &[1, 0])]).unwrap();
        assert_eq!(k.cells(1).len(), 7);
        assert_eq!(k.cells(0).len(), 6);
        // interiors of distinct same-scale cells never overlap
        let tops = k.cells(2);
        let (a, b) = (tops[0].aabb::<f64>(), tops[1].aabb::<f64>());
        assert!(!a.contains_open(&b.center()) && !b.contains_open(&a.center()));
    }

    #[test]
    fn empty_and_mixed() {
        let k = DyadicComplex::from_top(Vec::<DyadicCube>::new()).unwrap();
        assert!(k.is_empty());
        let err = DyadicComplex::from_top([DyadicCube::top(0, &[0, 0]), DyadicCube::top(1, &[0, 0])]);
        assert!(err.is_err());
    }

    #[test]
    fn boundary_of_block_is_loop() {
        let tops = (0..3).flat_map(|i| (0..3).map(move |j| DyadicCube::top(0, &[i, j])));
        let k = DyadicComplex::from_top(tops).unwrap();
        let b = k.boundary();
        assert_eq!(b.cells(1).len(), 12);
        assert_eq!(b.cells(0).len(), 12);
        let center = DyadicCube::top(0, &[1, 1]);
        assert!(k.is_interior_face(&center.facets()[0]));
    }

    #[test]
    fn text_round_trip() {
        let k = DyadicComplex::from_top([DyadicCube::top(2, &[0, 1, 1])]).unwrap();
        let back = DyadicComplex::from_text(&k.to_text()).unwrap();
        assert_eq!(k, back);
    }
}
