//! Integer chain complexes of cubical complexes, Smith normal form, homology
//! with finitely generated coefficients, cycle classes with witnesses,
//! inclusion-induced maps and duality rank checks on spheres.

mod chain;
mod engine;
pub mod field;
mod snf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

pub use chain::{chain_from_text, chain_to_text, cube_boundary, ChainComplexZ, SparseCol};
pub use engine::{induced_matrix, Class, FactorHomology, DENSE_LIMIT};
pub use snf::{ext_gcd, gcd, smith_normal_form, IntMatrix, Snf};

use crate::dyadic::{cubes_near, DyadicComplex, DyadicCube};
use crate::error::{Error, Result};
use crate::geomset::PolySet;
use crate::scalar::{dyadic_len, lit, Scalar};

/// `Z^rank ⊕ Z/q_1 ⊕ ... ⊕ Z/q_s` with `q_1 | q_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    pub rank: usize,
    pub torsion: Vec<i64>,
}

impl FgAbelianGroup {
    /// Normalizes arbitrary cyclic orders into invariant-factor form.
    pub fn new(rank: usize, orders: &[i64]) -> Result<Self> {
        if orders.iter().any(|q| *q < 1) {
            return Err(Error::Invalid("torsion orders must be positive".into()));
        }
        let s = smith_normal_form(&IntMatrix::from_diag(orders))?;
        let torsion = s.diag.into_iter().filter(|d| *d > 1).collect();
        Ok(FgAbelianGroup { rank, torsion })
    }

    pub fn integers() -> Self {
        FgAbelianGroup { rank: 1, torsion: Vec::new() }
    }

    pub fn cyclic(q: i64) -> Result<Self> {
        Self::new(0, &[q])
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Cyclic factors in order: `0` for each copy of `Z`, then the torsion orders.
    pub fn factors(&self) -> Vec<i64> {
        let mut f = vec![0; self.rank];
        f.extend(&self.torsion);
        f
    }
}

fn factor_name(q: i64) -> String {
    if q == 0 {
        "Z".into()
    } else {
        format!("Z/{q}")
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|q| format!("Z/{q}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

impl FromStr for FgAbelianGroup {
    type Err = Error;

    /// Accepts sums such as `Z`, `Z^2+Z/2`, `Z/2+Z/3` or `0`, and the
    /// config form `rank 1; torsion 2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with("rank") || s.starts_with("torsion") {
            return parse_rank_torsion(s);
        }
        if s == "0" {
            return Ok(FgAbelianGroup { rank: 0, torsion: Vec::new() });
        }
        let mut rank = 0;
        let mut orders = Vec::new();
        for part in s.split('+').map(str::trim) {
            if part == "Z" {
                rank += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                rank += r.parse::<usize>().map_err(|e| Error::Parse(format!("group `{s}`: {e}")))?;
            } else if let Some(q) = part.strip_prefix("Z/") {
                orders.push(q.parse::<i64>().map_err(|e| Error::Parse(format!("group `{s}`: {e}")))?);
            } else {
                return Err(Error::Parse(format!("group `{s}`: unknown summand `{part}`")));
            }
        }
        Self::new(rank, &orders)
    }
}

fn parse_rank_torsion(s: &str) -> Result<FgAbelianGroup> {
    let bad = |what: &str| Error::Parse(format!("group `{s}`: {what}"));
    let mut rank = 0;
    let mut orders = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some(r) = part.strip_prefix("rank") {
            rank = r.trim().parse::<usize>().map_err(|e| bad(&e.to_string()))?;
        } else if let Some(t) = part.strip_prefix("torsion") {
            for q in t.split(',').map(str::trim).filter(|q| !q.is_empty()) {
                orders.push(q.parse::<i64>().map_err(|e| bad(&e.to_string()))?);
            }
        } else {
            return Err(bad(&format!("unknown part `{part}`")));
        }
    }
    FgAbelianGroup::new(rank, &orders)
}

/// Homology in one degree with coefficients in `G`, one entry per cyclic
/// factor of `G`.
#[derive(Clone, Debug)]
pub struct HomologyGroup {
    pub degree: usize,
    pub coefficients: FgAbelianGroup,
    pub factors: Vec<FactorHomology>,
}

/// Class of a `G`-cycle, one chain per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleClass {
    Zero { witness: Vec<Vec<i64>> },
    NonZero { coords: Vec<Vec<i64>> },
}

impl CycleClass {
    pub fn is_zero(&self) -> bool {
        matches!(self, CycleClass::Zero { .. })
    }
}

impl HomologyGroup {
    /// Total number of generators over all factors.
    pub fn generator_count(&self) -> usize {
        self.factors.iter().map(|f| f.orders.len()).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(|f| f.is_trivial())
    }

    /// Rank over the integer factors (free part).
    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|f| f.modulus == 0).map(|f| f.free_rank()).sum()
    }

    /// Human-readable form, e.g. `Z | Z/2` (one entry per factor).
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|f| {
                let mut orders: BTreeMap<i64, usize> = BTreeMap::new();
                for o in &f.orders {
                    *orders.entry(*o).or_default() += 1;
                }
                let terms: Vec<String> = orders
                    .iter()
                    .map(|(o, c)| if *c == 1 { factor_name(*o) } else { format!("({})^{c}", factor_name(*o)) })
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            })
            .collect();
        parts.join(" | ")
    }

    pub fn classify(&self, cx: &ChainComplexZ, z: &[Vec<i64>]) -> Result<CycleClass> {
        if z.len() != self.factors.len() {
            return Err(Error::Invalid(format!(
                "chain has {} factor components, coefficients have {}",
                z.len(),
                self.factors.len()
            )));
        }
        let mut witness = Vec::with_capacity(z.len());
        let mut coords = Vec::with_capacity(z.len());
        let mut zero = true;
        for (f, zi) in self.factors.iter().zip(z) {
            match f.classify(cx, zi)? {
                Class::Zero { witness: w } => {
                    witness.push(w);
                    coords.push(vec![0; f.orders.len()]);
                }
                Class::NonZero { coords: c } => {
                    zero = false;
                    witness.push(Vec::new());
                    coords.push(c);
                }
            }
        }
        Ok(if zero { CycleClass::Zero { witness } } else { CycleClass::NonZero { coords } })
    }

    /// Classifies an integer cycle read in every factor of `G`.
    pub fn classify_uniform(&self, cx: &ChainComplexZ, z: &[i64]) -> Result<CycleClass> {
        let zs: Vec<Vec<i64>> = self.factors.iter().map(|_| z.to_vec()).collect();
        self.classify(cx, &zs)
    }

    /// CSV report: one row per cyclic factor of the coefficients.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("coefficient,degree,free_rank,torsion\n");
        for f in &self.factors {
            let tors: Vec<String> = f.torsion().iter().map(|t| t.to_string()).collect();
            s.push_str(&format!(
                "{},{},{},{}\n",
                factor_name(f.modulus),
                self.degree,
                f.free_rank(),
                tors.join(";")
            ));
        }
        s
    }
}

/// `H_k(X; G)`, computed per cyclic factor of `G`.
pub fn homology_group(cx: &ChainComplexZ, k: usize, g: &FgAbelianGroup) -> Result<HomologyGroup> {
    let mut cache: BTreeMap<i64, FactorHomology> = BTreeMap::new();
    let mut factors = Vec::new();
    for q in g.factors() {
        if !cache.contains_key(&q) {
            cache.insert(q, FactorHomology::compute(cx, k, q)?);
        }
        factors.push(cache[&q].clone());
    }
    Ok(HomologyGroup { degree: k, coefficients: g.clone(), factors })
}

pub fn cycle_class(cx: &ChainComplexZ, k: usize, z: &[Vec<i64>], g: &FgAbelianGroup) -> Result<CycleClass> {
    homology_group(cx, k, g)?.classify(cx, z)
}

/// Kernel generators of `H_k(A; Z/q) -> H_k(X; Z/q)` for one factor
/// (`q = 0` for `Z`).
#[derive(Clone, Debug)]
pub struct KernelFactor {
    pub modulus: i64,
    pub generators: Vec<Vec<i64>>,
}

/// Generators of `ker(H_k(A; G) -> H_k(X; G))` as cycles of `A`, per
/// distinct cyclic factor of `G`.
pub fn induced_map_kernel(
    a: &ChainComplexZ,
    x: &ChainComplexZ,
    k: usize,
    g: &FgAbelianGroup,
) -> Result<Vec<KernelFactor>> {
    let map = x.inclusion(a, k)?;
    for d in [k.saturating_sub(1), k, k + 1] {
        x.inclusion(a, d)?;
    }
    let moduli: BTreeSet<i64> = g.factors().into_iter().collect();
    let mut out = Vec::new();
    for q in moduli {
        let ha = FactorHomology::compute(a, k, q)?;
        let hx = FactorHomology::compute(x, k, q)?;
        let c = induced_matrix(&ha, &hx, x, &map)?;
        let sa = ha.generators.len();
        let rel: Vec<usize> = (0..hx.orders.len()).filter(|i| hx.orders[*i] != 0).collect();
        let mut m = IntMatrix::zeros(hx.orders.len(), sa + rel.len());
        for i in 0..c.rows {
            for j in 0..sa {
                m.set(i, j, c.get(i, j));
            }
        }
        for (j, &i) in rel.iter().enumerate() {
            m.set(i, sa + j, hx.orders[i]);
        }
        let s = smith_normal_form(&m)?;
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for col in s.rank()..m.cols {
            let coef: Vec<i64> = (0..sa).map(|j| s.v.get(j, col)).collect();
            let mut z = vec![0i64; a.count(k)];
            for (j, cj) in coef.iter().enumerate() {
                for (i, v) in ha.generators[j].iter().enumerate() {
                    z[i] = snf::mul_add(z[i], *cj, *v)?;
                }
            }
            if q != 0 {
                for v in &mut z {
                    *v = v.rem_euclid(q);
                }
            }
            if let Class::Zero { .. } = ha.classify(a, &z)? {
                continue;
            }
            let mut zx = vec![0i64; x.count(k)];
            for (i, v) in z.iter().enumerate() {
                zx[map[i]] += v;
            }
            if !matches!(hx.classify(x, &zx)?, Class::Zero { .. }) {
                return Err(Error::Check("kernel generator does not bound in the larger complex".into()));
            }
            if !gens.contains(&z) {
                gens.push(z);
            }
        }
        out.push(KernelFactor { modulus: q, generators: gens });
    }
    Ok(out)
}

/// Top cubes of `region` refined to scale `m`, minus those within `delta`
/// of `E`, with all faces.
pub fn complement_complex<T: Scalar>(
    region: &DyadicComplex,
    e: &PolySet<T>,
    m: i32,
    delta: T,
) -> Result<DyadicComplex> {
    let n = region.n;
    if region.is_empty() {
        return Ok(region.clone());
    }
    if region.dim() != Some(n) {
        return Err(Error::Invalid("region must be a full-dimensional complex".into()));
    }
    if e.n != n {
        return Err(Error::Invalid(format!("set lives in R^{} but the region in R^{n}", e.n)));
    }
    if m < region.scale {
        return Err(Error::Precondition(format!("scale {m} is coarser than the region scale {}", region.scale)));
    }
    let diam = dyadic_len::<T>(m) * lit::<T>(n as f64).sqrt();
    if !e.is_empty() && delta < diam {
        return Err(Error::Precondition(format!(
            "margin {delta} is below the cube diameter {diam} at scale {m}"
        )));
    }
    let mut removed: BTreeSet<DyadicCube> = BTreeSet::new();
    for s in &e.simplices {
        removed.extend(cubes_near(s, n, m, delta));
    }
    let kept = region
        .cells(n)
        .into_iter()
        .flat_map(|c| c.refine(m))
        .filter(|c| !removed.contains(c));
    let out = DyadicComplex::closure(n, m, kept)?;
    Ok(out)
}

/// Rank of `H_k` over the rationals (degree 0 by components, otherwise by a
/// prime field).
pub fn rational_rank(cx: &ChainComplexZ, k: usize) -> Result<usize> {
    if k == 0 {
        return Ok(FactorHomology::compute(cx, 0, 0)?.free_rank());
    }
    Ok(field::betti(cx, k))
}

/// `complement_complex` at `m` accepted only when its degree-`k` rank agrees
/// with the one at `m + 1`.
pub fn stable_complement<T: Scalar>(
    region: &DyadicComplex,
    e: &PolySet<T>,
    m: i32,
    delta: T,
    k: usize,
) -> Result<(DyadicComplex, usize)> {
    let a = complement_complex(region, e, m, delta)?;
    let b = complement_complex(region, e, m + 1, delta)?;
    let ra = rational_rank(&ChainComplexZ::from_complex(&a)?, k)?;
    let rb = rational_rank(&ChainComplexZ::from_complex(&b)?, k)?;
    if ra != rb {
        return Err(Error::Unstable(format!("degree {k} rank {ra} at scale {m} but {rb} at scale {}", m + 1)));
    }
    Ok((a, ra))
}

/// Cells of `sphere` refined `extra` times that avoid `|X|`.
pub fn sphere_complement(sphere: &DyadicComplex, x: &DyadicComplex, extra: i32) -> Result<DyadicComplex> {
    let m = sphere.scale + extra;
    let fine = sphere.refine(m);
    if x.is_empty() {
        return Ok(fine);
    }
    let bad: BTreeSet<DyadicCube> = x.refine(m).cells(0).into_iter().collect();
    let keep = fine.filter(|c| c.faces_of_dim(0).iter().all(|v| !bad.contains(v)));
    Ok(keep)
}

#[derive(Clone, Debug)]
pub struct DualityRow {
    /// Degree in the complement.
    pub degree: usize,
    pub complement_rank: usize,
    /// Rank of `H̃_{N-1-degree}(X)` for the sphere dimension `N`.
    pub dual_rank: usize,
}

#[derive(Clone, Debug)]
pub struct SkeletonCheck {
    pub d: usize,
    pub degree: usize,
    pub rank_x: usize,
    pub rank_skeleton: usize,
    pub map_rank: usize,
    pub iso: bool,
}

#[derive(Clone, Debug)]
pub struct AlexanderReport {
    pub sphere_dim: usize,
    pub rows: Vec<DualityRow>,
    pub skeleton: Option<SkeletonCheck>,
    pub pass: bool,
}

impl AlexanderReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,degree,left,right,pass\n");
        for r in &self.rows {
            s.push_str(&format!(
                "duality,{},{},{},{}\n",
                r.degree,
                r.complement_rank,
                r.dual_rank,
                r.complement_rank == r.dual_rank
            ));
        }
        if let Some(c) = &self.skeleton {
            s.push_str(&format!("skeleton_ranks,{},{},{},{}\n", c.degree, c.rank_x, c.rank_skeleton, c.iso));
            s.push_str(&format!("skeleton_map,{},{},{},{}\n", c.degree, c.map_rank, c.rank_x, c.iso));
        }
        s
    }
}

fn reduced_rank(k: &DyadicComplex, q: usize) -> Result<usize> {
    let cx = ChainComplexZ::from_complex(k)?.reduced();
    if q > cx.top() {
        return Ok(0);
    }
    rational_rank(&cx, q)
}

/// Ranks of `H̃_q(S \ X)` against `H̃_{N-1-q}(X)` on a cubical `N`-sphere, and
/// optionally whether `S \ |X| -> S \ |X^d|` is a rank isomorphism in degree
/// `N - d`. Complements are taken one and two refinements deep and must agree.
pub fn alexander_rank_check(sphere: &DyadicComplex, x: &DyadicComplex, d: Option<usize>) -> Result<AlexanderReport> {
    if !x.is_empty() && (x.scale != sphere.scale || !x.is_subcomplex_of(sphere)) {
        return Err(Error::Invalid("X is not a subcomplex of the sphere".into()));
    }
    let big_n = sphere.dim().ok_or_else(|| Error::Invalid("empty sphere".into()))?;
    let comp = sphere_complement(sphere, x, 1)?;
    let comp2 = sphere_complement(sphere, x, 2)?;
    let mut rows = Vec::new();
    for q in 0..big_n {
        let a = reduced_rank(&comp, q)?;
        let b = reduced_rank(&comp2, q)?;
        if a != b {
            return Err(Error::Unstable(format!("complement rank in degree {q} changes under refinement")));
        }
        let dual = if x.is_empty() { 0 } else { reduced_rank(x, big_n - 1 - q)? };
        rows.push(DualityRow { degree: q, complement_rank: a, dual_rank: dual });
    }
    let skeleton = match d {
        Some(d) if d <= big_n => {
            let q = big_n - d;
            let xd = x.skeleton(d);
            let compd = sphere_complement(sphere, &xd, 1)?;
            let cx = ChainComplexZ::from_complex(&comp)?.reduced();
            let cxd = ChainComplexZ::from_complex(&compd)?.reduced();
            let rank_x = if q <= cx.top() { rational_rank(&cx, q)? } else { 0 };
            let rank_skeleton = if q <= cxd.top() { rational_rank(&cxd, q)? } else { 0 };
            let map_rank = if rank_x == 0 { 0 } else { field::induced_rank(&cx, &cxd, q)? };
            Some(SkeletonCheck {
                d,
                degree: q,
                rank_x,
                rank_skeleton,
                map_rank,
                iso: rank_x == rank_skeleton && map_rank == rank_x,
            })
        }
        Some(d) => return Err(Error::Invalid(format!("d = {d} exceeds the sphere dimension {big_n}"))),
        None => None,
    };
    let pass = rows.iter().all(|r| r.complement_rank == r.dual_rank) && skeleton.as_ref().map_or(true, |s| s.iso);
    Ok(AlexanderReport { sphere_dim: big_n, rows, skeleton, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn grid(cells: &[(i64, i64)], m: i32) -> DyadicComplex {
        DyadicComplex::from_top(cells.iter().map(|(i, j)| DyadicCube::top(m, &[*i, *j]))).unwrap()
    }

    fn annulus() -> DyadicComplex {
        let cells: Vec<(i64, i64)> =
            (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|c| *c != (1, 1)).collect();
        grid(&cells, 0)
    }

    fn unit_cube_sphere() -> DyadicComplex {
        let tops = (0..8).map(|c| DyadicCube::top(1, &[c & 1, (c >> 1) & 1, (c >> 2) & 1]));
        DyadicComplex::from_top(tops).unwrap().boundary()
    }

    #[test]
    fn square_is_connected() {
        let cx = ChainComplexZ::from_complex(&grid(&[(0, 0)], 0)).unwrap();
        let z = FgAbelianGroup::integers();
        assert_eq!(homology_group(&cx, 0, &z).unwrap().free_rank(), 1);
        assert!(homology_group(&cx, 1, &z).unwrap().is_trivial());
        assert!(homology_group(&cx, 2, &z).unwrap().is_trivial());
    }

    #[test]
    fn annulus_loop() {
        let cx = ChainComplexZ::from_complex(&annulus()).unwrap();
        let hz = homology_group(&cx, 1, &FgAbelianGroup::integers()).unwrap();
        assert_eq!(hz.free_rank(), 1);
        assert_eq!(hz.summary(), "Z");
        let h2 = homology_group(&cx, 1, &FgAbelianGroup::cyclic(2).unwrap()).unwrap();
        assert_eq!(h2.factors[0].orders, vec![2]);
        let g = hz.factors[0].generators[0].clone();
        assert!(!hz.classify_uniform(&cx, &g).unwrap().is_zero());
        // boundary of one square bounds
        let sq = DyadicCube::top(0, &[0, 0]);
        let mut e = vec![0i64; cx.count(2)];
        e[cx.index_of(&sq).unwrap()] = 1;
        let b = cx.boundary(2, &e).unwrap();
        match hz.classify_uniform(&cx, &b).unwrap() {
            CycleClass::Zero { witness } => assert_eq!(cx.boundary(2, &witness[0]).unwrap(), b),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn torsion_complex() {
        // one vertex, one loop, one disk glued by degree 2
        let cx = ChainComplexZ::from_columns(vec![1, 1, 1], vec![vec![], vec![vec![]], vec![vec![(0, 2)]]]).unwrap();
        let h = homology_group(&cx, 1, &FgAbelianGroup::integers()).unwrap();
        assert_eq!(h.factors[0].orders, vec![2]);
        let h2 = homology_group(&cx, 2, &FgAbelianGroup::cyclic(2).unwrap()).unwrap();
        assert_eq!(h2.factors[0].orders, vec![2]);
        let h3 = homology_group(&cx, 1, &FgAbelianGroup::cyclic(3).unwrap()).unwrap();
        assert!(h3.is_trivial());
        match cycle_class(&cx, 1, &[vec![2]], &FgAbelianGroup::integers()).unwrap() {
            CycleClass::Zero { witness } => assert_eq!(witness, vec![vec![1]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn not_a_cycle() {
        let cx = ChainComplexZ::from_complex(&grid(&[(0, 0)], 0)).unwrap();
        let mut z = vec![0i64; cx.count(1)];
        z[0] = 1;
        let err = cycle_class(&cx, 1, &[z], &FgAbelianGroup::integers()).unwrap_err();
        assert!(matches!(err, Error::NotACycle));
    }

    #[test]
    fn spanning_segment_splits_square() {
        let region = grid(&[(0, 0)], 0);
        let e = PolySet::from_segments(2, &[(Point::from_f64(&[0.5, -0.1]), Point::from_f64(&[0.5, 1.1]))]);
        let m = 4;
        let delta = 2f64.powi(-m) * 2f64.sqrt();
        let (comp, rank) = stable_complement(&region, &e, m, delta, 0).unwrap();
        assert_eq!(rank, 2);
        let cx = ChainComplexZ::from_complex(&comp).unwrap();
        let v = |x: i64, y: i64| DyadicCube::new(m, &[x, y], &[]).unwrap();
        let z = FgAbelianGroup::integers();
        let h = homology_group(&cx, 0, &z).unwrap();
        let apart = cx.chain(0, &[(v(1, 1), 1), (v(15, 15), -1)]).unwrap();
        assert!(!h.classify_uniform(&cx, &apart).unwrap().is_zero());
        let same = cx.chain(0, &[(v(1, 1), 1), (v(3, 14), -1)]).unwrap();
        match h.classify_uniform(&cx, &same).unwrap() {
            CycleClass::Zero { witness } => assert_eq!(cx.boundary(1, &witness[0]).unwrap(), same),
            other => panic!("{other:?}"),
        }
        let full = complement_complex(&region, &PolySet::<f64>::new(2, 1).unwrap(), m, 0.0).unwrap();
        assert_eq!(full.cells(2).len(), 256);
    }

    #[test]
    fn boundary_circle_kernel() {
        let disk = grid(&[(0, 0), (0, 1), (1, 0), (1, 1)], 0);
        let x = ChainComplexZ::from_complex(&disk).unwrap();
        let a = ChainComplexZ::from_complex(&disk.boundary()).unwrap();
        let ker = induced_map_kernel(&a, &x, 1, &FgAbelianGroup::integers()).unwrap();
        assert_eq!(ker[0].generators.len(), 1);
        assert_eq!(ker[0].generators[0].iter().filter(|v| **v != 0).count(), 8);
        let same = induced_map_kernel(&x, &x, 1, &FgAbelianGroup::integers()).unwrap();
        assert!(same[0].generators.is_empty());

        let ann = annulus();
        let x = ChainComplexZ::from_complex(&ann).unwrap();
        let outer = ann.boundary().filter(|c| {
            let (lo, hi) = c.int_bounds(0);
            (0..2).any(|i| hi[i] == 0 || lo[i] == 3)
        });
        let a = ChainComplexZ::from_complex(&outer).unwrap();
        let ker = induced_map_kernel(&a, &x, 1, &FgAbelianGroup::integers()).unwrap();
        assert!(ker[0].generators.is_empty());
    }

    #[test]
    fn alexander_on_cube_sphere() {
        let s = unit_cube_sphere();
        let v = DyadicCube::new(1, &[0, 0, 0], &[]).unwrap();
        let x = DyadicComplex::closure(3, 1, [v]).unwrap();
        let r = alexander_rank_check(&s, &x, None).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().all(|row| row.complement_rank == 0));

        let eq = s.filter(|c| c.dim() <= 1 && !c.has_axis(2) && c.corner[2] == 1);
        assert_eq!(eq.cells(1).len(), 8);
        let r = alexander_rank_check(&s, &eq, Some(1)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.rows[0].complement_rank, 1);
        assert_eq!(r.rows[0].dual_rank, 1);
    }

    #[test]
    fn group_parsing() {
        let g: FgAbelianGroup = "Z^2+Z/2+Z/3".parse().unwrap();
        assert_eq!(g.rank, 2);
        assert_eq!(g.torsion, vec![6]);
        assert_eq!(g.to_string(), "Z^2+Z/6");
        assert!("0".parse::<FgAbelianGroup>().unwrap().is_trivial());
        let g: FgAbelianGroup = "rank 1; torsion 2, 4".parse().unwrap();
        assert_eq!((g.rank, g.torsion.clone()), (1, vec![2, 4]));
        assert_eq!("rank 0".parse::<FgAbelianGroup>().unwrap(), FgAbelianGroup::new(0, &[]).unwrap());
        assert!("rank x".parse::<FgAbelianGroup>().is_err());
    }
}
