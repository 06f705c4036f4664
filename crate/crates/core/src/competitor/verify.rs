use super::cells::{box_complex, cell_complement, default_margin, to_cube_chain, CubeChain};
use super::compare_in_window;
use crate::dyadic::DyadicComplex;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::geomset::{PolySet, Region};
use crate::homology::{induced_map_kernel, ChainComplexZ, Class, FactorHomology, FgAbelianGroup};
use crate::report::fmt_num;
use crate::scalar::{lit, to_f64, Scalar};

/// Complex scale, ambient box and generator budget of the checker.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub scale: i32,
    pub margin: Option<f64>,
    pub u_lo: Vec<f64>,
    pub u_hi: Vec<f64>,
    /// Largest number of test generators examined.
    pub gen_budget: usize,
    /// Repeat at `scale + 1` and require the same ranks and verdict.
    pub check_stability: bool,
    pub tol: f64,
}

impl VerifyOptions {
    pub fn new(n: usize, scale: i32) -> Self {
        VerifyOptions {
            scale,
            margin: None,
            u_lo: vec![-1.0; n],
            u_hi: vec![1.0; n],
            gen_budget: 64,
            check_stability: true,
            tol: 1e-9,
        }
    }
}

/// Fate of one generator of the homology of the common complement outside `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorVerdict {
    pub modulus: i64,
    pub index: usize,
    /// Order of the generator (0 for infinite).
    pub order: i64,
    pub nonzero_in_e: bool,
    pub nonzero_in_f: bool,
    /// Cells carrying the generator, as reported in the verdict.
    pub support: CubeChain,
}

impl GeneratorVerdict {
    pub fn describe(&self) -> String {
        let cells: Vec<String> = self.support.iter().take(4).map(|(c, v)| format!("{v}*{}", c.id())).collect();
        format!(
            "generator {} (coefficients mod {}): {} in E, {} in F; support {}{}",
            self.index,
            self.modulus,
            if self.nonzero_in_e { "nonzero" } else { "zero" },
            if self.nonzero_in_f { "nonzero" } else { "zero" },
            cells.join(" + "),
            if self.support.len() > 4 { " + ..." } else { "" }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompetitorVerdict {
    pub degree: usize,
    pub scale: i32,
    /// `F` preserves every class that is nonzero in the complement of `E`.
    pub competitor: bool,
    /// No test cycle exists outside `B`.
    pub vacuous: bool,
    pub generators: Vec<GeneratorVerdict>,
    /// Cycles outside `B` bounding off `F` but not off `E`.
    pub violations: Vec<GeneratorVerdict>,
    /// Free rank and torsion count of the three complements per scale:
    /// `(scale, outside, E, F)`.
    pub ranks: Vec<(i32, usize, usize, usize)>,
}

impl CompetitorVerdict {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "competitor {}{}\ndegree {} scale {}\n",
            if self.competitor { "yes" } else { "no" },
            if self.vacuous { " (no test cycles outside B)" } else { "" },
            self.degree,
            self.scale
        );
        for (m, o, e, f) in &self.ranks {
            s.push_str(&format!("scale {m}: generators outside B {o}, complement of E {e}, complement of F {f}\n"));
        }
        for g in &self.generators {
            s.push_str(&g.describe());
            s.push('\n');
        }
        for g in &self.violations {
            s.push_str("violation: ");
            s.push_str(&g.describe());
            s.push('\n');
        }
        s
    }
}

fn outside_ball(k: &DyadicComplex, center: &Point<f64>, radius: f64) -> DyadicComplex {
    k.filter(|c| c.aabb::<f64>().dist_point(center) >= radius)
}

fn is_nonzero(h: &FactorHomology, cx: &ChainComplexZ, z: &[i64]) -> Result<bool> {
    Ok(matches!(h.classify(cx, z)?, Class::NonZero { .. }))
}

fn push(z: &[i64], map: &[usize], len: usize) -> Vec<i64> {
    let mut out = vec![0i64; len];
    for (i, v) in z.iter().enumerate() {
        out[map[i]] += v;
    }
    out
}

fn run_scale<T: Scalar>(
    e: &PolySet<T>,
    f: &PolySet<T>,
    center: &Point<f64>,
    radius: f64,
    g: &FgAbelianGroup,
    deg: usize,
    m: i32,
    opts: &VerifyOptions,
) -> Result<CompetitorVerdict> {
    let n = e.n;
    let margin = opts.margin.map_or_else(|| default_margin(n, m), |x| x * 2f64.powi(opts.scale - m));
    let delta: T = lit(margin);
    let u = box_complex(n, m, &opts.u_lo, &opts.u_hi)?;
    let c_e = cell_complement(&u, e, delta)?;
    let c_f = cell_complement(&u, f, delta)?;
    let common = c_e.filter(|c| c_f.contains(c));
    let c_out = outside_ball(&common, center, radius);
    let cx_e = ChainComplexZ::from_complex(&c_e)?.reduced();
    let cx_f = ChainComplexZ::from_complex(&c_f)?.reduced();
    let cx_out = ChainComplexZ::from_complex(&c_out)?.reduced();
    let map_e = cx_e.inclusion(&cx_out, deg)?;
    let map_f = cx_f.inclusion(&cx_out, deg)?;
    let kern = induced_map_kernel(&cx_out, &cx_f, deg, g)?;
    let mut generators = Vec::new();
    let mut violations = Vec::new();
    let mut counts = (0, 0, 0);
    for kf in &kern {
        let q = kf.modulus;
        let h_out = FactorHomology::compute(&cx_out, deg, q)?;
        let h_e = FactorHomology::compute(&cx_e, deg, q)?;
        let h_f = FactorHomology::compute(&cx_f, deg, q)?;
        counts.0 += h_out.orders.len();
        counts.1 += h_e.orders.len();
        counts.2 += h_f.orders.len();
        if h_out.generators.len() > opts.gen_budget {
            return Err(Error::Exhausted(format!(
                "{} test generators exceed the budget {}",
                h_out.generators.len(),
                opts.gen_budget
            )));
        }
        for (i, z) in h_out.generators.iter().enumerate() {
            generators.push(GeneratorVerdict {
                modulus: q,
                index: i,
                order: h_out.orders[i],
                nonzero_in_e: is_nonzero(&h_e, &cx_e, &push(z, &map_e, cx_e.count(deg)))?,
                nonzero_in_f: is_nonzero(&h_f, &cx_f, &push(z, &map_f, cx_f.count(deg)))?,
                support: to_cube_chain(&cx_out, deg, z),
            });
        }
        for (i, z) in kf.generators.iter().enumerate() {
            if is_nonzero(&h_e, &cx_e, &push(z, &map_e, cx_e.count(deg)))? {
                violations.push(GeneratorVerdict {
                    modulus: q,
                    index: i,
                    order: 0,
                    nonzero_in_e: true,
                    nonzero_in_f: false,
                    support: to_cube_chain(&cx_out, deg, z),
                });
            }
        }
    }
    Ok(CompetitorVerdict {
        degree: deg,
        scale: m,
        competitor: violations.is_empty(),
        vacuous: generators.is_empty(),
        generators,
        violations,
        ranks: vec![(m, counts.0, counts.1, counts.2)],
    })
}

/// Checks that `F` is a topological competitor of `E` in the ball `B`:
/// every cycle of the complement outside `B` that is nonzero in reduced
/// homology of degree `n - d - 1` off `E` stays nonzero off `F`.
pub fn verify_topological_competitor<T: Scalar>(
    e: &PolySet<T>,
    f: &PolySet<T>,
    center: &Point<T>,
    radius: T,
    g: &FgAbelianGroup,
    opts: &VerifyOptions,
) -> Result<CompetitorVerdict> {
    if e.n != f.n || e.d != f.d {
        return Err(Error::Invalid("E and F differ in dimension".into()));
    }
    let (n, d) = (e.n, e.d);
    if d >= n {
        return Err(Error::Precondition(format!("need d < n, got d = {d}, n = {n}")));
    }
    if g.is_trivial() {
        return Err(Error::Precondition("coefficient group is trivial".into()));
    }
    let outside = Region::open_ball(*center, radius).not();
    let cmp = compare_in_window(e, f, &outside, opts.tol)?;
    if !cmp.equal {
        return Err(Error::Precondition(format!(
            "E and F differ outside B (excess {}, measure gap {})",
            fmt_num(cmp.excess),
            fmt_num(cmp.measure_gap)
        )));
    }
    let deg = n - d - 1;
    let c: Vec<f64> = (0..n).map(|i| to_f64(center[i])).collect();
    let c = Point::from_f64(&c);
    let r = to_f64(radius);
    let mut v = run_scale(e, f, &c, r, g, deg, opts.scale, opts)?;
    if opts.check_stability {
        let w = run_scale(e, f, &c, r, g, deg, opts.scale + 1, opts)?;
        let (a, b) = (v.ranks[0], w.ranks[0]);
        if (a.1, a.2, a.3) != (b.1, b.2, b.3) || v.competitor != w.competitor {
            return Err(Error::Unstable(format!(
                "complements change under refinement: scale {} gives ({}, {}, {}), scale {} gives ({}, {}, {})",
                a.0, a.1, a.2, a.3, b.0, b.1, b.2, b.3
            )));
        }
        v.ranks.push(b);
    }
    Ok(v)
}
