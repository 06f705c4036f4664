use std::collections::BTreeSet;

use rayon::prelude::*;

use super::cells::{
    box_complex, cell_complement, cells_by_domain, chain_axpy, chain_boundary, chain_misses, default_margin,
    domain_complex, from_cube_chain, to_cube_chain, CubeChain,
};
use super::glue::{weld_check, GlueOutput};
use crate::dyadic::{DyadicComplex, DyadicCube};
use crate::error::{Error, Result};
use crate::geom::Aabb;
use crate::geomset::PolySet;
use crate::homology::{
    induced_map_kernel, induced_matrix, smith_normal_form, ChainComplexZ, Class, FactorHomology, FgAbelianGroup,
    IntMatrix,
};
use crate::scalar::{lit, Scalar};

/// Scale, margin and ambient box of the certificate complexes.
#[derive(Clone, Debug, PartialEq)]
pub struct CertOptions {
    pub scale: i32,
    /// Complement margin (defaults to just above the cube diameter).
    pub margin: Option<f64>,
    /// Corners of the ambient box `U`, lattice points at `scale`.
    pub u_lo: Vec<f64>,
    pub u_hi: Vec<f64>,
    /// Dilation margin of `D2`.
    pub eps2: f64,
    /// Tolerance of the weld-trace comparison.
    pub tol: f64,
}

impl CertOptions {
    /// Options matching a gluing run, with `U = [-1, 1]^n`.
    pub fn for_run<T>(out: &GlueOutput<T>) -> Self {
        let n = out.ledger.n;
        let p = &out.ledger.params;
        CertOptions {
            scale: p.cert_scale(),
            margin: None,
            u_lo: vec![-1.0; n],
            u_hi: vec![1.0; n],
            eps2: p.eps2,
            tol: p.tol.max(1e-12),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepVerdict {
    pub step: usize,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl StepVerdict {
    fn new(step: usize, name: &str, pass: bool, detail: String) -> Self {
        StepVerdict { step, name: name.into(), pass, detail }
    }
}

/// Witnesses built once for the glued family, one entry per kernel generator.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelWitness {
    pub modulus: i64,
    /// `a_i`: cycle of `∂D0` bounding in the complement of `F'` inside `D0`.
    pub a: CubeChain,
    /// `γ_i`: the same class pushed off `|T'|`.
    pub gamma: CubeChain,
    /// `Γ_i` with `∂Γ_i = γ_i` in the complement of `E`.
    pub big_gamma: CubeChain,
}

/// Step 5 witness for one test cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct TestCycleWitness {
    pub modulus: i64,
    pub sigma: CubeChain,
    /// Coefficients of `σ0` on the kernel generators.
    pub g: Vec<i64>,
    /// `Θ` with `∂Θ = σ` off `E_k`.
    pub theta: CubeChain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KCertificate {
    pub k: u64,
    pub steps: Vec<StepVerdict>,
    pub witnesses: Vec<TestCycleWitness>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub degree: usize,
    pub scale: i32,
    pub margin: f64,
    /// Steps 1 to 3, shared by every member.
    pub steps: Vec<StepVerdict>,
    pub kernel: Vec<KernelWitness>,
    /// Step 4: `(k, Γ misses E_k)` for every member.
    pub misses: Vec<(u64, bool)>,
    /// First index from which `Γ` misses every later member.
    pub k3: Option<u64>,
    pub per_k: Vec<KCertificate>,
    pub pass: bool,
}

fn eq_chains(a: &CubeChain, b: &CubeChain, q: i64) -> Result<bool> {
    Ok(chain_axpy(a, -1, b, q)?.is_empty())
}

/// Integer solution of `m x = c` modulo the generator orders (rows with
/// order 0 are exact equations); `None` when unsolvable.
fn solve_mod_orders(m: &IntMatrix, orders: &[i64], c: &[i64]) -> Result<Option<Vec<i64>>> {
    let rows = orders.len();
    if rows == 0 {
        return Ok(Some(vec![0; m.cols]));
    }
    let rel: Vec<usize> = (0..rows).filter(|i| orders[*i] != 0).collect();
    let mut a = IntMatrix::zeros(rows, m.cols + rel.len());
    for i in 0..rows {
        for j in 0..m.cols {
            a.set(i, j, m.get(i, j));
        }
    }
    for (j, &i) in rel.iter().enumerate() {
        a.set(i, m.cols + j, orders[i]);
    }
    let s = smith_normal_form(&a)?;
    let uc = s.u.mul_vec(c)?;
    let mut y = vec![0i64; a.cols];
    for (i, v) in uc.iter().enumerate() {
        if i < s.rank() {
            if v % s.diag[i] != 0 {
                return Ok(None);
            }
            y[i] = v / s.diag[i];
        } else if *v != 0 {
            return Ok(None);
        }
    }
    let x = s.v.mul_vec(&y)?;
    Ok(Some(x[..m.cols].to_vec()))
}

fn coords(h: &FactorHomology, cx: &ChainComplexZ, z: &[i64]) -> Result<Vec<i64>> {
    Ok(match h.classify(cx, z)? {
        Class::Zero { .. } => vec![0; h.orders.len()],
        Class::NonZero { coords } => coords,
    })
}

/// Witness `w` with `∂w = z` in `cx`, checked on cube chains.
fn bounding_chain(h: &FactorHomology, cx: &ChainComplexZ, z: &CubeChain) -> Result<Option<CubeChain>> {
    let q = h.modulus;
    let v = from_cube_chain(cx, h.degree, z)?;
    match h.classify(cx, &v)? {
        Class::Zero { witness } => {
            let w = to_cube_chain(cx, h.degree + 1, &witness);
            if !eq_chains(&chain_boundary(&w, q)?, z, q)? {
                return Err(Error::Check("bounding chain fails its boundary equation".into()));
            }
            Ok(Some(w))
        }
        Class::NonZero { .. } => Ok(None),
    }
}

fn boxes_of(k: &DyadicComplex) -> Vec<Aabb<f64>> {
    k.iter().map(|c| c.aabb::<f64>()).collect()
}

fn first_stable(flags: &[(u64, bool)]) -> Option<u64> {
    let mut out = None;
    for &(k, ok) in flags.iter().rev() {
        if !ok {
            break;
        }
        out = Some(k);
    }
    out
}

struct Shared<'a> {
    cx_a: &'a ChainComplexZ,
    per_mod: Vec<ModData>,
}

struct ModData {
    q: i64,
    ha: FactorHomology,
    /// Coordinates of each kernel generator in `H(A)`, as columns.
    kmat: IntMatrix,
    gammas: Vec<CubeChain>,
    big_gammas: Vec<CubeChain>,
}

/// Runs the certificate that each glued `F_k` is a topological competitor
/// for `E_k` inside `D2°`, in reduced homology of degree `n - d - 1`.
pub fn competitor_certificate<T: Scalar>(
    out: &GlueOutput<T>,
    g: &FgAbelianGroup,
    opts: &CertOptions,
) -> Result<Certificate> {
    let n = out.ledger.n;
    let d = out.ledger.d;
    if d + 1 > n {
        return Err(Error::Precondition(format!("need d < n, got d = {d}, n = {n}")));
    }
    if g.is_trivial() {
        return Err(Error::Precondition("coefficient group is trivial".into()));
    }
    let deg = n - d - 1;
    let mc = opts.scale;
    let margin = opts.margin.unwrap_or_else(|| default_margin(n, mc));
    let delta: T = lit(margin);
    let d0 = &out.domain;
    let region_u = box_complex(n, mc, &opts.u_lo, &opts.u_hi)?;
    let dom = domain_complex(d0, mc)?;
    if !dom.is_subcomplex_of(&region_u) {
        return Err(Error::Precondition("the domain is not inside the ambient box".into()));
    }
    let bd = d0.boundary_complex().refine(mc);
    let mut steps = Vec::new();

    // step 1: H = ker(H(A) -> H(X))
    let x = cell_complement(&dom, &out.f_prime, delta)?;
    let a = x.filter(|c| bd.contains(c));
    let cx_x = ChainComplexZ::from_complex(&x)?.reduced();
    let cx_a = ChainComplexZ::from_complex(&a)?.reduced();
    let kern = induced_map_kernel(&cx_a, &cx_x, deg, g)?;
    let rank: usize = kern.iter().map(|f| f.generators.len()).sum();
    steps.push(StepVerdict::new(
        1,
        "kernel of the boundary inclusion",
        true,
        format!("{rank} generator(s); {} boundary cells, {} domain cells", a.len(), x.len()),
    ));

    // step 2: push each generator off |T'|
    let tp = boxes_of(&out.nb.t_prime);
    let a_off = a.filter(|c| {
        let b = c.aabb::<f64>();
        !tp.iter().any(|t| t.intersects(&b))
    });
    let cx_ap = ChainComplexZ::from_complex(&a_off)?.reduced();
    let map = cx_a.inclusion(&cx_ap, deg)?;
    let mut kernel = Vec::new();
    let mut per_mod = Vec::new();
    let mut step2 = Ok(());
    for f in &kern {
        let q = f.modulus;
        let ha = FactorHomology::compute(&cx_a, deg, q)?;
        let hap = FactorHomology::compute(&cx_ap, deg, q)?;
        let mat = induced_matrix(&hap, &ha, &cx_a, &map)?;
        let mut kmat = IntMatrix::zeros(ha.orders.len(), f.generators.len());
        let mut gammas = Vec::new();
        for (i, ai) in f.generators.iter().enumerate() {
            let c = coords(&ha, &cx_a, ai)?;
            for (r, v) in c.iter().enumerate() {
                kmat.set(r, i, *v);
            }
            let Some(gc) = solve_mod_orders(&mat, &ha.orders, &c)? else {
                step2 = Err(format!("generator {i} (coefficients mod {q}) has no preimage off |T'|"));
                break;
            };
            let mut gamma = CubeChain::new();
            for (j, gj) in gc.iter().enumerate() {
                gamma = chain_axpy(&gamma, *gj, &to_cube_chain(&cx_ap, deg, &hap.generators[j]), q)?;
            }
            let a_chain = to_cube_chain(&cx_a, deg, ai);
            let diff = chain_axpy(&a_chain, -1, &gamma, q)?;
            if bounding_chain(&ha, &cx_a, &diff)?.is_none() {
                step2 = Err(format!("pushed generator {i} differs from a_{i} in the boundary"));
                break;
            }
            if gamma.keys().any(|c| {
                let b = c.aabb::<f64>();
                tp.iter().any(|t| t.intersects(&b))
            }) {
                step2 = Err(format!("pushed generator {i} meets |T'|"));
                break;
            }
            kernel.push(KernelWitness { modulus: q, a: a_chain, gamma: gamma.clone(), big_gamma: CubeChain::new() });
            gammas.push(gamma);
        }
        per_mod.push(ModData { q, ha, kmat, gammas, big_gammas: Vec::new() });
        if step2.is_err() {
            break;
        }
    }
    let pushed = step2.is_ok();
    steps.push(StepVerdict::new(
        2,
        "generators pushed off |T'|",
        pushed,
        match &step2 {
            Ok(()) => format!("{} cycle(s) in {} boundary cells away from |T'|", kernel.len(), a_off.len()),
            Err(e) => e.clone(),
        },
    ));

    // step 3: bounding chains in the complement of E
    let mut step3 = Ok(());
    if pushed {
        let c_e = cell_complement(&region_u, &out.e, delta)?;
        let cx_e = ChainComplexZ::from_complex(&c_e)?.reduced();
        let mut w = 0;
        'mods: for md in &mut per_mod {
            let he = FactorHomology::compute(&cx_e, deg, md.q)?;
            for (i, gamma) in md.gammas.iter().enumerate() {
                if let Some(c) = gamma.keys().find(|c| cx_e.index_of(c).is_none()) {
                    step3 = Err(format!("γ_{i} leaves the complement of E at cell {}", c.id()));
                    break 'mods;
                }
                match bounding_chain(&he, &cx_e, gamma)? {
                    Some(bg) => {
                        kernel[w].big_gamma = bg.clone();
                        md.big_gammas.push(bg);
                    }
                    None => {
                        step3 = Err(format!("γ_{i} does not bound in the complement of E"));
                        break 'mods;
                    }
                }
                w += 1;
            }
        }
    } else {
        step3 = Err("skipped after step 2".into());
    }
    let bounded = step3.is_ok();
    steps.push(StepVerdict::new(
        3,
        "bounding chains in the complement of E",
        bounded,
        match &step3 {
            Ok(()) => {
                let cells: usize = kernel.iter().map(|k| k.big_gamma.len()).sum();
                format!("{} chain(s), {cells} cells in total", kernel.len())
            }
            Err(e) => e.clone(),
        },
    ));

    // step 4: Γ misses E_k
    let misses: Vec<(u64, bool)> = out
        .entries
        .par_iter()
        .map(|en| (en.k, bounded && kernel.iter().all(|kw| chain_misses(&kw.big_gamma, &en.e_k))))
        .collect();
    let k3 = if bounded { first_stable(&misses) } else { None };

    // step 5, per glued member
    let shared = Shared { cx_a: &cx_a, per_mod };
    let outside_d2 = 1.0 + opts.eps2;
    let per_k: Vec<KCertificate> = if bounded {
        out.entries
            .par_iter()
            .filter_map(|en| en.f_k.as_ref().map(|fk| (en, fk)))
            .map(|(en, fk)| {
                let miss = misses.iter().find(|m| m.0 == en.k).map(|m| m.1).unwrap_or(false);
                certify_member(out, en.k, &en.e_k, fk, &shared, &region_u, &bd, deg, g, delta, outside_d2, miss, opts)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let shared_ok = steps.iter().all(|s| s.pass);
    let pass = shared_ok
        && k3.is_some_and(|k3| {
            let tail: Vec<&KCertificate> = per_k.iter().filter(|c| c.k >= k3).collect();
            !tail.is_empty() && tail.iter().all(|c| c.pass)
        });
    Ok(Certificate { degree: deg, scale: mc, margin, steps, kernel, misses, k3, per_k, pass })
}

#[allow(clippy::too_many_arguments)]
fn certify_member<T: Scalar>(
    out: &GlueOutput<T>,
    k: u64,
    e_k: &PolySet<T>,
    f_k: &PolySet<T>,
    shared: &Shared<'_>,
    region_u: &DyadicComplex,
    bd: &DyadicComplex,
    deg: usize,
    g: &FgAbelianGroup,
    delta: T,
    outside_d2: f64,
    gamma_misses: bool,
    opts: &CertOptions,
) -> Result<KCertificate> {
    let d0 = &out.domain;
    let mut steps = Vec::new();
    let weld = weld_check(f_k, d0, &out.nb.t_prime_d, opts.tol)?;
    steps.push(StepVerdict::new(
        1,
        "weld trace F_k ∩ ∂D0 = |T'^d|",
        weld.ok,
        format!("{} trace pieces, {} stray, {} uncovered weld cells", weld.trace_pieces, weld.stray, weld.uncovered),
    ));
    steps.push(StepVerdict::new(
        4,
        "Γ misses E_k",
        gamma_misses,
        if gamma_misses { "no cell of Γ meets E_k".into() } else { "a cell of Γ meets E_k".into() },
    ));
    let c_f = cell_complement(region_u, f_k, delta)?;
    let out_cells: BTreeSet<DyadicCube> = cells_by_domain(&c_f, d0, outside_d2, false).into_iter().collect();
    let c_out = c_f.filter(|c| out_cells.contains(c));
    let inside: BTreeSet<DyadicCube> = cells_by_domain(&c_f, d0, 1.0, true).into_iter().filter(|c| !bd.contains(c)).collect();
    let cx_f = ChainComplexZ::from_complex(&c_f)?.reduced();
    let cx_out = ChainComplexZ::from_complex(&c_out)?.reduced();
    let kern = induced_map_kernel(&cx_out, &cx_f, deg, g)?;
    let mut witnesses = Vec::new();
    let mut failure: Option<(usize, String, String)> = None;
    let tests: usize = kern.iter().map(|f| f.generators.len()).sum();
    'mods: for f in &kern {
        let q = f.modulus;
        let md = shared.per_mod.iter().find(|m| m.q == q).ok_or_else(|| Error::Check(format!("no kernel data mod {q}")))?;
        let hf = FactorHomology::compute(&cx_f, deg, q)?;
        for (i, s) in f.generators.iter().enumerate() {
            let sigma = to_cube_chain(&cx_out, deg, s);
            if !chain_misses(&sigma, e_k) {
                failure = Some((5, "test cycles".into(), format!("σ_{i} meets E_k")));
                break 'mods;
            }
            let Some(big_sigma) = bounding_chain(&hf, &cx_f, &sigma)? else {
                return Err(Error::Check(format!("kernel test cycle σ_{i} does not bound in the complement of F_k")));
            };
            let sigma0_cells: CubeChain = big_sigma.iter().filter(|(c, _)| inside.contains(c)).map(|(c, v)| (*c, *v)).collect();
            let sigma0 = chain_boundary(&sigma0_cells, q)?;
            if let Some(c) = sigma0.keys().find(|c| shared.cx_a.index_of(c).is_none()) {
                failure = Some((5, "decomposition".into(), format!("∂Σ0 of σ_{i} leaves A at cell {}", c.id())));
                break 'mods;
            }
            let c0 = coords(&md.ha, shared.cx_a, &from_cube_chain(shared.cx_a, deg, &sigma0)?)?;
            let Some(gc) = solve_mod_orders(&md.kmat, &md.ha.orders, &c0)? else {
                failure = Some((5, "decomposition".into(), format!("∂Σ0 of σ_{i} is not in the kernel span")));
                break 'mods;
            };
            let mut sigma1 = CubeChain::new();
            let mut theta = CubeChain::new();
            for (j, gj) in gc.iter().enumerate() {
                sigma1 = chain_axpy(&sigma1, *gj, &md.gammas[j], q)?;
                theta = chain_axpy(&theta, *gj, &md.big_gammas[j], q)?;
            }
            let diff = chain_axpy(&sigma0, -1, &sigma1, q)?;
            let Some(w_a) = bounding_chain(&md.ha, shared.cx_a, &diff)? else {
                failure = Some((5, "decomposition".into(), format!("σ0 - σ1 of σ_{i} does not bound in A")));
                break 'mods;
            };
            let rest = chain_axpy(&big_sigma, -1, &sigma0_cells, q)?;
            let sigma2 = chain_axpy(&rest, 1, &w_a, q)?;
            theta = chain_axpy(&theta, 1, &sigma2, q)?;
            if !eq_chains(&chain_boundary(&theta, q)?, &sigma, q)? {
                failure = Some((5, "assembly".into(), format!("∂Θ ≠ σ_{i}")));
                break 'mods;
            }
            if !chain_misses(&theta, e_k) {
                failure = Some((5, "assembly".into(), format!("Θ for σ_{i} meets E_k")));
                break 'mods;
            }
            witnesses.push(TestCycleWitness { modulus: q, sigma, g: gc, theta });
        }
    }
    match failure {
        Some((step, name, detail)) => steps.push(StepVerdict::new(step, &name, false, detail)),
        None => steps.push(StepVerdict::new(
            5,
            "∂Θ = σ off E_k",
            true,
            format!("{tests} test cycle(s) outside D2° bounding off F_k, all bound off E_k"),
        )),
    }
    let pass = steps.iter().all(|s| s.pass);
    Ok(KCertificate { k, steps, witnesses, pass })
}

/// `coef scale dim corner... axes...` per line.
pub fn chain_text(z: &CubeChain) -> String {
    let mut s = String::new();
    for (c, v) in z {
        s.push_str(&format!("{v} {}\n", c.to_line()));
    }
    s
}

impl Certificate {
    /// Plain-text report with one line per step verdict.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = |p: bool| if p { "pass" } else { "fail" };
        s.push_str(&format!("certificate {}\n", verdict(self.pass)));
        s.push_str(&format!("degree {} scale {} margin {}\n", self.degree, self.scale, crate::report::fmt_num(self.margin)));
        for st in &self.steps {
            s.push_str(&format!("step {} {}: {} ({})\n", st.step, verdict(st.pass), st.name, st.detail));
        }
        for (i, kw) in self.kernel.iter().enumerate() {
            s.push_str(&format!(
                "generator {i} mod {}: |a| = {}, |γ| = {}, |Γ| = {}\n",
                kw.modulus,
                kw.a.len(),
                kw.gamma.len(),
                kw.big_gamma.len()
            ));
        }
        for (k, ok) in &self.misses {
            s.push_str(&format!("k {k}: Γ {} E_k\n", if *ok { "misses" } else { "meets" }));
        }
        match self.k3 {
            Some(k) => s.push_str(&format!("k3 {k}\n")),
            None => s.push_str("k3 none\n"),
        }
        for c in &self.per_k {
            s.push_str(&format!("k {} {}\n", c.k, verdict(c.pass)));
            for st in &c.steps {
                s.push_str(&format!("  step {} {}: {} ({})\n", st.step, verdict(st.pass), st.name, st.detail));
            }
        }
        s
    }

    /// Witness chains as `(file name, contents)` pairs.
    pub fn witness_files(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        for (i, kw) in self.kernel.iter().enumerate() {
            files.push((format!("a_{i}.chain"), chain_text(&kw.a)));
            files.push((format!("gamma_{i}.chain"), chain_text(&kw.gamma)));
            files.push((format!("big_gamma_{i}.chain"), chain_text(&kw.big_gamma)));
        }
        for c in &self.per_k {
            for (j, w) in c.witnesses.iter().enumerate() {
                files.push((format!("k{}_sigma_{j}.chain", c.k), chain_text(&w.sigma)));
                files.push((format!("k{}_theta_{j}.chain", c.k), chain_text(&w.theta)));
            }
        }
        files
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_modulo_orders() {
        // Z/4 target, image generated by 2
        let m = IntMatrix::from_rows(&[vec![2]]).unwrap();
        assert_eq!(solve_mod_orders(&m, &[4], &[2]).unwrap().map(|x| (2 * x[0]).rem_euclid(4)), Some(2));
        assert!(solve_mod_orders(&m, &[4], &[1]).unwrap().is_none());
        // over Z
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![0, 3]]).unwrap();
        let x = solve_mod_orders(&m, &[0, 0], &[4, 6]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![4, 6]);
        assert!(solve_mod_orders(&m, &[0, 0], &[0, 1]).unwrap().is_none());
    }
}
