use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use rayon::prelude::*;

use super::compare_in_window;
use super::params::GlueParams;
use super::slice::{boundary_trace, select_slice};
use crate::dyadic::{cubes_meeting, neighborhood_complexes_checked, Domain, DyadicComplex, DyadicCube, Neighborhoods, RegimeCheck};
use crate::error::{Error, Result};
use crate::ffproj::{face_simplices, ff_project_local, grid_split, ProjectionRecord};
use crate::geom::{Aabb, Point};
use crate::geomset::{PolySet, Region, SetSequence};
use crate::report::{csv_row, fmt_num};
use crate::scalar::{lit, to_f64, Scalar};

/// Measured quantities of one sequence member.
#[derive(Clone, Debug, PartialEq)]
pub struct KTerms {
    pub k: u64,
    /// `E_k` meets the half shell only inside `|S|°`.
    pub contained: bool,
    /// Why the member was not glued.
    pub skipped: Option<String>,
    /// `H(E_k)` in the shell of half-width `t1` (diagnostic).
    pub shell_t1: f64,
    /// `H(φ_k(E_k ∩ W))` for the weld windows `W`.
    pub phi_cost: f64,
    /// `H(E_k ∩ D2° \ D0°)`.
    pub outer: f64,
    /// `H(E_k ∩ D0°)`.
    pub ek_d0_open: f64,
    /// `H(E_k ∩ D2°)`.
    pub ek_d2: f64,
    /// `H(φ_k(E_k) ∩ D2° \ D0°)`.
    pub p1: f64,
    /// `H(F_k ∩ D2°)`, measured on the assembled set.
    pub fk_d2: f64,
    /// `H(E_k ∩ D2°) - A/8 - H(F_k ∩ D2°)`.
    pub slack: f64,
    pub outside_equal: bool,
    pub weld: Option<WeldCheck>,
    /// Largest after/before ratio among the radial projections of `φ_k`.
    pub max_ratio: f64,
}

impl KTerms {
    fn skipped(k: u64, contained: bool, shell_t1: f64, reason: String) -> Self {
        KTerms {
            k,
            contained,
            skipped: Some(reason),
            shell_t1,
            phi_cost: 0.0,
            outer: 0.0,
            ek_d0_open: 0.0,
            ek_d2: 0.0,
            p1: 0.0,
            fk_d2: 0.0,
            slack: 0.0,
            outside_equal: false,
            weld: None,
            max_ratio: 0.0,
        }
    }

    pub fn glued(&self) -> bool {
        self.skipped.is_none()
    }
}

/// `F_k ∩ ∂D0` against `|T'^d|`, both inclusions.
#[derive(Clone, Debug, PartialEq)]
pub struct WeldCheck {
    /// Pieces of `F_k ∩ ∂D0` (transversal and lying in the boundary).
    pub trace_pieces: usize,
    /// Pieces not contained in `|T'^d|`.
    pub stray: usize,
    /// Cells of `T'^d` not covered by `F_k`.
    pub uncovered: usize,
    pub ok: bool,
}

/// Full record of one gluing run.
#[derive(Clone, Debug, PartialEq)]
pub struct GlueLedger {
    pub params: GlueParams,
    pub n: usize,
    pub d: usize,
    pub r0: f64,
    pub slice_measure: f64,
    /// `B1 ⊂ D1° ⊂ D1 ⊂ D0 ⊂ D2 ⊂ B2` for the built domain.
    pub chain_ok: bool,
    pub e_b1: f64,
    pub f_b1: f64,
    /// `H(E ∩ B1) - H(F ∩ B1)`.
    pub a: f64,
    pub e_d0: f64,
    pub f_d0: f64,
    /// `H(|S'^d|)`.
    pub s_prime_d: f64,
    /// `H(ψ(F ∩ W))`.
    pub psi_cost: f64,
    /// `H(ψ(F) ∩ D0)`.
    pub p2: f64,
    pub weld_cells: usize,
    pub windows: usize,
    pub warnings: Vec<String>,
    pub k_terms: Vec<KTerms>,
    /// First index from which every later member lies in `|S|°` near `∂D0`.
    pub k1: Option<u64>,
    /// First glued index from which the final inequality holds for every later one.
    pub k2: Option<u64>,
}

/// One glued (or skipped) member of the sequence.
#[derive(Clone, Debug)]
pub struct KEntry<T> {
    pub k: u64,
    pub e_k: PolySet<T>,
    pub f_k: Option<PolySet<T>>,
}

#[derive(Clone, Debug)]
pub struct GlueOutput<T> {
    pub ledger: GlueLedger,
    pub entries: Vec<KEntry<T>>,
    pub domain: Arc<Domain>,
    pub nb: Neighborhoods,
    /// Limit set and replacement after normalization `r0 = 1`.
    pub e: PolySet<T>,
    pub f: PolySet<T>,
    /// `ψ(F) ∪ |S'^d|`.
    pub f_prime: PolySet<T>,
}

/// Connected clusters of `Q'` as disjoint closed boxes.
fn windows<T: Scalar>(nb: &Neighborhoods) -> Vec<Aabb<T>> {
    let cubes: BTreeSet<DyadicCube> = nb.q_prime.iter().copied().collect();
    let mut seen: BTreeSet<DyadicCube> = BTreeSet::new();
    let mut boxes: Vec<Aabb<T>> = Vec::new();
    for c in &cubes {
        if seen.contains(c) {
            continue;
        }
        seen.insert(*c);
        let mut bx = c.aabb::<T>();
        let mut queue = VecDeque::from([*c]);
        while let Some(x) = queue.pop_front() {
            for y in x.neighbors() {
                if cubes.contains(&y) && seen.insert(y) {
                    let b = y.aabb::<T>();
                    for i in 0..bx.n {
                        bx.lo[i] = bx.lo[i].min(b.lo[i]);
                        bx.hi[i] = bx.hi[i].max(b.hi[i]);
                    }
                    queue.push_back(y);
                }
            }
        }
        boxes.push(bx);
    }
    // merge until the closed boxes are pairwise disjoint
    loop {
        let mut merged = false;
        'scan: for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].intersects(&boxes[j]) {
                    let b = boxes.remove(j);
                    for a in 0..b.n {
                        boxes[i].lo[a] = boxes[i].lo[a].min(b.lo[a]);
                        boxes[i].hi[a] = boxes[i].hi[a].max(b.hi[a]);
                    }
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            return boxes;
        }
    }
}

/// Local projection onto `S'` of the part of the set inside the windows.
/// Returns the image of that part, the untouched rest and the projection log.
fn project_in_windows<T: Scalar>(
    set: &PolySet<T>,
    wins: &[Aabb<T>],
    s_prime: &DyadicComplex,
    seed: u64,
) -> Result<(PolySet<T>, PolySet<T>, Vec<ProjectionRecord<T>>)> {
    if wins.is_empty() {
        return Ok((PolySet::new(set.n, set.d)?, set.clone(), Vec::new()));
    }
    let mut inside = PolySet::new(set.n, set.d)?;
    for w in wins {
        inside.extend(&set.restrict(&Region::closed_box(*w))?)?;
    }
    let rest_region = Region::And(wins.iter().map(|w| Region::open_box(*w).not()).collect());
    let rest = set.restrict(&rest_region)?;
    let out = ff_project_local(&inside, s_prime, seed)?;
    Ok((out.set, rest, out.records))
}

/// Pieces of `|T'^d|` as simplices.
fn weld_set<T: Scalar>(k: &DyadicComplex, n: usize, d: usize) -> PolySet<T> {
    let mut s = PolySet { n, d, simplices: Vec::new() };
    for c in k.cells(d) {
        s.simplices.extend(face_simplices::<T>(&c));
    }
    s
}

fn near_support<T: Scalar>(k: &DyadicComplex, p: &Point<T>, tol: T) -> bool {
    k.iter().any(|c| c.aabb::<T>().dist_point(p) <= tol)
}

/// Both inclusions of `F_k ∩ ∂D0 = |T'^d|`.
pub(crate) fn weld_check<T: Scalar>(
    fk: &PolySet<T>,
    d0: &Arc<Domain>,
    t_prime_d: &DyadicComplex,
    tol: f64,
) -> Result<WeldCheck> {
    let n = fk.n;
    let d = fk.d;
    let m = t_prime_d.scale;
    let t: T = lit(tol);
    let trace = boundary_trace(fk, d0, T::one())?;
    let mut stray = 0;
    for piece in trace.pieces.iter().chain(&trace.overlaps) {
        let parts = if piece.len() == 1 { vec![piece.clone()] } else { grid_split(piece, n, m) };
        let ok = parts.iter().all(|s| {
            let mut c = Point::zero();
            for p in s {
                c = c + *p;
            }
            let c = c * (T::one() / lit::<T>(s.len() as f64));
            s.iter().chain(std::iter::once(&c)).all(|p| near_support(t_prime_d, p, t))
        });
        if !ok {
            stray += 1;
        }
    }
    let mut uncovered = 0;
    for c in t_prime_d.iter() {
        let covered = if c.dim() < d {
            to_f64(fk.dist_to(&c.aabb::<T>().lo)) <= tol && to_f64(fk.dist_to(&c.aabb::<T>().hi)) <= tol
        } else if c.dim() == d {
            let have = to_f64(fk.measure(&Region::closed_box(c.aabb::<T>()))?);
            have >= to_f64(c.volume::<T>()) - tol
        } else {
            true
        };
        if !covered {
            uncovered += 1;
        }
    }
    let pieces = trace.pieces.len() + trace.overlaps.len();
    Ok(WeldCheck { trace_pieces: pieces, stray, uncovered, ok: stray == 0 && uncovered == 0 })
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

/// Runs the gluing construction for the selected members of the sequence.
pub fn glue_competitor<T: Scalar>(
    seq: &SetSequence<T>,
    e: &PolySet<T>,
    f: &PolySet<T>,
    params: &GlueParams,
) -> Result<GlueOutput<T>> {
    params.validate()?;
    let (n, d) = (e.n, e.d);
    if f.n != n || f.d != d {
        return Err(Error::Invalid("E and F differ in dimension".into()));
    }
    if d == 0 || d >= n {
        return Err(Error::Precondition(format!("need 0 < d < n, got d = {d}, n = {n}")));
    }
    if seq.is_empty() {
        return Err(Error::Invalid("empty sequence".into()));
    }
    if seq.sets[0].n != n || seq.sets[0].d != d {
        return Err(Error::Invalid("sequence members differ in dimension from E".into()));
    }
    let tol = params.tol;
    let origin = Point::<T>::zero();
    let outside_b1 = Region::open_ball(origin, lit(params.r1)).not();
    let cmp = compare_in_window(e, f, &outside_b1, tol)?;
    if !cmp.equal {
        return Err(Error::Precondition(format!(
            "F differs from E outside B1 (excess {}, measure gap {})",
            fmt_num(cmp.excess),
            fmt_num(cmp.measure_gap)
        )));
    }
    let d0 = Arc::new(Domain::build(n, params.r1, params.r2, params.m0)?);
    let choice = select_slice(e, &d0, params.eps1, params.slice_samples)?;
    let r0 = choice.r0;
    let (e, f, sets) = if r0 == 1.0 {
        (e.clone(), f.clone(), seq.sets.clone())
    } else {
        let s: T = lit(r0);
        let sets: Result<Vec<PolySet<T>>> = seq.sets.iter().map(|x| x.rescale(&origin, s)).collect();
        (e.rescale(&origin, s)?, f.rescale(&origin, s)?, sets?)
    };
    let r1 = params.r1 / r0;
    let eps2 = params.eps2;
    let chain_ok = r1 < (1.0 - eps2) * d0.inner_radius() && (1.0 + eps2) * d0.outer_radius() < params.r2;
    if !chain_ok {
        return Err(Error::Precondition("the chain B1 ⊂ D1° ⊂ D0 ⊂ D2 ⊂ B2 fails for the built domain".into()));
    }

    let nb = neighborhood_complexes_checked(
        &d0,
        &e,
        params.m3,
        lit::<T>(params.tau),
        RegimeCheck { m2: Some(params.m2), eps1: Some(params.eps1) },
    )?;
    let wins = windows::<T>(&nb);
    let b1 = Region::ball(origin, lit(r1));
    let d0c = Region::scaled(&d0, T::one());
    let d0o = Region::scaled_open(&d0, T::one());
    let d2o = Region::scaled_open(&d0, lit(1.0 + eps2));

    let e_b1 = to_f64(e.measure(&b1)?);
    let f_b1 = to_f64(f.measure(&b1)?);
    let e_d0 = to_f64(e.measure(&d0c)?);
    let f_d0 = to_f64(f.measure(&d0c)?);
    let a = e_b1 - f_b1;

    let (psi_img, f_rest, _) = project_in_windows(&f, &wins, &nb.s_prime, params.seed)?;
    let psi_cost = to_f64(psi_img.total_measure());
    let psi_f = psi_img.union(&f_rest)?;
    let weld = weld_set::<T>(&nb.s_prime_d, n, d);
    let s_prime_d = to_f64(nb.s_prime_d.cell_measure::<T>(d));
    let f_prime = psi_f.union(&weld)?;
    let p2set = psi_f.restrict(&d0c)?;
    let p2 = to_f64(p2set.total_measure());

    let qset: BTreeSet<DyadicCube> = nb.q.iter().copied().collect();
    let half_shell = Region::shell(&d0, lit(1.0 - 0.5 * params.tau), lit(1.0 + 0.5 * params.tau));
    let t1_shell = Region::shell(&d0, lit(1.0 - params.t1), lit(1.0 + params.t1));
    let picked: Vec<usize> = if params.ks.is_empty() {
        (0..seq.len()).collect()
    } else {
        let mut v = Vec::new();
        for k in &params.ks {
            let i = seq
                .index
                .iter()
                .position(|x| x == k)
                .ok_or_else(|| Error::Invalid(format!("k = {k} is not an index of the sequence")))?;
            v.push(i);
        }
        v
    };

    let runs: Vec<Result<(KTerms, KEntry<T>)>> = picked
        .par_iter()
        .map(|&i| {
            let k = seq.index[i];
            let ek = &sets[i];
            let shell_t1 = to_f64(ek.measure(&t1_shell)?);
            let pieces = ek.pieces(&half_shell)?;
            let contained = pieces.iter().all(|p| cubes_meeting(p, n, params.m3).iter().all(|c| qset.contains(c)));
            let entry = KEntry { k, e_k: ek.clone(), f_k: None };
            if !contained {
                let reason = "E_k meets the shell outside the interior of |S|".to_string();
                return Ok((KTerms::skipped(k, false, shell_t1, reason), entry));
            }
            let (phi_img, ek_rest, rec) = project_in_windows(ek, &wins, &nb.s_prime, params.seed)?;
            let phi_cost = to_f64(phi_img.total_measure());
            let phi_ek = phi_img.union(&ek_rest)?;
            let p0set = phi_ek.restrict(&d2o.clone().not())?;
            let p1set = phi_ek.restrict(&d2o.clone().and(d0o.clone().not()))?;
            let mut fk = p0set;
            fk.extend(&p1set)?;
            fk.extend(&p2set)?;
            fk.extend(&weld)?;
            let outer = to_f64(ek.measure(&d2o.clone().and(d0o.clone().not()))?);
            let ek_d0_open = to_f64(ek.measure(&d0o)?);
            let ek_d2 = to_f64(ek.measure(&d2o)?);
            let p1 = to_f64(p1set.total_measure());
            let fk_d2 = to_f64(fk.measure(&d2o)?);
            let outside_equal = compare_in_window(&fk, ek, &d2o.clone().not(), tol)?.exact;
            let weld_chk = weld_check(&fk, &d0, &nb.t_prime_d, tol.max(1e-12))?;
            let max_ratio = rec
                .iter()
                .filter(|r| to_f64(r.before) > 0.0)
                .map(|r| to_f64(r.after) / to_f64(r.before))
                .fold(0.0, f64::max);
            let terms = KTerms {
                k,
                contained,
                skipped: None,
                shell_t1,
                phi_cost,
                outer,
                ek_d0_open,
                ek_d2,
                p1,
                fk_d2,
                slack: ek_d2 - a / 8.0 - fk_d2,
                outside_equal,
                weld: Some(weld_chk),
                max_ratio,
            };
            Ok((terms, KEntry { k, e_k: ek.clone(), f_k: Some(fk) }))
        })
        .collect();
    let mut k_terms = Vec::with_capacity(runs.len());
    let mut entries = Vec::with_capacity(runs.len());
    for r in runs {
        let (t, en) = r?;
        k_terms.push(t);
        entries.push(en);
    }
    let k1 = first_stable(&k_terms.iter().map(|t| (t.k, t.contained)).collect::<Vec<_>>());
    let finals: Vec<(u64, bool)> =
        k_terms.iter().filter(|t| t.glued()).map(|t| (t.k, t.slack >= -tol)).collect();
    let k2 = first_stable(&finals);

    let ledger = GlueLedger {
        params: params.clone(),
        n,
        d,
        r0,
        slice_measure: choice.measure,
        chain_ok,
        e_b1,
        f_b1,
        a,
        e_d0,
        f_d0,
        s_prime_d,
        psi_cost,
        p2,
        weld_cells: nb.s_prime_d.cells(d).len(),
        windows: wins.len(),
        warnings: nb.warnings.clone(),
        k_terms,
        k1,
        k2,
    };
    Ok(GlueOutput { ledger, entries, domain: d0, nb, e, f, f_prime })
}

/// One checked line of the audit.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditRow {
    pub term: String,
    pub relation: String,
    pub value: f64,
    pub budget: Option<f64>,
    /// `None` for informational rows.
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub pass: bool,
    pub note: Option<String>,
}

impl AuditReport {
    /// Rows that were checked and failed.
    pub fn failures(&self) -> Vec<&AuditRow> {
        self.rows.iter().filter(|r| r.pass == Some(false)).collect()
    }

    /// CSV with columns `term,relation,value,budget,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("term,relation,value,budget,pass\n");
        for r in &self.rows {
            let pass = match r.pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "info",
            };
            s.push_str(&csv_row(&[
                r.term.clone(),
                r.relation.clone(),
                fmt_num(r.value),
                r.budget.map(fmt_num).unwrap_or_default(),
                pass.to_string(),
            ]));
            s.push('\n');
        }
        s
    }
}

struct Rows {
    rows: Vec<AuditRow>,
    tol: f64,
}

impl Rows {
    fn info(&mut self, term: &str, relation: &str, value: f64) {
        self.rows.push(AuditRow { term: term.into(), relation: relation.into(), value, budget: None, pass: None });
    }

    fn le(&mut self, term: &str, relation: &str, value: f64, budget: f64) {
        let pass = value <= budget + self.tol;
        self.rows.push(AuditRow { term: term.into(), relation: relation.into(), value, budget: Some(budget), pass: Some(pass) });
    }

    fn eq(&mut self, term: &str, relation: &str, value: f64, target: f64) {
        let pass = (value - target).abs() <= self.tol;
        self.rows.push(AuditRow { term: term.into(), relation: relation.into(), value, budget: Some(target), pass: Some(pass) });
    }

    fn flag(&mut self, term: &str, relation: &str, ok: bool, value: f64) {
        self.rows.push(AuditRow { term: term.into(), relation: relation.into(), value, budget: None, pass: Some(ok) });
    }
}

/// Re-derives every inequality of the gluing construction from the measured
/// terms of the ledger.
pub fn measure_audit(ledger: &GlueLedger) -> AuditReport {
    let tol = ledger.params.tol;
    let mut r = Rows { rows: Vec::new(), tol };
    let a = ledger.a;
    let gain = a > tol;
    r.info("r0", "selected slice radius", ledger.r0);
    r.info("slice_measure", "H^(d-1)(E ∩ ∂(r0 D))", ledger.slice_measure);
    r.flag("domain_chain", "B1 ⊂ D1° ⊂ D1 ⊂ D0 ⊂ D2 ⊂ B2", ledger.chain_ok, if ledger.chain_ok { 1.0 } else { 0.0 });
    r.info("e_b1", "H(E ∩ B1)", ledger.e_b1);
    r.info("f_b1", "H(F ∩ B1)", ledger.f_b1);
    r.eq("gap", "A = H(E ∩ B1) - H(F ∩ B1)", a, ledger.e_b1 - ledger.f_b1);
    r.eq("exchange", "H(E ∩ D0) - H(F ∩ D0) = A", ledger.e_d0 - ledger.f_d0, a);
    if gain {
        r.le("weld_size", "H(|S'^d|) <= A/4", ledger.s_prime_d, a / 4.0);
        r.le("psi_cost", "H(psi(F ∩ W)) <= A/4", ledger.psi_cost, a / 4.0);
    } else {
        r.info("weld_size", "H(|S'^d|)", ledger.s_prime_d);
        r.info("psi_cost", "H(psi(F ∩ W))", ledger.psi_cost);
    }
    r.le("inner_part", "H(psi(F) ∩ D0) <= H(F ∩ D0) + psi cost", ledger.p2, ledger.f_d0 + ledger.psi_cost);
    let mut glued = 0;
    for t in &ledger.k_terms {
        let k = t.k;
        let tag = |s: &str| format!("{s}[k={k}]");
        r.info(&tag("shell_t1"), "H(E_k in the t1 shell)", t.shell_t1);
        if let Some(why) = &t.skipped {
            r.info(&tag("skipped"), why, 0.0);
            continue;
        }
        glued += 1;
        if gain {
            r.le(&tag("phi_cost"), "H(phi_k(E_k ∩ W)) <= A/4", t.phi_cost, a / 4.0);
        } else {
            r.info(&tag("phi_cost"), "H(phi_k(E_k ∩ W))", t.phi_cost);
        }
        r.le(&tag("outer_part"), "H(phi_k(E_k) ∩ D2° \\ D0°) <= H(E_k ∩ D2° \\ D0°) + phi cost", t.p1, t.outer + t.phi_cost);
        r.le(&tag("subadditivity"), "H(F_k ∩ D2°) <= outer part + inner part + H(|S'^d|)", t.fk_d2, t.p1 + ledger.p2 + ledger.s_prime_d);
        r.eq(&tag("partition"), "H(E_k ∩ D2° \\ D0°) + H(E_k ∩ D0°) = H(E_k ∩ D2°)", t.outer + t.ek_d0_open, t.ek_d2);
        r.flag(&tag("outside_equal"), "F_k \\ D2° = E_k \\ D2°", t.outside_equal, if t.outside_equal { 1.0 } else { 0.0 });
        match &t.weld {
            Some(w) => r.flag(&tag("weld_trace"), "F_k ∩ ∂D0 = |T'^d|", w.ok, w.trace_pieces as f64),
            None => r.flag(&tag("weld_trace"), "F_k ∩ ∂D0 = |T'^d|", false, 0.0),
        }
        r.info(&tag("max_ratio"), "largest projection ratio of phi_k", t.max_ratio);
        if gain {
            r.le(&tag("semicontinuity"), "H(E ∩ D0) <= H(E_k ∩ D0°) + A/8", ledger.e_d0, t.ek_d0_open + a / 8.0);
            r.le(&tag("final"), "H(F_k ∩ D2°) <= H(E_k ∩ D2°) - A/8", t.fk_d2, t.ek_d2 - a / 8.0);
            let slack = t.ek_d2 - a / 8.0 - t.fk_d2;
            r.eq(&tag("slack"), "stored slack = H(E_k ∩ D2°) - A/8 - H(F_k ∩ D2°)", t.slack, slack);
        } else {
            let overhead = t.outer + ledger.e_d0 + ledger.s_prime_d + t.phi_cost + ledger.psi_cost;
            r.le(
                &tag("overhead"),
                "H(F_k ∩ D2°) <= H(E_k ∩ D2° \\ D0°) + H(E ∩ D0) + H(|S'^d|) + phi cost + psi cost",
                t.fk_d2,
                overhead,
            );
        }
    }
    if let Some(k1) = ledger.k1 {
        r.info("k1", "first index from which E_k stays in |S|° near ∂D0", k1 as f64);
    }
    if let Some(k2) = ledger.k2 {
        r.info("k2", "first glued index from which the final inequality holds", k2 as f64);
    }
    r.flag("glued_members", "at least one member glued", glued > 0, glued as f64);
    let pass = r.rows.iter().all(|x| x.pass != Some(false));
    let note = if gain { None } else { Some("no strict gain possible".to_string()) };
    AuditReport { rows: r.rows, pass, note }
}

impl GlueLedger {
    /// Audit table as CSV.
    pub fn to_csv(&self) -> String {
        measure_audit(self).to_csv()
    }
}
