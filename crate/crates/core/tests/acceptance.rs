//! Acceptance run: one pass/fail line per criterion, then a single assertion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use minset::competitor::{
    competitor_certificate, glue_competitor, grid_vanishing_probe, measure_audit, scenario,
    verify_topological_competitor, CertOptions, Certificate, GlueOutput, VerifyOptions,
};
use minset::dyadic::{neighborhood_complexes, Domain, DyadicComplex, DyadicCube};
use minset::ffproj::{ff_project, ff_project_local, project_set_in_cube};
use minset::geomset::{PolySet, Region};
use minset::homology::{
    alexander_rank_check, homology_group, smith_normal_form, ChainComplexZ, CycleClass, FgAbelianGroup, IntMatrix,
};
use minset::Point64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PROJ_TOL_CENTERED: f64 = 1e-9;
const PROJ_TOL_OFFSET: f64 = 1e-6;
const FACE_TOL: f64 = 1e-12;
const LIPSCHITZ_SLACK: f64 = 1e-12;
const SOUPS: usize = 100;
const PROBE_CORNER_MAX: f64 = 0.1;

type Outcome = Result<String, String>;

fn p(x: f64, y: f64) -> Point64 {
    Point64::from_f64(&[x, y])
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// Position along the boundary of [0,1]^2 (perimeter 4) where the ray from
// `c` through `q` leaves the square.
fn exit_perimeter(c: Point64, q: Point64) -> f64 {
    let d = [q[0] - c[0], q[1] - c[1]];
    let mut s = f64::INFINITY;
    for (axis, wall) in [(0, 0.0), (0, 1.0), (1, 0.0), (1, 1.0)] {
        if d[axis] != 0.0 {
            let t = (wall - c[axis]) / d[axis];
            if t > 0.0 {
                s = s.min(t);
            }
        }
    }
    let (x, y) = ((c[0] + s * d[0]).clamp(0.0, 1.0), (c[1] + s * d[1]).clamp(0.0, 1.0));
    // counterclockwise from the origin
    if y == 0.0 {
        x
    } else if x == 1.0 {
        1.0 + y
    } else if y == 1.0 {
        3.0 - x
    } else {
        4.0 - y
    }
}

// Length swept on the boundary while the segment is traversed, summed over
// a fine sample with wraparound.
fn projected_length_oracle(c: Point64, a: Point64, b: Point64) -> f64 {
    const N: usize = 1 << 12;
    let at = |i: usize| {
        let s = i as f64 / N as f64;
        p(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))
    };
    let mut total = 0.0;
    let mut prev = exit_perimeter(c, at(0));
    for i in 1..=N {
        let cur = exit_perimeter(c, at(i));
        let step = (cur - prev).rem_euclid(4.0);
        total += step.min(4.0 - step);
        prev = cur;
    }
    total
}

fn criterion_1() -> Outcome {
    let cube = DyadicCube::top(0, &[0, 0]);
    let (a, b) = (p(0.25, 0.75), p(0.75, 0.75));
    let e = PolySet::from_segments(2, &[(a, b)]);
    let mut notes = Vec::new();
    for (c, expect, tol) in [(p(0.5, 0.5), 1.0, PROJ_TOL_CENTERED), (p(0.5, 0.1), 0.692307, PROJ_TOL_OFFSET)] {
        let got = project_set_in_cube(&e, &cube, &c).map_err(|e| e.to_string())?.total_measure();
        let oracle = projected_length_oracle(c, a, b);
        ensure((got - oracle).abs() <= tol, format!("center {c:?}: {got} against oracle {oracle}"))?;
        ensure((got - expect).abs() <= tol, format!("center {c:?}: {got} against {expect}"))?;
        notes.push(format!("{got:.9}"));
    }
    Ok(format!("lengths {}", notes.join(", ")))
}

fn grid4() -> DyadicComplex {
    DyadicComplex::from_top((0..4).flat_map(|i| (0..4).map(move |j| DyadicCube::top(2, &[i, j])))).unwrap()
}

fn soup(seed: u64) -> PolySet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=6);
    let segs: Vec<_> = (0..k)
        .map(|_| {
            let mut q = || p(rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99));
            (q(), q())
        })
        .collect();
    PolySet::from_segments(2, &segs)
}

// Length of the union of the pieces lying on the edge (exact on-edge test).
fn covered_length(set: &PolySet<f64>, edge: &DyadicCube) -> f64 {
    let b = edge.aabb::<f64>();
    let axis = edge.axes().next().unwrap();
    let other = 1 - axis;
    let mut iv: Vec<(f64, f64)> = set
        .simplices
        .iter()
        .filter(|s| s[0][other] == b.lo[other] && s[1][other] == b.lo[other])
        .map(|s| {
            let (u, v) = (s[0][axis].min(s[1][axis]), s[0][axis].max(s[1][axis]));
            (u.max(b.lo[axis]), v.min(b.hi[axis]))
        })
        .filter(|(u, v)| v > u)
        .collect();
    iv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (u, v) in iv {
        match cur {
            Some((a, bb)) if u <= bb => cur = Some((a, bb.max(v))),
            Some((a, bb)) => {
                total += bb - a;
                cur = Some((u, v));
            }
            None => cur = Some((u, v)),
        }
    }
    if let Some((a, bb)) = cur {
        total += bb - a;
    }
    total
}

fn on_skeleton(s: &[Point64], h: f64) -> bool {
    let lattice = |v: f64| (v / h).fract() == 0.0 && (0.0..=1.0).contains(&v);
    let inside = |q: &Point64| (0..2).all(|i| (0.0..=1.0).contains(&q[i]));
    s.iter().all(inside) && (0..2).any(|i| s.iter().all(|q| q[i] == s[0][i]) && lattice(s[0][i]))
}

fn criterion_2() -> Outcome {
    let k = grid4();
    let h = 0.25;
    let edges = k.cells(1);
    let mut faces = 0;
    for seed in 0..SOUPS as u64 {
        let e = soup(seed);
        let out = ff_project(&e, &k, seed).map_err(|x| format!("soup {seed}: {x}"))?;
        for s in &out.set.simplices {
            ensure(on_skeleton(s, h), format!("soup {seed}: piece {s:?} is off the 1-skeleton"))?;
        }
        for edge in &edges {
            let c = covered_length(&out.set, edge);
            ensure(c == 0.0 || c >= h * (1.0 - FACE_TOL), format!("soup {seed}: edge {} covered {c} of {h}", edge.id()))?;
        }
        faces += out.full_faces.len();
    }
    Ok(format!("{SOUPS} soups, {faces} full faces"))
}

fn criterion_3() -> Outcome {
    let k = grid4();
    let outside = [
        (p(1.2, 0.3), p(1.9, 1.7)),
        (p(1.0, 0.2), p(1.0, 0.7)),
        (p(1.0, 0.5), p(1.5, 0.8)),
        (p(-0.5, -0.5), p(0.0, 0.0)),
        (p(-0.3, 1.0), p(1.3, 1.0)),
    ];
    let crossing = [(p(0.5, 0.5), p(1.5, 0.6))];
    let mut checked = 0;
    for seed in 0..SOUPS as u64 {
        let mut e = soup(seed);
        e.extend(&PolySet::from_segments(2, &outside)).unwrap();
        e.extend(&PolySet::from_segments(2, &crossing)).unwrap();
        let out = ff_project_local(&e, &k, seed).map_err(|x| format!("scene {seed}: {x}"))?;
        let keys: BTreeSet<Vec<[u64; 4]>> =
            out.set.simplices.iter().map(|s| s.iter().map(|q| q.bit_key()).collect()).collect();
        for (a, b) in outside {
            let key = vec![a.bit_key(), b.bit_key()];
            ensure(keys.contains(&key), format!("scene {seed}: {a:?}-{b:?} changed"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} outside simplices unchanged"))
}

fn criterion_4() -> Outcome {
    let d = Domain::from_boxes(2, 1, &[vec![1, 1]]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let x = p(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let y = p(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let gap = (d.shape(&x) - d.shape(&y)).abs() - 2.0 * x.dist(&y);
        worst = worst.max(gap);
        ensure(gap <= LIPSCHITZ_SLACK, format!("Lipschitz bound fails at {x:?}, {y:?}"))?;
    }
    for _ in 0..1_000 {
        let x = p(rng.gen_range(-0.5..=0.5), rng.gen_range(-0.5..=0.5));
        let t: f64 = rng.gen_range(0.0..1.0);
        let tx = p(t * x[0], t * x[1]);
        ensure(d.contains(&x) && d.contains_open(&tx), format!("star-shapedness fails at {x:?}, t = {t}"))?;
    }
    Ok(format!("largest |f(x) - f(y)| - 2|x - y| = {worst:.3e}"))
}

fn criterion_5() -> Outcome {
    let s = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]).unwrap()).map_err(|e| e.to_string())?;
    ensure(s.diag == vec![2, 4], format!("invariant factors {:?}", s.diag))?;
    let ann: Vec<DyadicCube> =
        (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|c| *c != (1, 1)).map(|(i, j)| DyadicCube::top(0, &[i, j])).collect();
    let k = DyadicComplex::from_top(ann).unwrap();
    let cx = ChainComplexZ::from_complex(&k).unwrap();
    let hz = homology_group(&cx, 1, &FgAbelianGroup::integers()).map_err(|e| e.to_string())?;
    let h2 = homology_group(&cx, 1, &FgAbelianGroup::cyclic(2).unwrap()).map_err(|e| e.to_string())?;
    ensure(hz.free_rank() == 1 && hz.factors[0].orders == vec![0], format!("H1 over Z: {}", hz.summary()))?;
    ensure(h2.factors.len() == 1 && h2.factors[0].orders == vec![2], format!("H1 over Z/2: {}", h2.summary()))?;
    // every square boundary bounds, with a checked witness
    let mut witnesses = 0;
    for (g, modulus) in [(&hz, 0i64), (&h2, 2)] {
        for j in 0..cx.count(2) {
            let mut e = vec![0i64; cx.count(2)];
            e[j] = 1;
            let z = cx.boundary(2, &e).unwrap();
            match g.classify_uniform(&cx, &z).map_err(|e| e.to_string())? {
                CycleClass::Zero { witness } => {
                    let mut b = cx.boundary(2, &witness[0]).unwrap();
                    let mut zz = z.clone();
                    if modulus != 0 {
                        b.iter_mut().for_each(|v| *v = v.rem_euclid(modulus));
                        zz.iter_mut().for_each(|v| *v = v.rem_euclid(modulus));
                    }
                    ensure(b == zz, "witness boundary differs")?;
                    witnesses += 1;
                }
                CycleClass::NonZero { .. } => return Err("square boundary reported nonzero".into()),
            }
        }
    }
    Ok(format!("(2, 4); H1 = {} | {}; {witnesses} witnesses checked", hz.summary(), h2.summary()))
}

fn criterion_6() -> Outcome {
    let tops = (0..8).map(|c| DyadicCube::top(1, &[c & 1, (c >> 1) & 1, (c >> 2) & 1]));
    let sphere = DyadicComplex::from_top(tops).unwrap().boundary();
    let eq = sphere.filter(|c| c.dim() <= 1 && !c.has_axis(2) && c.corner[2] == 1);
    let eqr = alexander_rank_check(&sphere, &eq, None).map_err(|e| e.to_string())?;
    let row = &eqr.rows[0];
    ensure(eqr.pass && row.complement_rank == 1 && row.dual_rank == 1, format!("equator: {:?}", eqr.rows))?;

    let d0 = Arc::new(Domain::from_boxes(3, 1, &[vec![1, 1, 1]]).unwrap());
    let e = PolySet::from_segments(3, &[(Point64::from_f64(&[-0.7, 0.03, 0.11]), Point64::from_f64(&[0.7, 0.05, 0.09]))]);
    let m = 3;
    let nb = neighborhood_complexes(&d0, &e, m, 0.05).map_err(|e| e.to_string())?;
    let s = d0.boundary_complex().refine(m);
    ensure(!nb.t_prime.is_empty() && nb.t_prime.is_subcomplex_of(&s), "trace complex is not on the sphere")?;
    let r = alexander_rank_check(&s, &nb.t_prime, Some(1)).map_err(|e| e.to_string())?;
    let sk = r.skeleton.as_ref().ok_or("no skeleton check")?;
    ensure(r.pass && sk.iso, format!("trace: {:?} {:?}", r.rows, sk))?;
    Ok(format!(
        "equator rank {} = {}; trace degree {} ranks {} / {} map rank {}",
        row.complement_rank, row.dual_rank, sk.degree, sk.rank_x, sk.rank_skeleton, sk.map_rank
    ))
}

fn criterion_7() -> Outcome {
    let g = FgAbelianGroup::integers();
    let opts = VerifyOptions::new(2, 7);
    let e = scenario::circle();
    let (f, c, r) = scenario::arc_deleted_circle(8);
    let v = verify_topological_competitor(&e, &f, &c, r, &g, &opts).map_err(|e| e.to_string())?;
    ensure(!v.competitor && !v.violations.is_empty(), "arc-deleted circle accepted")?;
    let named = v.violations[0].describe();
    let v2 = verify_topological_competitor(&e, &scenario::square(), &Point64::zero(), 0.51, &g, &opts)
        .map_err(|e| e.to_string())?;
    ensure(v2.competitor, "inscribed square rejected")?;
    let (e3, f3) = scenario::two_spoke_pair();
    let v3 = verify_topological_competitor(&e3, &f3, &Point64::zero(), 0.51, &g, &opts).map_err(|e| e.to_string())?;
    ensure(v3.competitor && !v3.vacuous, "square with spokes rejected or vacuous")?;
    ensure(v3.generators.iter().any(|x| x.nonzero_in_e && x.nonzero_in_f), "no preserved class")?;
    Ok(format!("arc deleted: {named}; square: pass (vacuous {}); square with spokes: pass", v2.vacuous))
}

struct GlueRun {
    out: GlueOutput<f64>,
    ledger_csv: String,
    cert: Certificate,
}

fn glue_run() -> Result<GlueRun, String> {
    let params = scenario::glue_params();
    let seq = scenario::glue_sequence(&params.ks).map_err(|e| e.to_string())?;
    let out = glue_competitor(&seq, &scenario::glue_limit(), &scenario::glue_replacement(), &params)
        .map_err(|e| e.to_string())?;
    let cert = competitor_certificate(&out, &FgAbelianGroup::integers(), &CertOptions::for_run(&out))
        .map_err(|e| e.to_string())?;
    let ledger_csv = out.ledger.to_csv();
    Ok(GlueRun { out, ledger_csv, cert })
}

fn criterion_8(run: &GlueRun) -> Outcome {
    let l = &run.out.ledger;
    let tol = l.params.tol;
    // polygon perimeter minus the square; the spokes cancel inside B1
    let a_exact = 256.0 * (std::f64::consts::PI / 256.0).sin() - 2.0 * 2f64.sqrt();
    ensure((l.a - a_exact).abs() <= 1e-12, format!("A = {} against {a_exact}", l.a))?;
    ensure((l.a - (std::f64::consts::PI - 2.0 * 2f64.sqrt())).abs() < 1e-4, "A far from pi - 2 sqrt 2")?;
    let audit = measure_audit(l);
    ensure(audit.pass, format!("audit failures: {:?}", audit.failures()))?;
    let k2 = l.k2.ok_or("no k2 detected")?;
    let d2o = Region::scaled_open(&run.out.domain, 1.0 + l.params.eps2);
    let mut glued = 0;
    for en in run.out.entries.iter().filter(|en| en.k >= k2) {
        let fk = en.f_k.as_ref().ok_or(format!("k = {} not glued", en.k))?;
        let f_meas = fk.measure(&d2o).unwrap();
        let e_meas = en.e_k.measure(&d2o).unwrap();
        ensure(f_meas <= e_meas - l.a / 8.0 + tol, format!("k = {}: {f_meas} > {e_meas} - A/8", en.k))?;
        let t = l.k_terms.iter().find(|t| t.k == en.k).unwrap();
        ensure((t.fk_d2 - f_meas).abs() <= tol && (t.ek_d2 - e_meas).abs() <= tol, "ledger differs from direct measure")?;
        ensure(t.phi_cost <= l.a / 4.0, "phi budget")?;
        glued += 1;
    }
    ensure(l.s_prime_d <= l.a / 4.0 && l.psi_cost <= l.a / 4.0, "weld or psi budget")?;
    let k3 = run.cert.k3.ok_or("no k3 detected")?;
    ensure(run.cert.pass, format!("certificate refused:\n{}", run.cert.to_text()))?;
    let certified = run.cert.per_k.iter().filter(|c| c.k >= k3 && c.pass).count();
    ensure(certified > 0, "no member certified")?;
    Ok(format!("A = {:.9}, k2 = {k2}, k3 = {k3}, {glued} glued past k2, {certified} certified", l.a))
}

fn criterion_9() -> Outcome {
    let d0 = Arc::new(Domain::build(2, 0.52, 0.95, 8).map_err(|e| e.to_string())?);
    let ts = [1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0, 1.0 / 1024.0];
    let ms = [8, 9, 10, 11, 12];
    let t = grid_vanishing_probe(&scenario::glue_limit(), &d0, &ts, &ms).map_err(|e| e.to_string())?;
    ensure(t.decreasing_in_m(), format!("rows increasing in m at t = {:?}", t.increasing_rows()))?;
    let ratio = t.corner_ratio().ok_or("empty corner")?;
    ensure(ratio < PROBE_CORNER_MAX, format!("corner ratio {ratio}"))?;
    Ok(format!("corner ratio {ratio:.4}"))
}

fn criterion_10(first: &GlueRun) -> Outcome {
    let second = glue_run()?;
    ensure(first.ledger_csv == second.ledger_csv, "ledgers differ")?;
    ensure(first.cert.to_text() == second.cert.to_text(), "certificates differ")?;
    ensure(first.cert.witness_files() == second.cert.witness_files(), "witness chains differ")?;
    Ok(format!("{} ledger bytes, {} certificate bytes identical", first.ledger_csv.len(), first.cert.to_text().len()))
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let el = t.elapsed();
    let r = match r {
        Ok(s) if el > budget => Err(format!("{s}; took {el:?}, budget {budget:?}")),
        other => other,
    };
    (r, el)
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let mut results: Vec<(usize, Outcome, Duration)> = Vec::new();
    let mut run = |i: usize, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let (r, el) = timed(budget, f);
        results.push((i, r, el));
    };
    run(1, s(1), &mut criterion_1);
    run(2, s(30), &mut criterion_2);
    run(3, s(30), &mut criterion_3);
    run(4, s(5), &mut criterion_4);
    run(5, s(5), &mut criterion_5);
    run(6, s(60), &mut criterion_6);
    run(7, s(30), &mut criterion_7);
    let mut glued: Option<GlueRun> = None;
    run(8, s(300), &mut || {
        let g = glue_run()?;
        let r = criterion_8(&g);
        glued = Some(g);
        r
    });
    run(9, s(120), &mut criterion_9);
    run(10, s(300), &mut || match &glued {
        Some(g) => criterion_10(g),
        None => Err("criterion 8 produced no run".into()),
    });
    let mut failed = Vec::new();
    for (i, r, el) in &results {
        match r {
            Ok(msg) => println!("criterion {i}: pass ({:.2}s) {msg}", el.as_secs_f64()),
            Err(msg) => {
                println!("criterion {i}: FAIL ({:.2}s) {msg}", el.as_secs_f64());
                failed.push(*i);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
