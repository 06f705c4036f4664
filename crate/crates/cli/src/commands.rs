use std::fmt::Write;
use std::sync::Arc;

use minset::competitor::{
    box_complex, cell_complement, competitor_certificate, default_margin, glue_competitor, grid_vanishing_probe,
    measure_audit, scenario, select_slice, verify_topological_competitor, CertOptions, GlueOutput, GlueParams,
    VerifyOptions,
};
use minset::dyadic::Domain;
use minset::ffproj::{ff_project, ff_project_local};
use minset::geomset::{PolySet, SetSequence};
use minset::homology::{homology_group, ChainComplexZ};
use minset::report::{csv_row, fmt_num, Svg};
use minset::{Aabb64, Point64};

use crate::config::load_scene;
use crate::{Command, Failure, Report, Run};

pub fn dispatch(cmd: Command, run: &Run) -> Result<Report, Failure> {
    match cmd {
        Command::Grid => grid(run),
        Command::Project => project(run),
        Command::Homology => homology(run),
        Command::Slice => slice(run),
        Command::Glue => glue(run),
        Command::Verify => verify(run),
        Command::Certify => certify(run),
        Command::Probe => probe(run),
        Command::Rescale => rescale(run),
    }
}

fn view_of(sets: &[&PolySet<f64>], pad: f64) -> Aabb64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for b in sets.iter().filter_map(|s| s.bbox()) {
        for i in 0..2 {
            lo[i] = lo[i].min(b.lo[i]);
            hi[i] = hi[i].max(b.hi[i]);
        }
    }
    if lo[0] > hi[0] {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    Aabb64::new(2, Point64::from_f64(&[lo[0] - pad, lo[1] - pad]), Point64::from_f64(&[hi[0] + pad, hi[1] + pad]))
}

fn unit_box(n: usize) -> Aabb64 {
    Aabb64::new(n, Point64::from_f64(&vec![-1.0; n]), Point64::from_f64(&vec![1.0; n]))
}

fn box_bounds(run: &Run, n: usize) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let lo = run.cfg.list::<f64>("lo")?.unwrap_or_else(|| vec![-1.0; n]);
    let hi = run.cfg.list::<f64>("hi")?.unwrap_or_else(|| vec![1.0; n]);
    if lo.len() != n || hi.len() != n {
        return Err(Failure::input(format!("`lo` and `hi` need {n} coordinates")));
    }
    Ok((lo, hi))
}

fn domain(run: &Run, n: usize) -> Result<Arc<Domain>, Failure> {
    let defaults = scenario::glue_params();
    let r1 = run.cfg.or("r1", defaults.r1)?;
    let r2 = run.cfg.or("r2", defaults.r2)?;
    let m0 = run.cfg.or("m0", defaults.m0)?;
    Ok(Arc::new(Domain::build(n, r1, r2, m0)?))
}

fn grid(run: &Run) -> Result<Report, Failure> {
    let n = run.cfg.or("n", 2usize)?;
    let d0 = domain(run, n)?;
    let with_cells = run.cfg.or("cells", true)?;
    run.cfg.check_unused()?;
    let mut files = vec![("domain.txt".to_string(), d0.to_text(with_cells))];
    if n == 2 {
        let mut svg = Svg::new(unit_box(2), 600.0);
        svg.cubes(&d0.cells().collect::<Vec<_>>(), "#dde6f0", "#8899aa");
        svg.cubes(&d0.boundary_complex().cells(1), "none", "#b03020");
        files.push(("grid.svg".into(), svg.finish()));
    }
    let summary = format!(
        "domain: {} cells at scale {}, inner radius {}, outer radius {}, Lipschitz constant {}\n",
        d0.num_cells(),
        d0.m0,
        fmt_num(d0.inner_radius()),
        fmt_num(d0.outer_radius()),
        fmt_num(d0.lipschitz())
    );
    Ok(Report { files, summary, pass: true })
}

fn project(run: &Run) -> Result<Report, Failure> {
    let e = run.cfg.require_set("e")?;
    let m = run.cfg.or("scale", 2i32)?;
    let (lo, hi) = box_bounds(run, e.n)?;
    let local = run.cfg.or("local", false)?;
    run.cfg.check_unused()?;
    let k = box_complex(e.n, m, &lo, &hi)?;
    let out = if local { ff_project_local(&e, &k, run.seed)? } else { ff_project(&e, &k, run.seed)? };
    let mut csv = csv_row(&["stage", "cube", "center", "before", "after"].map(String::from));
    csv.push('\n');
    for r in &out.records {
        let c: Vec<String> = (0..e.n).map(|i| fmt_num(r.center[i])).collect();
        csv.push_str(&csv_row(&[r.stage.to_string(), r.cube.id(), c.join(" "), fmt_num(r.before), fmt_num(r.after)]));
        csv.push('\n');
    }
    let mut files = vec![("projected.scene".to_string(), out.set.to_scene()), ("projection.csv".into(), csv)];
    if e.n == 2 {
        let mut svg = Svg::new(view_of(&[&e, &out.set], 0.05), 600.0);
        svg.cubes(&k.cells(1), "none", "#dddddd");
        svg.set(&e, "#999999", 1.0);
        svg.set(&out.set, "#b03020", 2.0);
        files.push(("project.svg".into(), svg.finish()));
    }
    let summary = format!(
        "projected: measure {} -> {}, {} full faces, {} projections\n",
        fmt_num(e.total_measure()),
        fmt_num(out.set.total_measure()),
        out.full_faces.len(),
        out.records.len()
    );
    Ok(Report { files, summary, pass: true })
}

fn homology(run: &Run) -> Result<Report, Failure> {
    let e = run.cfg.require_set("e")?;
    let m = run.cfg.or("scale", 5i32)?;
    let (lo, hi) = box_bounds(run, e.n)?;
    let margin = run.cfg.or("margin", default_margin(e.n, m))?;
    let g = run.cfg.group()?;
    let reduced = run.cfg.or("reduced", true)?;
    run.cfg.check_unused()?;
    let u = box_complex(e.n, m, &lo, &hi)?;
    let c = cell_complement(&u, &e, margin)?;
    let mut cx = ChainComplexZ::from_complex(&c)?;
    if reduced {
        cx = cx.reduced();
    }
    let mut text = format!(
        "complement of the set in the box at scale {m}, margin {}\ncells {}\ncoefficients {g}\n",
        fmt_num(margin),
        c.len()
    );
    for k in 0..e.n {
        let h = homology_group(&cx, k, &g)?;
        let _ = writeln!(text, "H_{k}{} = {}", if reduced { " (reduced)" } else { "" }, h.summary());
    }
    Ok(Report { files: vec![("homology.txt".into(), text.clone())], summary: text, pass: true })
}

fn slice(run: &Run) -> Result<Report, Failure> {
    let e = run.cfg.require_set("e")?;
    let d0 = domain(run, e.n)?;
    let defaults = scenario::glue_params();
    let eps1 = run.cfg.or("eps1", defaults.eps1)?;
    let samples = run.cfg.or("samples", defaults.slice_samples)?;
    run.cfg.check_unused()?;
    let s = select_slice(&e, &d0, eps1, samples)?;
    let mut csv = csv_row(&["r", "slice_measure", "degenerate"].map(String::from));
    csv.push('\n');
    for (r, meas, deg) in &s.table {
        csv.push_str(&csv_row(&[fmt_num(*r), fmt_num(*meas), deg.to_string()]));
        csv.push('\n');
    }
    let summary = format!("slice: r0 = {}, measure {}\n", fmt_num(s.r0), fmt_num(s.measure));
    Ok(Report { files: vec![("slice.csv".into(), csv)], summary, pass: true })
}

fn glue_params(run: &Run) -> Result<GlueParams, Failure> {
    let d = scenario::glue_params();
    let c = &run.cfg;
    let p = GlueParams {
        r1: c.or("r1", d.r1)?,
        r2: c.or("r2", d.r2)?,
        m0: c.or("m0", d.m0)?,
        m2: c.or("m2", d.m2)?,
        m3: c.or("m3", d.m3)?,
        eps1: c.or("eps1", d.eps1)?,
        eps2: c.or("eps2", d.eps2)?,
        t1: c.or("t1", d.t1)?,
        tau: c.or("tau", d.tau)?,
        ks: c.list("ks")?.unwrap_or(d.ks),
        slice_samples: c.or("slice_samples", d.slice_samples)?,
        cert_scale: c.get("cert_scale")?,
        seed: run.seed,
        tol: run.tol.unwrap_or(d.tol),
    };
    p.validate()?;
    Ok(p)
}

/// `E`, `F` and the sequence: `sequence = rotate` turns `E` by `1/k`,
/// otherwise it lists one scene per `k`.
fn glue_inputs(run: &Run, p: &GlueParams) -> Result<(PolySet<f64>, PolySet<f64>, SetSequence<f64>), Failure> {
    let e = run.cfg.require_set("e")?;
    let f = run.cfg.require_set("f")?;
    let seq = match run.cfg.get::<String>("sequence")?.as_deref() {
        None | Some("rotate") => {
            let sets = p.ks.iter().map(|k| e.rotate2(1.0 / *k as f64)).collect();
            SetSequence::new(p.ks.clone(), sets)?
        }
        Some(_) => {
            let paths = run.cfg.paths("sequence")?.unwrap_or_default();
            if paths.len() != p.ks.len() {
                return Err(Failure::input(format!("{} sequence scenes for {} values of k", paths.len(), p.ks.len())));
            }
            let sets = paths.iter().map(|q| load_scene(q)).collect::<Result<Vec<_>, _>>()?;
            SetSequence::new(p.ks.clone(), sets)?
        }
    };
    Ok((e, f, seq))
}

fn glue_files(out: &GlueOutput<f64>) -> Vec<(String, String)> {
    let mut files = vec![
        ("ledger.csv".to_string(), out.ledger.to_csv()),
        ("audit.csv".to_string(), measure_audit(&out.ledger).to_csv()),
    ];
    for en in &out.entries {
        if let Some(fk) = &en.f_k {
            files.push((format!("f_k/{}.scene", en.k), fk.to_scene()));
        }
    }
    if out.ledger.n == 2 {
        let last = out.entries.iter().rev().find_map(|en| en.f_k.as_ref().map(|f| (&en.e_k, f)));
        let mut svg = Svg::new(unit_box(2), 600.0);
        svg.cubes(&out.domain.boundary_complex().cells(1), "none", "#cccccc");
        if let Some((ek, fk)) = last {
            svg.set(ek, "#999999", 1.0);
            svg.set(fk, "#b03020", 1.5);
        }
        files.push(("glue.svg".into(), svg.finish()));
    }
    files
}

fn run_glue(run: &Run) -> Result<GlueOutput<f64>, Failure> {
    let p = glue_params(run)?;
    let (e, f, seq) = glue_inputs(run, &p)?;
    Ok(glue_competitor(&seq, &e, &f, &p)?)
}

fn glue_summary(out: &GlueOutput<f64>) -> String {
    let l = &out.ledger;
    let audit = measure_audit(l);
    let k = |v: Option<u64>| v.map_or("none".to_string(), |k| k.to_string());
    let mut s = format!(
        "glue: A = {}, r0 = {}, k1 = {}, k2 = {}, audit {}\n",
        fmt_num(l.a),
        fmt_num(l.r0),
        k(l.k1),
        k(l.k2),
        if audit.pass { "pass" } else { "fail" }
    );
    if let Some(note) = &audit.note {
        let _ = writeln!(s, "note: {note}");
    }
    for r in audit.failures() {
        let _ = writeln!(s, "failed: {} ({}) value {}", r.term, r.relation, fmt_num(r.value));
    }
    s
}

fn glue(run: &Run) -> Result<Report, Failure> {
    let p = glue_params(run)?;
    let (e, f, seq) = glue_inputs(run, &p)?;
    run.cfg.check_unused()?;
    let out = glue_competitor(&seq, &e, &f, &p)?;
    let audit = measure_audit(&out.ledger);
    // without a strict gain there is nothing to check beyond the ledger
    let pass = audit.pass || audit.note.is_some();
    Ok(Report { files: glue_files(&out), summary: glue_summary(&out), pass })
}

fn certify(run: &Run) -> Result<Report, Failure> {
    let g = run.cfg.group()?;
    let margin = run.cfg.get::<f64>("margin")?;
    let out = run_glue(run)?;
    run.cfg.check_unused()?;
    let mut opts = CertOptions::for_run(&out);
    opts.margin = margin;
    let cert = competitor_certificate(&out, &g, &opts)?;
    let mut files = glue_files(&out);
    files.push(("certificate.txt".into(), cert.to_text()));
    files.extend(cert.witness_files().into_iter().map(|(name, body)| (format!("witnesses/{name}"), body)));
    let summary = format!(
        "{}certificate {}: degree {}, scale {}, k3 = {}\n",
        glue_summary(&out),
        if cert.pass { "pass" } else { "fail" },
        cert.degree,
        cert.scale,
        cert.k3.map_or("none".into(), |k| k.to_string())
    );
    Ok(Report { files, summary, pass: cert.pass })
}

fn verify(run: &Run) -> Result<Report, Failure> {
    let e = run.cfg.require_set("e")?;
    let f = run.cfg.require_set("f")?;
    let center = run.cfg.point("center", e.n)?.unwrap_or_else(Point64::zero);
    let radius: f64 = run.cfg.require("radius")?;
    let g = run.cfg.group()?;
    let mut opts = VerifyOptions::new(e.n, run.cfg.or("scale", 7)?);
    let (lo, hi) = box_bounds(run, e.n)?;
    opts.u_lo = lo;
    opts.u_hi = hi;
    opts.margin = run.cfg.get("margin")?;
    opts.gen_budget = run.cfg.or("gen_budget", opts.gen_budget)?;
    opts.check_stability = run.cfg.or("stability", true)?;
    if let Some(t) = run.tol {
        opts.tol = t;
    }
    run.cfg.check_unused()?;
    let v = verify_topological_competitor(&e, &f, &center, radius, &g, &opts)?;
    let mut files = vec![("verdict.txt".to_string(), v.to_text())];
    if e.n == 2 {
        let mut svg = Svg::new(view_of(&[&e, &f], 0.05), 600.0);
        svg.set(&e, "#999999", 3.0);
        svg.set(&f, "#b03020", 1.5);
        for viol in &v.violations {
            let cells: Vec<_> = viol.support.iter().map(|(c, _)| c.clone()).collect();
            svg.cubes(&cells, "none", "#2060c0");
        }
        files.push(("verify.svg".into(), svg.finish()));
    }
    Ok(Report { files, summary: v.to_text(), pass: v.competitor })
}

fn probe(run: &Run) -> Result<Report, Failure> {
    let e = run.cfg.require_set("e")?;
    let d0 = domain(run, e.n)?;
    let ts = run.cfg.list("ts")?.unwrap_or_else(|| vec![1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0, 1.0 / 1024.0]);
    let ms = run.cfg.list("ms")?.unwrap_or_else(|| (8..=12).collect());
    run.cfg.check_unused()?;
    let t = grid_vanishing_probe(&e, &d0, &ts, &ms)?;
    let pass = t.decreasing_in_m();
    let mut summary = format!(
        "probe: {} in m, corner ratio {}\n",
        if pass { "decreasing" } else { "not decreasing" },
        t.corner_ratio().map_or("undefined".into(), fmt_num)
    );
    for r in t.increasing_rows() {
        let _ = writeln!(summary, "increasing row at t = {}", fmt_num(r));
    }
    Ok(Report { files: vec![("probe.csv".into(), t.to_csv())], summary, pass })
}

fn rescale(run: &Run) -> Result<Report, Failure> {
    let e = run.cfg.require_set("e")?;
    let x = run.cfg.point("center", e.n)?.unwrap_or_else(Point64::zero);
    let r: f64 = run.cfg.require("radius")?;
    run.cfg.check_unused()?;
    let out = e.rescale(&x, r)?;
    let summary = format!("rescaled: {} simplices, measure {}\n", out.len(), fmt_num(out.total_measure()));
    Ok(Report { files: vec![("rescaled.scene".into(), out.to_scene())], summary, pass: true })
}
