use std::sync::OnceLock;

use approx::assert_relative_eq;
use minset::competitor::{
    competitor_certificate, glue_competitor, measure_audit, scenario, verify_topological_competitor, CertOptions,
    GlueOutput, VerifyOptions,
};
use minset::geomset::{PolySet, Region, SetSequence};
use minset::homology::FgAbelianGroup;
use minset::Point64;

fn shipped() -> &'static GlueOutput<f64> {
    static RUN: OnceLock<GlueOutput<f64>> = OnceLock::new();
    RUN.get_or_init(|| {
        let params = scenario::glue_params();
        let seq = scenario::glue_sequence(&params.ks).unwrap();
        glue_competitor(&seq, &scenario::glue_limit(), &scenario::glue_replacement(), &params).unwrap()
    })
}

#[test]
fn shipped_run_audits_clean() {
    let audit = measure_audit(&shipped().ledger);
    assert!(audit.pass, "{:?}", audit.failures());
    assert!(audit.note.is_none());
    assert!(audit.to_csv().starts_with("term,relation,value,budget,pass\n"));
}

#[test]
fn audit_flags_oversized_weld() {
    let mut ledger = shipped().ledger.clone();
    ledger.s_prime_d = ledger.a / 4.0 * 1.5;
    let audit = measure_audit(&ledger);
    assert!(!audit.pass);
    assert!(audit.failures().iter().any(|r| r.term == "weld_size"));
}

#[test]
fn audit_flags_oversized_psi_cost() {
    let mut ledger = shipped().ledger.clone();
    ledger.psi_cost = ledger.a;
    assert!(!measure_audit(&ledger).pass);
}

#[test]
fn identical_replacement_reports_no_gain() {
    let params = scenario::glue_params();
    let seq = scenario::glue_sequence(&params.ks[..3]).unwrap();
    let mut p = params.clone();
    p.ks.truncate(3);
    let e = scenario::glue_limit();
    let out = glue_competitor(&seq, &e, &e, &p).unwrap();
    assert!(out.ledger.a.abs() <= p.tol);
    let audit = measure_audit(&out.ledger);
    assert_eq!(audit.note.as_deref(), Some("no strict gain possible"));
    assert!(!audit.pass);
}

#[test]
fn constant_sequence_glues_from_the_start() {
    let mut p = scenario::glue_params();
    p.ks = vec![1, 2, 3];
    let e = scenario::glue_limit();
    let seq = SetSequence::new(p.ks.clone(), vec![e.clone(), e.clone(), e.clone()]).unwrap();
    let out = glue_competitor(&seq, &e, &scenario::glue_replacement(), &p).unwrap();
    assert!(out.ledger.k_terms.iter().all(|t| t.contained && t.skipped.is_none()));
    assert_eq!(out.ledger.k1, Some(1));
    assert_eq!(out.ledger.k2, Some(1));
    // every member is the same set, so every glued set is the same too
    let f0 = out.entries[0].f_k.as_ref().unwrap();
    for en in &out.entries[1..] {
        assert_eq!(en.f_k.as_ref().unwrap().simplices, f0.simplices);
    }
    assert!(measure_audit(&out.ledger).pass);
}

#[test]
fn deleted_weld_face_is_refused() {
    let out = shipped();
    let mut broken = out.clone();
    let k2 = broken.ledger.k2.unwrap();
    let entry = broken.entries.iter_mut().find(|en| en.k == k2).unwrap();
    let face = out.nb.t_prime_d.iter().find(|c| c.dim() == out.ledger.d).unwrap();
    let bx = Region::closed_box(face.aabb::<f64>());
    let fk = entry.f_k.as_mut().unwrap();
    let before = fk.simplices.len();
    fk.simplices.retain(|s| !s.iter().all(|p| bx.contains(p)));
    assert!(fk.simplices.len() < before);
    let cert = competitor_certificate(&broken, &FgAbelianGroup::integers(), &CertOptions::for_run(&broken)).unwrap();
    assert!(!cert.pass);
    let member = cert.per_k.iter().find(|c| c.k == k2).unwrap();
    let weld = member.steps.iter().find(|s| s.step == 1).unwrap();
    assert!(!weld.pass, "{}", weld.detail);
}

#[test]
fn trivial_trace_certificate() {
    // a small circle well inside D0 never meets the boundary
    let small = |r: f64| scenario::polygon(&scenario::polygon_vertices(64, r), 0, 0);
    let e = small(0.3);
    let f = scenario::polygon(&scenario::polygon_vertices(4, 0.3), 0, 0);
    let mut p = scenario::glue_params();
    p.ks = vec![10, 100, 1000];
    let seq = SetSequence::new(p.ks.clone(), p.ks.iter().map(|k| e.rotate2(1.0 / *k as f64)).collect()).unwrap();
    let out = glue_competitor(&seq, &e, &f, &p).unwrap();
    assert!(out.nb.t_prime_d.is_empty());
    assert_relative_eq!(out.ledger.a, e.total_measure() - f.total_measure(), epsilon = 1e-12);
    let cert = competitor_certificate(&out, &FgAbelianGroup::integers(), &CertOptions::for_run(&out)).unwrap();
    assert!(cert.pass, "{}", cert.to_text());
}

#[test]
fn verify_accepts_identical_sets() {
    let e = scenario::circle();
    let g = FgAbelianGroup::integers();
    let v = verify_topological_competitor(&e, &e, &Point64::zero(), 0.3, &g, &VerifyOptions::new(2, 6)).unwrap();
    assert!(v.competitor);
    assert!(v.violations.is_empty());
    assert!(v.generators.iter().all(|x| x.nonzero_in_e == x.nonzero_in_f));
}

#[test]
fn verify_rejects_sets_differing_outside_the_ball() {
    let e = scenario::circle();
    let f = PolySet::from_segments(2, &[(Point64::from_f64(&[-0.9, 0.0]), Point64::from_f64(&[0.9, 0.0]))]);
    let g = FgAbelianGroup::integers();
    assert!(verify_topological_competitor(&e, &f, &Point64::zero(), 0.3, &g, &VerifyOptions::new(2, 5)).is_err());
}
