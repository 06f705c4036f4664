use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn minset(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minset")).args(args).arg("--out").arg(out).output().unwrap()
}

fn run_cfg(cmd: &str, cfg: &Path, out: &Path) -> Output {
    minset(&[cmd, "--config", cfg.to_str().unwrap()], out)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn arc_deleted_circle_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cfg("verify", &scenarios().join("arc_deleted.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v = fs::read_to_string(dir.path().join("verdict.txt")).unwrap();
    assert!(v.starts_with("competitor no"));
    assert!(v.contains("violation: generator 0"));
    assert!(dir.path().join("verify.svg").exists());
}

#[test]
fn no_gain_scenario_emits_a_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cfg("glue", &scenarios().join("no_gain.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ledger = fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert!(ledger.starts_with("term,relation,value,budget,pass\n"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("no strict gain possible"));
}

#[test]
fn shipped_glue_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = scenarios().join("glue.cfg");
    let oa = run_cfg("glue", &cfg, a.path());
    let ob = minset(&["glue", "--config", cfg.to_str().unwrap(), "--jobs", "1"], b.path());
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0));
    for f in ["ledger.csv", "audit.csv", "glue.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn probe_writes_the_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cfg("probe", &scenarios().join("probe.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,m=8,m=9,m=10,m=11,m=12"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn projection_and_rescale_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_cfg("project", &scenarios().join("project.cfg"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let projected = dir.path().join("projected.scene");
    assert!(fs::read_to_string(&projected).unwrap().starts_with("2 1\n"));
    let cfg = dir.path().join("rescale.cfg");
    fs::write(&cfg, format!("e = {}\ncenter = 0.5, 0.5\nradius = 0.5\n", projected.display())).unwrap();
    let o = run_cfg("rescale", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("rescaled.scene").exists());
}

#[test]
fn grid_and_homology_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = minset(&["grid"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("grid.svg").exists());
    let cfg = dir.path().join("h.cfg");
    fs::write(&cfg, "e = builtin:circle\nscale = 4\ngroup = rank 1; torsion 2\n").unwrap();
    let o = run_cfg("homology", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let h = fs::read_to_string(dir.path().join("homology.txt")).unwrap();
    // inside and outside of the circle: one extra component per factor
    assert!(h.contains("H_0 (reduced) = Z | Z/2"), "{h}");
}

#[test]
fn malformed_scene_header_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.scene"), "# comment\ntwo one\n0 0 1 1\n").unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "e = bad.scene\n").unwrap();
    let o = run_cfg("rescale", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn malformed_config_exits_2_naming_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "e = builtin:circle\n\nradius 0.5\n").unwrap();
    let o = run_cfg("rescale", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
    fs::write(&cfg, "e = builtin:circle\nradius = 0.5\nradious = 0.5\n").unwrap();
    let o = run_cfg("rescale", &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3") && stderr(&o).contains("radious"));
}

#[test]
fn unknown_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(minset(&["bake"], dir.path()).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = minset(&["grid"], &blocker.join("out"));
    assert_eq!(o.status.code(), Some(2));
}
