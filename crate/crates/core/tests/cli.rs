use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(args)
        .env("DUALITY_OUT", dir)
        .output()
        .unwrap()
}

fn report(dir: &Path) -> Value {
    let text = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(!text.contains('\r'));
    serde_json::from_str(&text).unwrap()
}

fn header(dir: &Path, file: &str) -> String {
    let text = std::fs::read_to_string(dir.join(file)).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    text.lines().next().unwrap().to_string()
}

#[test]
fn verify_clifford_passes_with_report() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["verify-clifford"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(d.path());
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["passed"], true);
    assert!(!r["checks"].as_array().unwrap().is_empty());
    assert_eq!(r["metadata"]["command"], "verify-clifford");
}

#[test]
fn analyze_rotation_form_reports_obstruction() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["analyze-hj", "--form", "-y,x,1", "--coords", "x,y,z"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("no integrating factor"), "{stdout}");
}

#[test]
fn curves_writes_trajectory() {
    let d = tempfile::tempdir().unwrap();
    let out = run(
        d.path(),
        &["curves", "--W", "x*y", "--start", "0,1", "--steps", "500", "--invariant", "y^2 - x^2"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(d.path(), "trajectory.csv"), "s,x,y,rho,lambda");
    assert_eq!(report(d.path())["passed"], true);
}

#[test]
fn wave_and_zitter_write_csv() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["wave-sim", "--courant", "1.0"]).status.code(), Some(0));
    assert!(header(d.path(), "wave.csv").starts_with("t,cell_0,"));
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["zitter-sim", "--k0", "0.2"]).status.code(), Some(0));
    assert_eq!(header(d.path(), "zb.csv"), "t,x_mean,residual");
}

#[test]
fn invalid_expression_exits_2_with_caret() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["curves", "--W", "x*(y", "--start", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains('^'));
}

#[test]
fn config_errors_exit_3() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["wave-sim", "--courant", "1.5"]).status.code(), Some(3));
    assert_eq!(run(d.path(), &["no-such-command"]).status.code(), Some(3));
    let cfg = d.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"wave-sim\"\n[parameters]\nbogus = 1\n").unwrap();
    assert_eq!(run(d.path(), &["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn run_config_matches_direct_invocation() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("job.toml");
    std::fs::write(&cfg, "command = \"zitter-sim\"\nseed = 3\n[parameters]\nk0 = 0.1\n").unwrap();
    let out = run(d.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(d.path());
    assert_eq!(r["metadata"]["seed"], 3);
    assert_eq!(r["metadata"]["command"], "zitter-sim");
}

#[test]
fn unwritable_output_exits_4() {
    let out = Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(["verify-clifford"])
        .env("DUALITY_OUT", "/proc/duality-denied")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
