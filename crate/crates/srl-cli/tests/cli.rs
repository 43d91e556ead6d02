//! End-to-end smoke tests for the `srl` binary: exit codes, report shape,
//! certificate files, and format auto-detection.

use std::path::Path;
use std::process::{Command, Output};

fn srl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn budget_reports_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = srl(&["budget", "--k", "2", "--mu", "0.01", "--epsilon", "0.01"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("= 65"), "h(2,2) missing: {text}");
    assert!(text.contains("\"operation\": \"budget\""));
}

#[test]
fn gen_then_stability_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let out = srl(&["gen", "basis_set", "--n", "4", "--out", "set.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("set.txt").exists());

    let out = srl(&["stability", "--k", "4", "--in", "set.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("4-stable (exhaustive)"));
}

#[test]
fn witness_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    srl(&["gen", "basis_set", "--n", "4", "--out", "set.txt"], dir.path());
    let out = srl(&["stability", "--k", "3", "--in", "set.txt", "--out", "w.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("witness-found"));

    let out = srl(&["stability", "--verify", "w.txt", "--in", "set.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"valid\""));
}

#[test]
fn search_emits_good_subspace() {
    let dir = tempfile::tempdir().unwrap();
    srl(&["gen", "subgroup", "--n", "6", "--seed", "1", "--out", "h.txt"], dir.path());
    let out = srl(
        &["search", "--in", "h.txt", "--epsilon", "0.1", "--out", "good.sub"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("good-subspace"));
    assert!(dir.path().join("good.sub").exists());
}

#[test]
fn budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    srl(&["gen", "subgroup", "--n", "6", "--seed", "1", "--out", "h.txt"], dir.path());
    // k_max = 1: a 1-order witness exists, so the number is only a lower bound
    let out = srl(&["stability", "--number", "--k", "1", "--in", "h.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("lower-bound"));
}

#[test]
fn io_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = srl(&["dft"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = srl(&["gen", "no_such_fixture", "--n", "4"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = srl(&["stability", "--in", "missing.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn binary_set_format_autodetects() {
    let dir = tempfile::tempdir().unwrap();
    srl(&["gen", "basis_set", "--n", "5", "--out", "set.srl2"], dir.path());
    let bytes = std::fs::read(dir.path().join("set.srl2")).unwrap();
    assert_eq!(&bytes[..4], b"SRL2");
    let out = srl(&["dft", "--in", "set.srl2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"density\""));
}

#[test]
fn report_file_has_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    srl(&["gen", "basis_set", "--n", "4", "--out", "set.txt"], dir.path());
    let out = srl(
        &["uniformity", "--total", "--in", "set.txt", "--epsilon", "0.1", "--report", "rep.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    for key in ["operation", "parameters", "verdict", "certificate", "trace", "timings"] {
        assert!(report.get(key).is_some(), "missing report key {key}");
    }
    assert_eq!(report["operation"], "uniformity");
    assert!(report["timings"]["total_ms"].is_u64());
}

#[test]
fn threads_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    srl(&["gen", "basis_set", "--n", "4", "--out", "set.txt"], dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_srl"))
        .args(["goodness", "--in", "set.txt", "--epsilon", "0.3"])
        .env("SRL_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
