use std::process::Command;

use skewlab_cli::{list_experiments, report_path, run, CliError, ExperimentConfig, ParamValue, Report};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewlab"))
}

#[test]
fn registry_lists_ten_experiments_with_anchors() {
    let list = list_experiments();
    assert_eq!(list.len(), 10);
    let anchor = |name: &str| list.iter().find(|e| e.name == name).map(|e| e.paper_anchor);
    assert_eq!(anchor("remark3"), Some("Remark 3"));
    assert_eq!(anchor("euler-resolvent-lemma2"), Some("Lemma lm2"));
    for name in [
        "interval-deficiency",
        "nonuniqueness-interval",
        "cayley-roundtrip",
        "transport-rotation",
        "transport-resolvent",
        "transport-decay",
        "euler-projector",
        "euler-evolve",
    ] {
        assert!(anchor(name).is_some(), "{name} missing");
    }
}

#[test]
fn remark3_defaults_pass_and_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = run(&ExperimentConfig::new("remark3", dir.path())).unwrap();
    assert!(report.passed());
    assert!(report.check("u_at_1_is_zero").unwrap().value < 1e-12);
    assert!(report.check("u_at_2_is_u0").unwrap().passed);
    assert_eq!(report.params.get("seed"), Some(&ParamValue::Number(0.0)));
    let text = std::fs::read_to_string(report_path(dir.path(), "remark3")).unwrap();
    let parsed: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.checks, report.checks);
    let energy = std::fs::read_to_string(dir.path().join("remark3.energy.csv")).unwrap();
    assert_eq!(energy.lines().next(), Some("t,energy"));
    assert_eq!(energy.lines().count(), 1 + 513);
}

#[test]
fn transport_rotation_energy_drift_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::new("transport-rotation", dir.path()).set("n", 128.0).set("t", 1.0);
    let report = run(&config).unwrap();
    let drift = report.check("energy_drift").unwrap();
    assert!(drift.passed && drift.value.abs() < 1e-5);
    assert!(report.passed(), "{}", report.summary());
    assert!(dir.path().join("transport-rotation.field.csv").exists());
}

#[test]
fn repeated_runs_have_identical_metrics() {
    for name in ["cayley-roundtrip", "euler-projector", "interval-deficiency"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let first = run(&ExperimentConfig::new(name, a.path()).set("seed", 5.0)).unwrap();
        let second = run(&ExperimentConfig::new(name, b.path()).set("seed", 5.0)).unwrap();
        assert_eq!(
            serde_json::to_string(&first.metrics).unwrap(),
            serde_json::to_string(&second.metrics).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn invalid_parameters_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::new("euler-evolve", dir.path()).set("n", 3.0).set("colour", "red");
    match run(&config) {
        Err(CliError::InvalidParams { offending, .. }) => assert_eq!(offending, vec!["colour", "n"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_experiment_exits_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary().args(["run", "--experiment", "nonexistent", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment"));
}

#[test]
fn bad_parameters_exit_with_usage_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["run", "--experiment", "remark3", "--set", "n_cells=3", "--set", "bogus=1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[bogus, n_cells]"), "{err}");
}

#[test]
fn failed_check_exits_with_status_one() {
    // a coarse central difference on a wide step misses the residual bound
    let dir = tempfile::tempdir().unwrap();
    let out = binary()
        .args(["run", "--experiment", "transport-resolvent", "--set", "patch=4", "--set", "cd_step=1e-2"])
        .args(["--set", "h=0.5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL transport-resolvent/stationary_residual"));
    assert!(report_path(dir.path(), "transport-resolvent").exists());
}

#[test]
fn config_file_is_overridden_by_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_cells": 64, "seed": 9}"#).unwrap();
    let out = binary()
        .args(["run", "--experiment", "remark3", "--config"])
        .arg(&cfg)
        .args(["--set", "n_cells=128", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Report =
        serde_json::from_str(&std::fs::read_to_string(report_path(dir.path(), "remark3")).unwrap()).unwrap();
    assert_eq!(report.params["n_cells"], ParamValue::Number(128.0));
    assert_eq!(report.params["seed"], ParamValue::Number(9.0));
}

#[test]
fn malformed_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_cells": [1, 2]}"#).unwrap();
    let out = binary().args(["run", "--experiment", "remark3", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_prints_every_experiment() {
    let out = binary().args(["list", "--json"]).output().unwrap();
    assert!(out.status.success());
    let list: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(list.len(), 10);
    assert_eq!(list[0]["name"], "remark3");
    assert_eq!(list[0]["paper_anchor"], "Remark 3");
}
