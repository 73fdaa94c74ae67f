use std::fs;
use std::process::{Command, Output};

use latdual::models::TermSet;
use latdual_cli::Suite;
use serde_json::Value;

fn latdual(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latdual"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn every_suite_passes_with_exit_zero() {
    for s in Suite::ALL {
        let out = latdual(&["run", s.name(), "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let report = json(&out);
        assert_eq!(report["status"], "pass");
        assert_eq!(report["command"], s.name());
        assert!(report["checks"].as_array().is_some_and(|c| !c.is_empty()));
    }
}

#[test]
fn injected_faults_fail_every_suite() {
    for s in Suite::ALL {
        let out = latdual(&["run", s.name(), "--format", "json", "--inject-fault"]);
        assert_eq!(out.status.code(), Some(1), "{s}");
        let report = json(&out);
        assert_eq!(report["status"], "fail");
        assert!(report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .any(|c| c["status"] == "fail"));
    }
}

#[test]
fn json_is_deterministic_under_parallelism() {
    let mut args = vec!["run"];
    args.extend(Suite::ALL.iter().map(|s| s.name()));
    args.extend(["--format", "json", "--no-timing"]);
    let serial = latdual(&[args.as_slice(), &["--parallel", "1"]].concat());
    let parallel = latdual(&[args.as_slice(), &["--parallel", "4"]].concat());
    let again = latdual(&[args.as_slice(), &["--parallel", "4"]].concat());
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
    assert_eq!(parallel.stdout, again.stdout);
    assert_eq!(json(&serial).as_array().map(Vec::len), Some(12));
}

#[test]
fn degeneracy_and_gamma_metrics() {
    let out = latdual(&[
        "run",
        "degeneracy",
        "--model",
        "wen",
        "--rows",
        "4",
        "--cols",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(json(&out)["metrics"]["degeneracy"], 4);
    let out = latdual(&[
        "run",
        "degeneracy",
        "--model",
        "wen",
        "--rows",
        "3",
        "--cols",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(json(&out)["metrics"]["degeneracy"], 2);
    let out = latdual(&[
        "run",
        "gamma",
        "--model",
        "cluster2d",
        "--rows",
        "6",
        "--cols",
        "6",
        "--scheme",
        "kp",
        "--format",
        "json",
    ]);
    let r = json(&out);
    assert_eq!(r["metrics"]["gamma"], 0);
    assert_eq!(r["status"], "pass");
    let out = latdual(&["run", "gamma", "--model", "toric", "--format", "json"]);
    assert_eq!(json(&out)["metrics"]["gamma"], 1);
}

#[test]
fn invalid_spec_reports_the_rule() {
    let out = latdual(&["run", "degeneracy", "--model", "toric", "--rows", "3", "--cols", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("toric periodic requires even dimensions"));
    let out = latdual(&["run", "no-such-suite"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn text_report_lists_checks_and_metrics() {
    let out = latdual(&["run", "circuit-depth", "--rows", "5", "--cols", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("circuit-depth PASS"));
    assert!(text.contains("metrics:"));
    let out = latdual(&["run", "circuit-depth", "--inject-fault"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text
        .lines()
        .find(|l| l.starts_with("  PASS") || l.starts_with("  FAIL"))
        .unwrap();
    assert!(first.starts_with("  FAIL"));
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("circuit.json");
    let spectrum = dir.path().join("spectrum.json");
    let report = dir.path().join("report.json");
    let out = latdual(&[
        "run",
        "circuit-depth",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
        "--emit-circuit",
        circuit.to_str().unwrap(),
        "--dump-spectrum",
        spectrum.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["metrics"]["depth"], 4);
    let gates: Value = serde_json::from_str(&fs::read_to_string(&circuit).unwrap()).unwrap();
    let gates = gates.as_array().unwrap();
    assert_eq!(gates[0]["kind"], "H");
    assert!(gates
        .iter()
        .any(|g| g["kind"] == "CNOT" && g["targets"].as_array().unwrap().len() == 2));
    let s: Value = serde_json::from_str(&fs::read_to_string(&spectrum).unwrap()).unwrap();
    let levels = s["levels"].as_array().unwrap();
    assert_eq!(levels[0]["energy"], -16);
    assert_eq!(levels[0]["multiplicity"], 1);
}

#[test]
fn model_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("wen.json");
    let out = latdual(&[
        "model",
        "--model",
        "wen",
        "--rows",
        "3",
        "--cols",
        "4",
        "--bc",
        "periodic",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let set = TermSet::from_json(&text).unwrap();
    assert_eq!(set.len(), 12);
    assert_eq!(set.spec.cols, 4);
}

#[test]
fn sign_and_region_flags() {
    let out = latdual(&[
        "run", "entropy", "--region", "1,1:2,2", "--sign", "+1", "--format", "json",
    ]);
    let r = json(&out);
    assert_eq!(r["params"]["region"], "1,1:2,2");
    assert_eq!(r["params"]["spec"]["coupling_sign"], 1);
    assert_eq!(r["metrics"]["region_size"], 4);
    assert_eq!(r["status"], "pass");
}
