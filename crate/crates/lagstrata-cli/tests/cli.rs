//! Runs the built binary and checks its reports and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn lagstrata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lagstrata")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = lagstrata(args);
    let json = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    (out.status.code().unwrap(), json)
}

#[test]
fn exceptional_reports_b() {
    let (code, json) = report(&["exceptional", "--json-only"]);
    assert_eq!(code, 0);
    assert_eq!(json["subcommand"], "exceptional");
    assert_eq!(json["results"]["b"], -2);
    assert_eq!(json["passed"], true);
}

#[test]
fn degrees_pass() {
    let (code, json) = report(&["degrees", "--json-only"]);
    assert_eq!(code, 0);
    for (key, degree) in [("D1", 168), ("D2", 480), ("D3", 720), ("degG36", 42)] {
        assert_eq!(json["results"][key], degree);
    }
}

#[test]
fn census_is_deterministic_per_seed() {
    let args = ["census", "--prime", "2", "--seed", "9", "--json-only"];
    let (code, first) = report(&args);
    let (_, second) = report(&args);
    assert_eq!(code, 0);
    assert_eq!(first["results"]["result"]["total"], 1395);
    assert_eq!(first["results"]["result"]["census"]["counts"], second["results"]["result"]["census"]["counts"]);
}

#[test]
fn dual_k3_single_experiment() {
    let (code, json) = report(&["dual-k3", "--experiment", "psi", "--trials", "3", "--seed", "4", "--json-only"]);
    assert_eq!(code, 0, "{json}");
    assert_eq!(json["results"]["psi"]["trials"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["census", "--prime", "11"][..],
        &["census", "--experiment", "bogus"],
        &["degrees", "--prime", "5"],
        &["dual-k3", "--experiment", "chi"],
        &["no-such-command"],
    ] {
        assert_eq!(lagstrata(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn report_goes_to_out_file() {
    let path = std::env::temp_dir().join(format!("lagstrata-ledger-{}.json", std::process::id()));
    let out = lagstrata(&["ledger", "--json-only", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(json["subcommand"], "ledger");
}
