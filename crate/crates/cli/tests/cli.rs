//! End-to-end tests of the binary: exit codes, envelope determinism,
//! worker invariance, artifact files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prefmax"))
}

fn work_dir(tag: &str) -> PathBuf {
    let mut dir = std::env::temp_dir();
    dir.push(format!("prefmax-cli-test-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let mut path = dir.to_path_buf();
    path.push(name);
    fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strip_timings(mut v: serde_json::Value) -> serde_json::Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

const DEMAND_SCENARIO: &str = r#"{
  "command": "demand",
  "params": {
    "utility": "cobb-douglas(0.5,0.5)",
    "ambient": {"shape": "box-halfspace", "bounds": [[0, 1], [0, 1]]},
    "p": [1.0, 1.0],
    "w": 1.0,
    "tol": 1e-6
  }
}"#;

#[test]
fn demand_scenario_matches_the_analytic_point() {
    let dir = work_dir("demand");
    let scenario = write(&dir, "scenario.json", DEMAND_SCENARIO);
    let out = bin().args(["run", "--scenario"]).arg(&scenario).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let v = stdout_json(&out);
    let xi = v["result"]["xi"].as_array().unwrap();
    assert!((xi[0].as_f64().unwrap() - 0.5).abs() <= 3e-6);
    assert!((xi[1].as_f64().unwrap() - 0.5).abs() <= 3e-6);
}

#[test]
fn scenario_output_path_writes_result_json() {
    let dir = work_dir("outpath");
    let mut artifact_dir = dir.clone();
    artifact_dir.push("artifacts");
    let scenario_text = DEMAND_SCENARIO.replace(
        "\"command\": \"demand\",",
        &format!(
            "\"command\": \"demand\", \"outputPath\": {},",
            serde_json::to_string(artifact_dir.to_str().unwrap()).unwrap()
        ),
    );
    let scenario = write(&dir, "scenario.json", &scenario_text);
    let out = bin().args(["run", "--scenario"]).arg(&scenario).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let written = fs::read_to_string(artifact_dir.join("result.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["command"], "demand");
}

#[test]
fn identical_scenarios_produce_byte_identical_envelopes() {
    let dir = work_dir("determinism");
    let scenario = write(&dir, "scenario.json", DEMAND_SCENARIO);
    let run = || {
        let out = bin().args(["run", "--scenario"]).arg(&scenario).output().unwrap();
        assert!(out.status.success());
        serde_json::to_string(&strip_timings(stdout_json(&out))).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn empty_budget_exits_one_with_error_envelope() {
    let dir = work_dir("empty-budget");
    let scenario = write(
        &dir,
        "scenario.json",
        r#"{
          "command": "demand",
          "params": {
            "utility": "cobb-douglas(0.5,0.5)",
            "ambient": {"shape": "box-halfspace", "bounds": [[0, 1], [0, 1]]},
            "p": [1.0, 1.0],
            "w": -1.0,
            "tol": 1e-6
          }
        }"#,
    );
    let out = bin().args(["run", "--scenario"]).arg(&scenario).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "EmptyBudget");
}

#[test]
fn malformed_params_exit_two_before_any_computation() {
    let dir = work_dir("malformed");
    let scenario = write(
        &dir,
        "scenario.json",
        r#"{"command": "demand", "params": {"w": "not a number"}}"#,
    );
    let out = bin().args(["run", "--scenario"]).arg(&scenario).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "BadParams");
}

#[test]
fn unknown_command_exits_two() {
    let dir = work_dir("unknown");
    let scenario = write(&dir, "scenario.json", r#"{"command": "frobnicate", "params": {}}"#);
    let out = bin().args(["run", "--scenario"]).arg(&scenario).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_gamma_is_worker_count_invariant_and_writes_artifacts() {
    let dir1 = work_dir("vg-w1");
    let dir4 = work_dir("vg-w4");
    let run = |dir: &PathBuf, workers: &str| {
        let out = bin()
            .args([
                "verify-gamma",
                "--eps",
                "0.1",
                "--trials",
                "30",
                "--seed",
                "42",
                "--workers",
                workers,
                "--out",
            ])
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{out:?}");
        strip_timings(stdout_json(&out))
    };
    let v1 = run(&dir1, "1");
    let v4 = run(&dir4, "4");
    assert_eq!(v1, v4, "results must not depend on the worker count");
    assert_eq!(v1["result"]["failures"], 0);
    let csv1 = fs::read_to_string(dir1.join("trials.csv")).unwrap();
    let csv4 = fs::read_to_string(dir4.join("trials.csv")).unwrap();
    assert_eq!(csv1, csv4);
    assert!(csv1.starts_with("trial,rho_h,argmax_distance"));
    assert!(dir1.join("result.json").exists());
}

#[test]
fn verify_gamma_without_seed_is_rejected() {
    let out = bin()
        .args(["verify-gamma", "--eps", "0.1", "--trials", "5"])
        .output()
        .unwrap();
    // Stochastic commands demand a seed before any computation runs.
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "MissingSeed");
}

#[test]
fn counterexample_sweep_reports_unit_jumps() {
    let dir = work_dir("sweep");
    let out = bin()
        .args(["counterexample", "--sweep", "1e-1:1e-6", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(row["argmaxPlus"], 0.0);
        assert_eq!(row["argmaxMinus"], 1.0);
        assert_eq!(row["jump"], 1.0);
    }
    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7, "header plus six rows");
}

#[test]
fn equilibrium_subcommand_finds_the_labor_equilibrium() {
    let dir = work_dir("econ");
    let econ = write(
        &dir,
        "econ.json",
        r#"{
          "consumers": [{
            "body": {"shape": "box-halfspace", "bounds": [[-1, 0], [0, 1]]},
            "utility": "shifted-cobb-douglas(0.5,0.5,1,0)"
          }],
          "generators": [[-1, 1]]
        }"#,
    );
    let out = bin()
        .args(["equilibrium", "--economy"])
        .arg(&econ)
        .args(["--eps", "1e-2", "--grid-depth", "7"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let v = stdout_json(&out);
    let prices = v["result"]["candidate"]["prices"].as_array().unwrap();
    assert!((prices[0].as_f64().unwrap() - 0.5).abs() <= 1.0 / 128.0);
    assert_eq!(v["result"]["report"]["pass"], true);
}
