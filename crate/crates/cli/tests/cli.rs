use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn eigenwkb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenwkb"))
        .args(args)
        .env_remove("EIGENWKB_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_exact_eigenpairs() {
    let v: Value = serde_json::from_str(&stdout(&eigenwkb(&["solve", "--family", "legendre2", "--n", "2"]))).unwrap();
    assert_eq!(v["lambda"], serde_json::json!(["6", "0"]));
    assert_eq!(v["q"]["coeffs"], serde_json::json!([["-1/3", "0"], ["0", "0"], ["1", "0"]]));
}

#[test]
fn solve_reads_operator_files_and_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let op = dir.path().join("op.json");
    fs::write(&op, r#"{"M": 2, "rho": [{"coeffs": []}, {"coeffs": [["0","0"],["2","0"]]}, {"coeffs": [["-1","0"],["0","0"],["1","0"]]}]}"#).unwrap();
    let out = dir.path().join("q.json");
    stdout(&eigenwkb(&[
        "solve",
        "--op",
        op.to_str().unwrap(),
        "--n",
        "3",
        "--mode",
        "float",
        "--bits",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]));
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    let c1: f64 = v["q"]["coeffs"][1][0].as_str().unwrap().parse().unwrap();
    assert!((c1 + 0.6).abs() < 1e-15);
}

#[test]
fn resonant_degree_is_an_error() {
    let o = eigenwkb(&["solve", "--family", "jacobi4", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reson"));
}

#[test]
fn phi_at_two_for_legendre() {
    let v: Value = serde_json::from_str(&stdout(&eigenwkb(&["phi", "--family", "legendre2", "--z", "2,0", "-n", "5"]))).unwrap();
    let phi0: f64 = v["phi0"]["value"][0].as_str().unwrap().parse().unwrap();
    assert!((phi0 - ((2.0 + 3f64.sqrt()) / 2.0).ln()).abs() < 1e-14);
    assert!(v["phi0"]["error"].as_f64().unwrap() < 1e-50);
    assert!(v["predictor"].is_array());

    let v: Value = serde_json::from_str(&stdout(&eigenwkb(&["phi", "--family", "legendre2", "--z", "2", "--order", "1"]))).unwrap();
    assert_eq!(v["order"], 1);
}

#[test]
fn phi_inside_the_hull_is_refused() {
    let o = eigenwkb(&["phi", "--family", "legendre2", "--z", "0.5,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn series_tables_are_exact() {
    let v: Value = serde_json::from_str(&stdout(&eigenwkb(&["series", "--family", "jacobi4", "--order", "3"]))).unwrap();
    // gamma_0 = -kappa = -1/2
    assert_eq!(v["gamma"][0][0], "-1/2");
}

#[test]
fn grid_verbs_emit_csv() {
    let header = "scenario,n,z_re,z_im,measured_re,measured_im,predicted_re,predicted_im,rel_error";
    for verb in ["ratio-test", "strong-asym", "c1", "cauchy", "zeros"] {
        let o = eigenwkb(&[verb, "--family", "jacobi4", "-n", "10,20,40", "--z", "2,0", "--z", "-2,1", "--bits", "128"]);
        let text = stdout(&o);
        assert_eq!(text.lines().next(), Some(header), "{verb}");
        assert!(text.lines().count() > 1, "{verb}");
    }
}

#[test]
fn masson_shapiro_needs_real_points_right_of_the_roots() {
    let ok = eigenwkb(&["strong-asym", "--family", "masson-shapiro", "--p", "0,-1,0,1", "-n", "12", "--z", "2"]);
    stdout(&ok);
    let bad = eigenwkb(&["strong-asym", "--family", "masson-shapiro", "--p", "0,-1,0,1", "-n", "12", "--z", "0,2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn run_all_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"scenarios": []}"#).unwrap();
    let o = eigenwkb(&["run-all", "--config", empty.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    stdout(&o);
    assert!(out.join("manifest.json").exists());

    let failing = dir.path().join("failing.json");
    fs::write(
        &failing,
        r#"{"scenarios": [{"kind": "legendre2", "n_grid": [4, 8], "z_grid": [["2", "0"]], "experiments": ["ratio"]}],
            "thresholds": [{"experiment": "ratio", "max": 1e-30}]}"#,
    )
    .unwrap();
    let o = eigenwkb(&["run-all", "--config", failing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL ratio"));

    let inside = dir.path().join("inside.json");
    fs::write(&inside, r#"{"scenarios": [{"kind": "legendre2", "n_grid": [4], "z_grid": [["0", "0"]]}]}"#).unwrap();
    let o = eigenwkb(&["run-all", "--config", inside.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("z_grid[0]"));
}

#[test]
fn precision_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"precision": 256, "scenarios": [{"kind": "legendre2", "n_grid": [4], "z_grid": [["2", "0"]], "experiments": ["strong"]}]}"#).unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_eigenwkb"))
        .args(["run-all", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("EIGENWKB_BITS", "96")
        .output()
        .unwrap();
    stdout(&o);
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["scenarios"][0]["precision"], 96);

    let o = Command::new(env!("CARGO_BIN_EXE_eigenwkb"))
        .args(["run-all", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("EIGENWKB_BITS", "12")
        .output()
        .unwrap();
    assert!(!o.status.success());
}
