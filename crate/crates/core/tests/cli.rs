use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aloha-corr"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fig1_writes_csv_and_manifest_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fig1", "--out", "curves/fig1.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("curves/fig1.csv");
    let rows = csv_rows(&csv);
    assert_eq!(rows[0], ["epsilon", "separation", "zeta_over_p"]);
    assert_eq!(rows.len(), 1 + 3 * 31);

    let m = manifest(&dir.path().join("curves/fig1.manifest.json"));
    assert_eq!(m["command"], "fig1");
    assert_eq!(m["master_seed"], 0);
    let digest = hex::encode(Sha256::digest(fs::read(&csv).unwrap()));
    assert_eq!(m["outputs"][0]["sha256"], digest.as_str());
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn fig1_rayleigh_halves_the_curve_and_softening_decorrelates() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["fig1", "--separations", "0,0.5", "--epsilons", "1,0.1,0.01"];
    assert!(run(dir.path(), &[&args[..], &["--out", "none.csv"]].concat()).status.success());
    assert!(run(dir.path(), &[&args[..], &["--out", "ray.csv", "--fading", "rayleigh"]].concat())
        .status
        .success());
    let value = |r: &Vec<String>| r[2].parse::<f64>().unwrap();
    let none = csv_rows(&dir.path().join("none.csv"));
    let ray = csv_rows(&dir.path().join("ray.csv"));
    for (a, b) in none[1..].iter().zip(&ray[1..]) {
        assert!((value(b) - value(a) / 2.0).abs() < 1e-9, "{a:?} {b:?}");
    }
    let at_half: Vec<f64> = none[1..].iter().filter(|r| r[1] == "0.5").map(value).collect();
    assert_eq!(at_half.len(), 3);
    assert!(at_half[0] > at_half[1] && at_half[1] > at_half[2], "{at_half:?}");
}

#[test]
fn fig2_header_and_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["fig2"]).status.success());
    let rows = csv_rows(&dir.path().join("fig2.csv"));
    assert_eq!(rows[0], ["p", "p_success", "p_cond"]);
    assert_eq!(rows.len(), 22);
    assert_eq!(rows[11], ["0.5", "0.539641485816", "0.629620698804"]);
    assert!(dir.path().join("fig2.manifest.json").exists());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["fig1", "--p", "1.5"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["fig2", "--alpha", "2"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["moments", "--fading", "lognormal"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["fig1", "--config", "missing.json"]).status.code(), Some(1));
    fs::write(dir.path().join("bad.json"), r#"{"alpah": 3}"#).unwrap();
    assert_eq!(run(dir.path(), &["fig1", "--config", "bad.json"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn too_few_replications_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["validate", "--replications", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let rows = csv_rows(&dir.path().join("validate.csv"));
    assert_eq!(
        rows[0],
        ["quantity", "params", "analytic", "mc_value", "mc_stderr", "z_score", "pass"]
    );
    assert!(rows[1..].iter().all(|r| r[6] == "false"));
}

const SMALL_GRID: &str = r#"{
  "grid": [
    {"kind": "moments", "lambda": 1, "p": 0.5, "alpha": 4, "epsilon": 1, "fading": "rayleigh"},
    {"kind": "outage", "lambda": 1, "p": 0.5, "alpha": 4, "epsilon": 0, "link_distance": 0.5, "theta": 1}
  ],
  "replications": 2000
}"#;

#[test]
fn validate_is_reproducible_from_seed_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("grid.json"), SMALL_GRID).unwrap();
    let first = run(dir.path(), &["validate", "--config", "grid.json", "--seed", "9", "--out", "a.csv"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stdout));
    let again = run(dir.path(), &["validate", "--config", "grid.json", "--seed", "9", "--out", "b.csv"]);
    assert!(again.status.success());
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());

    // Re-running from the manifest reproduces the digest.
    let m = manifest(&dir.path().join("a.manifest.json"));
    assert_eq!(m["parameters"]["seed"], 9);
    let rerun = run(dir.path(), &["validate", "--config", "a.manifest.json", "--out", "c.csv"]);
    assert!(rerun.status.success());
    let c = manifest(&dir.path().join("c.manifest.json"));
    assert_eq!(c["outputs"][0]["sha256"], m["outputs"][0]["sha256"]);
}

#[test]
fn moments_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["moments", "--replications", "2000", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("moments.csv"));
    assert_eq!(rows[0], ["quantity", "analytic", "mc_value", "mc_stderr", "z_score"]);
    let quantities: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert!(quantities.contains(&"mean") && quantities.contains(&"variance"));
    let mean = rows.iter().find(|r| r[0] == "mean").unwrap();
    let exact: f64 = mean[1].parse().unwrap();
    assert!((exact - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-9);
}
