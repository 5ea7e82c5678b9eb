use std::fs;
use std::path::PathBuf;
use std::process::Command;

use descents::report::{manifest_path, sha256_hex};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_descents"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("descents-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes_partition_outcomes() {
    let ok = bin().args(["dist", "--measure", "R", "--k", "2", "--n", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"0": "3/4", "1": "1/4"}));

    let bad = bin().args(["dist", "--measure", "X", "--k", "2", "--n", "2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let unknown = bin().args(["eulerian", "--n-max", "3", "--colour", "red"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let range = bin().args(["verify", "--oracle-max", "40"]).output().unwrap();
    assert_eq!(range.status.code(), Some(2));

    let fault = bin()
        .args(["verify", "--oracle-max", "4", "--k-max", "3", "--skip-tv-grid", "--inject-fault"])
        .output()
        .unwrap();
    assert_eq!(fault.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&fault.stdout).unwrap();
    let transfer = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["suite"] == "transfer")
        .unwrap();
    assert_eq!(transfer["passed"], false);
    assert!(transfer["counterexample"]["r"].is_u64());
}

#[test]
fn minimal_verify_run_passes() {
    let out = bin().args(["verify", "--oracle-max", "3", "--skip-tv-grid"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn file_output_is_reproducible_and_checksummed() {
    let path = scratch("sample.csv");
    let args = |p: &PathBuf| {
        vec![
            "sample".to_string(),
            "--measure".into(),
            "C".into(),
            "--k".into(),
            "4".into(),
            "--n".into(),
            "6".into(),
            "--count".into(),
            "5000".into(),
            "--seed".into(),
            "17".into(),
            "--format".into(),
            "csv".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    assert!(bin().args(args(&path)).status().unwrap().success());
    let first = fs::read(&path).unwrap();
    assert!(bin().args(args(&path)).status().unwrap().success());
    let second = fs::read(&path).unwrap();
    assert_eq!(first, second);

    let manifest: Value = serde_json::from_slice(&fs::read(manifest_path(&path)).unwrap()).unwrap();
    assert_eq!(manifest["outputs"][0]["sha256"], sha256_hex(&second));
    assert_eq!(manifest["params"]["command"]["sample"]["seed"], 17);
    assert_eq!(manifest["params"]["seed"], 17);
    assert_eq!(manifest["command"], "sample");
}

#[test]
fn auto_seed_lands_in_manifest() {
    let path = scratch("riffle.json");
    let st = bin()
        .args(["riffle", "--n", "5", "--rounds", "2", "--count", "200", "--seed", "auto", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(st.success());
    let manifest: Value = serde_json::from_slice(&fs::read(manifest_path(&path)).unwrap()).unwrap();
    assert!(manifest["params"]["seed"].is_u64());
    assert_eq!(manifest["params"]["command"]["riffle"]["seed"], "auto");
}
