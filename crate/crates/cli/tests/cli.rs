use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bistair"));
    c.env_remove("BISTAIR_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Drops the run-specific parts of a report.
fn strip(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("manifest");
            map.remove("timings");
            map.values_mut().for_each(strip);
        }
        Value::Array(items) => items.iter_mut().for_each(strip),
        _ => {}
    }
}

/// Compares with `tests/golden/<name>.json`; `BISTAIR_BLESS=1` rewrites it.
fn assert_golden(name: &str, stdout: &[u8]) {
    let mut got: Value = serde_json::from_slice(stdout).expect("report is JSON");
    strip(&mut got);
    let path = golden_dir().join(format!("{name}.json"));
    if std::env::var_os("BISTAIR_BLESS").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Value =
        serde_json::from_str(&std::fs::read_to_string(&path).expect("golden file exists")).unwrap();
    assert_eq!(got, want, "report differs from {}", path.display());
}

const SMALL_1D: &[&str] = &[
    "--grid",
    "horizontal=21",
    "--grid",
    "vertical=41",
    "--grid",
    "telescopic_trials=200",
    "--seed",
    "3",
];

const SMALL_2D: &[&str] = &[
    "--grid",
    "psi_x=5",
    "--grid",
    "psi_s=41",
    "--grid",
    "field_x=5",
    "--grid",
    "field_z=21",
    "--grid",
    "saturation=50",
    "--grid",
    "chain_trials=4",
    "--grid",
    "tilts=5",
    "--grid",
    "scan_x=5",
    "--grid",
    "scan_z=21",
    "--seed",
    "1",
];

#[test]
fn verify_1d_golden() {
    let mut args = vec!["verify-1d", "--theta", "0,0.5"];
    args.extend_from_slice(SMALL_1D);
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_golden("verify_1d", &out.stdout);
}

#[test]
fn verify_1d_theta_grid_gives_four_children() {
    let mut args = vec!["verify-1d", "--theta", "0:0.75:0.25"];
    args.extend_from_slice(SMALL_1D);
    let out = run(&args);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v["children"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["suite"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["theta=0", "theta=0.25", "theta=0.5", "theta=0.75"]);
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn theta_one_exits_nonzero() {
    let out = run(&["verify-1d", "--theta", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside [0, 1)"));
}

#[test]
fn failing_checks_exit_one() {
    let mut args = vec!["verify-1d", "--tol", "equality=0", "--tol", "inequality=0"];
    args.extend_from_slice(SMALL_1D);
    let out = run(&args);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed:"));
}

#[test]
fn verify_2d_golden_with_scan() {
    let mut args = vec!["verify-2d", "--explore-theta", "0.25:0.75:0.25"];
    args.extend_from_slice(SMALL_2D);
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_golden("verify_2d", &out.stdout);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let scan = &v["children"][1];
    assert_eq!(scan["suite"], "theta_scan");
    assert_eq!(scan["checks"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_2d_refuses_other_theta() {
    let out = run(&["verify-2d", "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let mut args = vec!["verify-2d", "--theta", "0.5", "--exploratory"];
    args.extend_from_slice(SMALL_2D);
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn malformed_window_in_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"window": [{"x": 0, "y": 0}, {"x": 1, "y": 0}, {"x": 2, "y": 0}]}"#,
    )
    .unwrap();
    let out = run(&["verify-2d", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
}

#[test]
fn scan_theta_never_fails() {
    let out = run(&[
        "scan-theta",
        "--theta",
        "0.5,0.9",
        "--grid",
        "scan_x=5",
        "--grid",
        "scan_z=21",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theta_scan[0.5]") && text.contains("theta_scan[0.9]"));
}

#[test]
fn energy_examples() {
    let dir = TempDir::new().unwrap();
    let stair = dir.path().join("stair.json");
    std::fs::write(
        &stair,
        r#"{"pure_jump_1d": {"window": [-3, 3], "function": {"base": -2, "jumps": [
            {"position": -1, "height": 2}, {"position": 1, "height": 2}]}}}"#,
    )
    .unwrap();
    let zero = dir.path().join("zero.json");
    std::fs::write(
        &zero,
        r#"{"pure_jump_1d": {"window": [-1, 1], "function": {"base": 0}}}"#,
    )
    .unwrap();
    let square = dir.path().join("square.json");
    std::fs::write(
        &square,
        r#"{"cells_2d": {"window": [{"x":0,"y":0},{"x":1,"y":0},{"x":1,"y":1},{"x":0,"y":1}],
            "cells": {"regions": [{"outer": [{"x":0,"y":0},{"x":1,"y":0},{"x":1,"y":1},{"x":0,"y":1}], "value": 0}],
                      "interfaces": []}}}"#,
    )
    .unwrap();
    let total = |path: &Path| {
        let out = run(&["energy", path.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["functions"][0]["energy"]["total"].as_f64().unwrap()
    };
    assert_eq!(total(&stair), 14.0);
    assert_eq!(total(&zero), 2.0);
    assert_eq!(total(&square), 1.0);

    let out = run(&["energy", stair.to_str().unwrap(), zero.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["difference"]["total"].as_f64(), Some(-12.0));
}

#[test]
fn energy_schema_error_has_location() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\"pure_jump_1d\": {\"window\": [-1, 1],\n  \"function\": {\"base\": \"zero\"}}}",
    )
    .unwrap();
    let out = run(&["energy", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains(":2:") && err.contains("pure_jump_1d.function.base"),
        "{err}"
    );
}

#[test]
fn export_files() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("figs");
    let out = run(&[
        "export",
        "--format",
        "csv",
        "--out",
        out_dir.to_str().unwrap(),
        "--grid",
        "heatmap_x=3",
        "--grid",
        "heatmap_z=11",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let curve = std::fs::read_to_string(out_dir.join("interface_curve_theta0.csv")).unwrap();
    let (header, rows) = bistair::io::read_csv(&curve).unwrap();
    assert_eq!(header, ["x", "f"]);
    assert_eq!(rows.len(), 1201);
    assert_eq!(rows[0][0], -3.0);
    assert_eq!(rows[1200][0], 3.0);
    assert_eq!(rows[600][1], 0.0);

    let jumps: Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("jump_set_theta0.json")).unwrap(),
    )
    .unwrap();
    let pts: Vec<(f64, f64)> = jumps["interfaces"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|i| {
            i["points"]
                .as_array()
                .unwrap()
                .iter()
                .map(|p| (p["x"].as_f64().unwrap(), p["y"].as_f64().unwrap()))
        })
        .collect();
    assert!(pts
        .iter()
        .all(|&(x, y)| (-2.0..=10.0).contains(&x) && (-3.0..=4.5).contains(&y)));
    assert!(pts.iter().any(|p| p.0 == 10.0) && pts.iter().any(|p| p.1 == 4.5));

    let index: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("index.json")).unwrap())
            .unwrap();
    assert_eq!(index["files"].as_array().unwrap().len(), 4);
    assert_eq!(index["manifest"]["command"], "export");
}

#[test]
fn export_rejects_zero_samples() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "export",
        "--samples",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["verify-1d", "--format", "csv"];
    args.extend_from_slice(SMALL_1D);
    let out = bin()
        .args(&args)
        .env("BISTAIR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("verify-1d.csv")).unwrap();
    assert!(text.starts_with("suite,kind,name,value,tolerance,samples,pass,exploratory\n"));
}

#[test]
fn manifest_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first.json");
    let mut args = vec![
        "verify-1d",
        "--theta",
        "0.25",
        "--out",
        first.to_str().unwrap(),
    ];
    args.extend_from_slice(SMALL_1D);
    assert!(run(&args).status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let mut config = report["manifest"]["params"]["config"].clone();
    config.as_object_mut().unwrap().remove("out");
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, config.to_string()).unwrap();
    let second = run(&["verify-1d", "--config", cfg_path.to_str().unwrap()]);
    assert!(second.status.success());
    let mut a = report.clone();
    let mut b: Value = serde_json::from_slice(&second.stdout).unwrap();
    strip(&mut a);
    strip(&mut b);
    assert_eq!(a, b);
}
