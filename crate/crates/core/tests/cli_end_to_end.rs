//! Exercise the installed binary the way a user would: config files, flag
//! overrides, output formats and exit codes.

use std::process::Command;

fn sqdyn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqdyn"))
}

#[test]
fn simulate_csv_to_file_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ho.csv");
    let status = sqdyn()
        .args([
            "simulate",
            "--system",
            "harmonic",
            "--omega",
            "1",
            "--x0",
            "1",
            "--tau-max",
            "6.283185307179586",
            "--dt-out",
            "0.1",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "tau,x,p,var_x,var_p,cov_xp,product");
    for line in lines {
        let product: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!((product - 0.25).abs() < 1e-12, "line {line}");
    }
}

#[test]
fn simulate_json_format() {
    let output = sqdyn()
        .args([
            "simulate", "--system", "free", "--p0", "1", "--tau-max", "1", "--dt-out", "0.5",
            "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let last = rows.as_array().unwrap().last().unwrap();
    assert!((last["x"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((last["product"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        r#"
[system]
kind = "harmonic"
omega = 2.0

[initial]
x0 = 1.0

[time]
tau_max = 1.0
dt_out = 0.5
"#,
    )
    .unwrap();
    // --omega 1 overrides the config's omega = 2
    let output = sqdyn()
        .arg("--config")
        .arg(&config)
        .args(["simulate", "--omega", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let last = text.lines().last().unwrap();
    let x: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((x - 1.0f64.cos()).abs() < 1e-12);
}

#[test]
fn verify_passes_and_prints_matrix() {
    let output = sqdyn().args(["verify", "--skip-oracle"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.lines().count() >= 9);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn sweep_matches_closed_form() {
    let output = sqdyn()
        .args([
            "sweep", "--system", "harmonic", "--omega", "1", "--tau-max",
            "6.283185307179586", "--dt-out", "0.01", "--param", "r", "--values", "0,1",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "param1,param2,product_max,product_final");
    let row_r1 = lines.nth(1).unwrap();
    let product_max: f64 = row_r1.split(',').nth(2).unwrap().parse().unwrap();
    let expected = 0.25 * (1.0 + 2.0f64.sinh().powi(2));
    assert!((product_max - expected).abs() < 1e-3, "{product_max} vs {expected}");
}

#[test]
fn exit_codes() {
    // validation error: unknown system
    let status = sqdyn()
        .args(["simulate", "--system", "nosuch"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // validation error: bad sweep parameter
    let status = sqdyn()
        .args([
            "sweep", "--system", "free", "--param", "x0", "--values", "1,2",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // numerical failure: oracle packet runs off a tiny grid
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("leak.csv");
    let status = sqdyn()
        .args([
            "simulate", "--system", "free", "--p0", "5", "--tau-max", "4", "--dt-out", "1",
            "--oracle", "--grid-n", "256", "--grid-domain", "6", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn plot_files_emitted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let status = sqdyn()
        .args([
            "simulate", "--system", "harmonic", "--omega", "1", "--x0", "1", "--tau-max",
            "3", "--dt-out", "0.1", "--plot", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for suffix in [".x.svg", ".product.svg"] {
        let path = dir.path().join(format!("run{suffix}"));
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
    }
}
