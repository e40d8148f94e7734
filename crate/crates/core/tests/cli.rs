//! End-to-end checks of the `score` binary.

use std::process::Command;

fn score() -> Command {
    Command::new(env!("CARGO_BIN_EXE_score"))
}

#[test]
fn zero_grid_denoise_returns_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("y.txt");
    let output = dir.path().join("x.txt");
    std::fs::write(&input, "# observation\n1.25\n-0.5\n3\n0.0001\n").unwrap();
    let status = score()
        .args([
            "--mode",
            "denoise",
            "--sigma",
            "1",
            "--lambda-min",
            "0",
            "--lambda-max",
            "0",
        ])
        .args(["--grid-points", "1", "--input"])
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let got: Vec<f64> = std::fs::read_to_string(&output)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(got, vec![1.25, -0.5, 3.0, 0.0001]);
    let summary = String::from_utf8_lossy(&status.stderr);
    assert!(summary.contains("lambda_star=0\n"));
    assert!(summary.contains("P=4\n"));
}

#[test]
fn bad_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("y.txt");
    std::fs::write(&input, "1\n2\nthree\n4\n").unwrap();
    let out = score()
        .args(["--mode", "denoise", "--sigma", "1", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains(":3:") && msg.contains("three"), "{msg}");
}

#[test]
fn conflicting_noise_flags_fail() {
    let out = score()
        .args(["--mode", "curve", "--sigma", "1", "--snr-db", "5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mutually exclusive"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let out_path = dir.path().join("curve.csv");
    std::fs::write(&cfg, "mode=curve\np=200\nsnr-db=5.65\ngrid-points=7\n").unwrap();
    let out = score()
        .arg("--config")
        .arg(&cfg)
        .args(["--grid-points", "5", "--output"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "lambda,score,edof");
    assert_eq!(data.len(), 6);
    assert!(csv.contains("# P=200\n"));
}

#[test]
fn synthetic_denoise_smoke() {
    let out = score()
        .args([
            "--mode", "denoise", "--p", "2e4", "--gamma", "1", "--snr-db", "5.65",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines = String::from_utf8_lossy(&out.stdout).lines().count();
    assert_eq!(lines, 20_000);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda_star="));
}

#[test]
fn consistency_to_stdout() {
    let out = score()
        .args([
            "--mode",
            "consistency",
            "--p-sweep",
            "100,400",
            "--sigma",
            "0.1",
        ])
        .args(["--replicates", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        data[0],
        "P,h,bias_per_P,variance_per_P,dof_closed_form_per_P"
    );
    assert!(data[1].starts_with("100,") && data[2].starts_with("400,"));
}
