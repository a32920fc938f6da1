//! End-to-end tests of the `cvteleport` binary: output shape, determinism
//! across thread counts, exit codes and config-file handling.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cvteleport"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn fig5_has_expected_header_and_peak() {
    let out = run(&["fig", "fig5", "--steps", "41"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("header line");
    assert_eq!(
        header,
        "squeezing_pct,H,lambda,balance_eta,count_a,count_b,visibility,method"
    );
    // The unentangled curve peaks at λ = 0.45 on this grid with V ≈ 0.447.
    let best = text
        .lines()
        .filter(|l| l.starts_with("0,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[2].parse::<f64>().unwrap(), f[6].parse::<f64>().unwrap())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((best.0 - 0.45).abs() < 1e-12, "peak λ {}", best.0);
    assert!((best.1 - 0.2f64.sqrt()).abs() < 1e-3, "peak V {}", best.1);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let args = ["sweep", "lambda", "--H", "1.125", "--steps", "101"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let four = run(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout, "sweep output depends on thread count");
}

#[test]
fn sweep_lambda_peaks_at_classical_optimum() {
    let out = run(&["sweep", "lambda", "--steps", "101"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let best = text
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse::<f64>().unwrap(), f[11].parse::<f64>().unwrap())
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((best.0 - 0.44).abs() < 1e-12, "grid argmax λ {}", best.0);
}

#[test]
fn optimize_finds_classical_gain() {
    let out = run(&["optimize"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-6);
    assert!((v["visibility"].as_f64().unwrap() - 0.2f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["method"], "engine");
}

#[test]
fn verify_cheat_passes_with_zero_exit() {
    let out = run(&["verify", "cheat"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("PASS cheat_fidelity_deficit"));
    assert!(text.contains("suite cheat: PASS"));
}

#[test]
fn verify_json_reports_suite_shape() {
    let out = run(&["verify", "cloning", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["suite"], "cloning");
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["pass"].as_bool().unwrap());
        assert!(c["measured"].as_f64().unwrap().abs() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(run(&["sweep", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["fig", "fig5", "--steps", "1"]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "lambda", "--range", "2:1"]).status.code(), Some(1));
    assert_eq!(run(&["oracle-check", "--H", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn oracle_check_flags_truncation_leakage() {
    let out = run(&["oracle-check", "--H", "1", "--lambda", "2", "--nmax", "8"]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reliable"], false);
    assert!(v["leakage"].as_f64().unwrap() > 1e-4);
}

#[test]
fn oracle_check_agrees_at_balanced_point() {
    let out = run(&["oracle-check", "--H", "1.125", "--lambda", "0.3333333333333333",
        "--balance-eta", "0.1111111111111111"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["visibility"].as_f64().unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"H": 1.125, "lambda": 0.25, "steps": 5}"#).unwrap();
    let cfg_arg = cfg.to_str().unwrap();

    let from_file = run(&["sweep", "lambda", "--config", cfg_arg]);
    assert!(from_file.status.success());
    let text = stdout(&from_file);
    assert_eq!(text.lines().skip_while(|l| l.starts_with('#')).count(), 6);
    assert!(text.lines().any(|l| l.contains(",1.125,")), "H from config used");

    let overridden = run(&["sweep", "lambda", "--config", cfg_arg, "--H", "2", "--steps", "3"]);
    assert!(overridden.status.success());
    let text = stdout(&overridden);
    assert_eq!(text.lines().skip_while(|l| l.starts_with('#')).count(), 4);
    assert!(text.lines().any(|l| l.contains(",2,")), "flag overrides config");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(
        run(&["sweep", "lambda", "--config", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    let out = run(&["fig", "fig5", "--steps", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert!(text.contains("squeezing_pct,H,lambda"));
}
