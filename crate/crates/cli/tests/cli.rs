use std::process::{Command, Output};

use nlpw::saturation::SaturationReport;
use nlpw_cli::commands::LambdaRecord;
use nlpw_cli::emit::to_json;

fn nlpw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlpw")).args(args).output().unwrap()
}

fn nlpw_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlpw")).args(args).env(key, value).output().unwrap()
}

const LAMBDA: &[&str] = &["lambda", "--p", "2.5", "--q", "2", "--r", "2.5", "--alpha", "4", "--n", "64", "--starts", "3", "--seed", "11"];

#[test]
fn lambda_reports_are_deterministic() {
    let a = nlpw(LAMBDA);
    let b = nlpw(LAMBDA);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let single = nlpw_env(LAMBDA, "NLPW_THREADS", "1");
    assert_eq!(a.stdout, single.stdout, "thread count changed the report");
}

#[test]
fn lambda_json_round_trips() {
    let out = nlpw(LAMBDA);
    let record: LambdaRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(to_json(&record).unwrap(), out.stdout);
    for key in ["lambda", "gamma", "grad_norm", "start_label", "iterations"] {
        assert!(String::from_utf8_lossy(&out.stdout).contains(&format!("\"{key}\"")));
    }
    assert!(record.converged);
    assert_eq!(record.starts.len(), 5);
}

#[test]
fn saturation_json_round_trips() {
    let args = ["saturate", "--p", "2", "--q", "2", "--r", "3", "--alpha-min", "0", "--alpha-max", "12", "--steps", "4", "--n", "64"];
    let out = nlpw(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: SaturationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(to_json(&report).unwrap(), out.stdout);
    assert!(report.monotone_ok && report.lipschitz_ok);
    assert!(report.alpha_c.is_some());
    assert_eq!(nlpw(&args).stdout, out.stdout);
}

#[test]
fn empty_sweep_gives_header_only_csv() {
    let out = nlpw(&[
        "saturate", "--p", "2", "--q", "2", "--r", "3", "--alpha-min", "0", "--alpha-max", "1", "--steps", "0", "--no-critical",
        "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "alpha,lambda,even_defect,odd_defect,r_average,zero_count\n");
}

#[test]
fn sweep_csv_side_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let json = dir.path().join("sweep.json");
    let out = nlpw(&[
        "saturate", "--p", "2", "--q", "2", "--r", "3", "--alpha-min", "-2", "--alpha-max", "10", "--steps", "3", "--n", "32",
        "--no-critical", "--csv", csv.to_str().unwrap(), "-o", json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("-2.0000000000000000e0,"));
    assert!(std::fs::read(&json).unwrap().starts_with(b"{"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"p": 2.0, "q": 2.0, "r": 2.5, "m_grid": [0.0, 0.5, 1.0]}"#).unwrap();
    let out = nlpw(&["--config", cfg.to_str().unwrap(), "hfun", "eval", "--r", "2.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "m,p,q,r,H,error,divergent");
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[3], "2.0000000000000000e0");
        assert!((cells[4].parse::<f64>().unwrap() - std::f64::consts::PI).abs() < 1e-8);
    }

    std::fs::write(&cfg, r#"{"p": 2.0, "bogus": 1}"#).unwrap();
    assert!(!nlpw(&["--config", cfg.to_str().unwrap(), "hfun", "eval"]).status.success());
}

#[test]
fn gtrig_eval_csv() {
    let out = nlpw(&["gtrig", "eval", "--p", "2", "--q", "2", "--t", "0,1.5707963267948966,-0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!((rows[1][3] - 1.0).abs() < 1e-15 && rows[1][4].abs() < 1e-15);
    assert!((rows[2][3] - (-0.5f64).sin()).abs() < 1e-14);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(nlpw(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nlpw(&["lambda", "--p", "two"]).status.code(), Some(2));
}

#[test]
fn invalid_input_exits_nonzero_with_a_message() {
    let out = nlpw(&["lambda", "--p", "2", "--q", "2", "--r", "3", "--alpha", "1", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tol"));
    let out = nlpw(&["lambda", "--p", "0.5", "--q", "2", "--r", "3", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quick_verify_passes() {
    let out = nlpw(&["verify", "--quick"]);
    let log = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{log}");
    assert!(!log.contains("FAIL"));
    let report: nlpw_cli::verify::VerifyReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.passed && report.checks.len() >= 15);
}

#[test]
fn under_resolved_verify_fails_and_reports_the_gap() {
    let out = nlpw(&["verify", "--quick", "--n", "16", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("eigen,dirichlet_ground_truth,")).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[2], "false");
    let gap: f64 = cells[3].parse().unwrap();
    assert!(gap > 5e-4 && gap < 1e-2, "gap {gap}");
}
