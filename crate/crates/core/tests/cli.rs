use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_wigner-align");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env("WIGNER_ALIGN_THREADS", "2").output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn no_arguments_is_a_usage_error() {
    let (code, _, err) = run(&[]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
}

#[test]
fn phase_csv_is_reproducible() {
    let args = ["phase", "--n", "5,7", "--gamma", "1,3", "--rho", "0.99", "--trials", "15", "--seed", "3"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(a, run(&args).1);
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[0].starts_with("n,gamma,rho,trials,"));
    assert_eq!(lines.len(), 1 + 6);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("phase.json");
    std::fs::write(&cfg, r#"{"n": [5], "rho": [0.9], "trials": 4, "seed": 11}"#).unwrap();
    let (code, from_file, _) = run(&["phase", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(from_file.lines().nth(1).unwrap().starts_with("5,"));
    let (_, overridden, _) = run(&["phase", "--config", cfg.to_str().unwrap(), "--trials", "6"]);
    assert!(overridden.lines().nth(1).unwrap().contains(",6,"));
    std::fs::write(&cfg, r#"{"nn": [5]}"#).unwrap();
    assert_eq!(run(&["phase", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn sample_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.wgal");
    let p = path.to_str().unwrap();
    let (code, _, _) = run(&["sample", "--n", "7", "--rho", "0.99", "--seed", "5", "--out", p]);
    assert_eq!(code, 0);
    for method in ["brute", "spectral", "descent", "spectral-descent"] {
        let (code, out, _) = run(&["solve", "--input", p, "--method", method]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["pi_hat"].as_array().unwrap().len(), 7);
    }
    let (_, out, _) = run(&["solve", "--input", p, "--method", "brute"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["recovered"], true);
    assert_eq!(v["energy"]["relative"], 0.0);
    assert_eq!(run(&["solve", "--input", "/definitely/missing"]).0, 2);
}

#[test]
fn theory_and_concentration_report_json_lines() {
    let (code, out, _) = run(&["theory-check", "--grid", "2000", "--beta-grid", "101"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
    for l in out.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert_eq!(v["pass"], true);
    }
    let (code, out, _) = run(&["concentration", "--analytic-only"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn concentration_exit_code_tracks_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"analytic": null, "bivariate": null, "hanson_wright": [], "max_tc": [{"big_n": 16, "v": 1.0, "c": 0.0, "trials": 1}]}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["concentration", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    assert!(code == 0 || code == 1);
    let all_pass = out.lines().all(|l| l.contains("\"pass\":true"));
    assert_eq!(code == 0, all_pass);
}

#[test]
fn transpositions_summary() {
    let (code, out, _) = run(&["transpositions", "--n", "120", "--a-n", "4", "--trials", "6", "--seed", "2", "--full"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["x_values"].as_array().unwrap().len(), 6);
    assert_eq!(run(&["transpositions", "--n", "120"]).0, 2);
}
