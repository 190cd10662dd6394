use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_whitbessel"));
    c.env_remove("WHITBESSEL_CONFIG").env("RUST_LOG", "off");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn coeffs_json_and_csv() {
    let out = run(&["coeffs", "--n", "1", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 1);
    assert_eq!(v["convention"], "minus_ik");
    let top = v["a"][1][0].as_f64().unwrap();
    assert!((top - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);

    let out = run(&["coeffs", "--n", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "m,re,im");
    assert_eq!(lines.len(), 4);
}

#[test]
fn eval_kernels() {
    let out = run(&["eval", "bessel_k_quad", "--nu", "0.5", "--x-grid", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let k1 = v["points"][0]["value"][0].as_f64().unwrap();
    let want = (std::f64::consts::PI / 2.0).sqrt() * (-1f64).exp();
    assert!((k1 - want).abs() < 1e-12 * want);

    let out = run(&["eval", "whittaker_w", "--kappa", "2.5", "--mu", "0+0.5i", "--x-grid", "1", "--oracle"]);
    let v = json(&out);
    assert!(v["points"][0]["rel_diff"].as_f64().unwrap() < 1e-12);

    // missing parameter is a usage error
    assert_eq!(run(&["eval", "bessel_i", "--x-grid", "1"]).status.code(), Some(2));
    // degenerate order is refused
    assert_eq!(run(&["eval", "bessel_k", "--nu", "0.5", "--x-grid", "1"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes_and_tol() {
    let out = run(&["verify", "--check", "identity", "--n", "3", "--k", "1", "--x-grid", "0.5,1,2,4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reports"][0]["pass"], true);

    // an impossible tolerance makes the load-bearing check fail
    let out = run(&["verify", "--check", "identity", "--n", "3", "--k", "1", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));

    // advisory failures do not affect the exit code
    let out = run(&["verify", "--check", "second-order", "--n", "5", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let printed = v["reports"].as_array().unwrap().iter().find(|r| r["check"] == "second_order_printed").unwrap();
    assert_eq!(printed["pass"], false);

    assert_eq!(run(&["verify", "--check", "nope", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--check", "ode4", "--n", "1", "--k", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn verify_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = run(&[
        "verify", "--check", "coupled", "--n", "4", "--k", "0.5", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("check,n,k,x,residual,threshold,pass"));
    assert_eq!(text.lines().count(), 1 + 5);

    let bad = dir.path().join("no/such/dir.csv");
    let out = run(&["coeffs", "--n", "1", "--out", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such"));
}

#[test]
fn small_suite_is_deterministic() {
    let args = ["suite", "--n-max", "2", "--k-set", "0,0.5,1", "--x-grid", "0.5,1,2"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["ok"], true);
    assert_eq!(v["ranges"]["n_max"], 2);
    assert!(v["ledger"].as_array().unwrap().iter().any(|l| l.as_str().unwrap().starts_with("advisory")));
}

#[test]
fn config_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "[suite]\nn_max = 1\nk_set = [1.0]\nx_grid = [1.0]\n").unwrap();
    let out = bin().args(["suite"]).env("WHITBESSEL_CONFIG", &cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ranges"]["k_set"], serde_json::json!([1.0]));

    // flags override the file
    let out = run(&["suite", "--config", cfg.to_str().unwrap(), "--n-max", "0"]);
    assert_eq!(json(&out)["ranges"]["n_max"], 0);

    std::fs::write(&cfg, "[eval]\nseries_max_terms = 5\n").unwrap();
    assert_eq!(run(&["suite", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "[eval]\nbogus = 1\n").unwrap();
    assert_eq!(run(&["coeffs", "--n", "1", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn starved_series_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "[eval]\nseries_max_terms = 10\n").unwrap();
    let out = run(&["suite", "--config", cfg.to_str().unwrap(), "--n-max", "1", "--k-set", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
