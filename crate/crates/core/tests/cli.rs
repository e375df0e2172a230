use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caledonia"))
        .args(args)
        .env("CALEDONIA_OUT", dir)
        .output()
        .unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["ladder", "--mu0", "0.2", "--mu1", "0.2"]).status.code(), Some(0));
    assert_eq!(run(d.path(), &["ladder", "--mu0", "2", "--mu1", "0.2"]).status.code(), Some(1));
    assert_eq!(run(d.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["ladder", "--mu0", "x"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn ladder_writes_nine_digit_json() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["ladder", "--mu0", "0.2", "--mu1", "0.2"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("R1=0.0392219336"));
    let v = json(d.path(), "ladder.json");
    assert_eq!(v["rungs"][0], serde_json::json!(0.0392219336));
    assert_eq!(v["c_crit"], serde_json::json!(0.0655513662));
}

#[test]
fn out_flag_overrides_env() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    let out = run(env_dir.path(), &["--out", flag, "equilibrium", "--family", "collinear-equal"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!env_dir.path().join("equilibrium.csv").exists());
    let csv = std::fs::read_to_string(flag_dir.path().join("equilibrium.csv")).unwrap();
    assert!(csv.starts_with("family,mu,branch,R,alpha,n,residual"));
    assert!(csv.contains("2.96613398,0.316243493,1.72224678"));
}

#[test]
fn stability_square_fixture() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["stability", "--family", "square"]).status.code(), Some(0));
    let v = json(d.path(), "stability.json");
    let l = &v[0]["spectrum"]["lambdas"][0];
    assert_eq!(l[0], serde_json::json!(0.311628305));
    assert_eq!(l[1], serde_json::json!(0.996093947));
    assert_eq!(v[0]["spectrum"]["verdict"], "Unstable");
}

#[test]
fn empty_equilibrium_range_is_a_domain_error() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), &["equilibrium", "--family", "triangular-2", "--mu", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn integrate_reports_outcome() {
    let d = tempfile::tempdir().unwrap();
    let args = ["integrate", "--mu0", "0.2", "--mu1", "0.2", "--r1", "0.9", "--r2", "0.5", "--c0", "0.03", "--steps", "200", "--dump"];
    assert_eq!(run(d.path(), &args).status.code(), Some(0));
    let v = json(d.path(), "outcome.json");
    assert!(v["steps_taken"].as_u64().unwrap() <= 200);
    assert!(d.path().join("trajectory.csv").exists());
    // forbidden start
    let bad = ["integrate", "--mu0", "0.2", "--mu1", "0.2", "--r1", "0.1", "--r2", "0.05", "--c0", "0.06"];
    assert_eq!(run(d.path(), &bad).status.code(), Some(1));
}

#[test]
fn sweep_config_and_flag_override() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("spec.json");
    std::fs::write(
        &cfg,
        r#"{"ratios": {"mu0": 0.0, "mu1": 0.25, "mu2": 0.25}, "c0": 0.038, "e0": 0.2,
            "r1_range": [0.2, 0.6], "r2_range": [0.2, 0.6], "step": 0.2, "max_steps": 100, "mode": "general4"}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let out = run(d.path(), &["sweep", "--config", c, "--jobs", "1", "--max-steps", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(d.path(), "manifest.json");
    assert_eq!(m["spec"]["max_steps"], 50);
    assert_eq!(m["cells"], 9);
    let grid = std::fs::read_to_string(d.path().join("grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 10);
    // same directory, different spec
    let out = run(d.path(), &["sweep", "--config", c, "--max-steps", "60"]);
    assert_eq!(out.status.code(), Some(1));
    // missing required field
    let d2 = tempfile::tempdir().unwrap();
    let partial = d2.path().join("p.json");
    std::fs::write(&partial, r#"{"c0": 0.038}"#).unwrap();
    assert_eq!(run(d2.path(), &["census", "--config", partial.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn check_flags_non_equilibria() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["check", "--family", "trapezoid", "--mu", "1", "--params", "1,1"]).status.code(), Some(0));
    assert_eq!(json(d.path(), "check.json")["ok"], true);
    assert_eq!(run(d.path(), &["check", "--family", "trapezoid", "--params", "1"]).status.code(), Some(2));
}
