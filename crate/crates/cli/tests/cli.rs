use std::path::Path;
use std::process::{Command, Output};

fn virasoro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virasoro"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_equations_prints_catalogue() {
    let o = virasoro(&["list-equations"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("camassa_holm") && text.contains("(H1, alpha=1, beta=0)"));
    assert!(text.contains("hunter_saxton") && text.contains("homogeneous_H1"));
}

#[test]
fn verify_reports_are_deterministic() {
    let args = ["verify-algebra", "--trials", "5", "--seed", "7", "--n", "64"];
    let a = virasoro(&args);
    let b = virasoro(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["suite"], "algebra");
    assert_eq!(report["seed"], 7);
    assert_eq!(report["pass"], true);
}

#[test]
fn failing_check_exits_one_and_names_it() {
    let o = virasoro(&["verify-hamiltonian", "--trials", "2", "--n", "64", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert!(stderr(&o).contains("failed: kdv_vector_field"));
}

#[test]
fn report_written_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = virasoro(&["verify-cocycles", "--trials", "2", "--n", "64", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let saved = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(saved.trim_end(), stdout(&o).trim_end());
}

#[test]
fn geodesic_suite_by_field() {
    for field in ["constant", "sin"] {
        let o = virasoro(&["verify-geodesic", "--field", field, "--n", "64"]);
        assert_eq!(o.status.code(), Some(0), "{field}: {}", stderr(&o));
    }
    let o = virasoro(&["verify-geodesic", "--field", "tan"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_preset_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = virasoro(&["simulate", "--config", "kdv_demo", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["snapshots.csv", "conserved.csv", "meta.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let snaps = std::fs::read_to_string(out.join("snapshots.csv")).unwrap();
    let header = snaps.lines().next().unwrap();
    assert!(header.starts_with("t,x_0,x_1") && header.ends_with("x_127"));
    assert_eq!(snaps.lines().count(), 12);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["termination"]["status"], "completed");
    assert_eq!(meta["config"]["equation"]["name"], "kdv");
}

#[test]
fn simulate_reports_blowup_as_normal_termination() {
    let dir = tempfile::tempdir().unwrap();
    let o = virasoro(&["simulate", "--config", "burgers", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("blowup"));
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_errors_exit_two_with_line_context() {
    let dir = tempfile::tempdir().unwrap();
    let bad = "[equation]\nname = \"kdv\"\na = 1.0\n\n[grid]\nn = = 64\n";
    let o = virasoro(&["simulate", "--config", &write_config(dir.path(), bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 6"), "{}", stderr(&o));

    let o = virasoro(&["simulate", "--config", "no_such_preset"]);
    assert_eq!(o.status.code(), Some(2));

    let o = virasoro(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inadmissible_initial_momentum_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[equation]
name = "hunter_saxton"
a = 1.0

[grid]
n = 64

[time]
dt = 1e-3
t_end = 0.01
integrator = "rk4"

[initial]
preset = "cos"
mean = 0.5
variable = "momentum"
"#;
    let out = dir.path().join("out");
    let o = virasoro(&["simulate", "--config", &write_config(dir.path(), body), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kernel"), "{}", stderr(&o));
}

#[test]
fn preset_command_prints_source() {
    let o = virasoro(&["preset", "camassa_holm"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("name = \"camassa_holm\""));
    let o = virasoro(&["preset"]);
    assert!(stdout(&o).lines().any(|l| l == "kdv_demo"));
}
