use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn coordproj(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coordproj"))
        .current_dir(dir)
        .args(["--deterministic", "--threads", "1"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cube.csv"), "# sign cube on two points\n1,1\n1,-1\n-1,1\n-1,-1\n").unwrap();
    std::fs::write(dir.path().join("spike.csv"), "x1,x2,x3,x4\n1,0,0,0\n").unwrap();
    std::fs::write(dir.path().join("hadamard.csv"), "1,1\n1,-1\n").unwrap();
    dir
}

#[test]
fn report_envelope() {
    let dir = workspace();
    let r = report(&coordproj(dir.path(), &["--seed", "4", "psi", "--input", "spike.csv"]));
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        ["schema", "tool_version", "command", "config", "seed", "results", "fitted_constants", "flags", "timing_ms"]
    );
    assert_eq!(r["command"], "psi");
    assert_eq!(r["seed"], 4);
    assert!(r["timing_ms"].is_null());
    let value = r["results"]["rows"][0]["value"].as_f64().unwrap();
    let expect = (4.0 * (std::f64::consts::E - 1.0) + 1.0_f64).ln().powf(-0.5);
    assert!((value - expect).abs() < 1e-8);
}

#[test]
fn timing_present_without_deterministic_flag() {
    let dir = workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_coordproj"))
        .current_dir(dir.path())
        .args(["psi", "--input", "spike.csv"])
        .output()
        .unwrap();
    let r = report(&out);
    assert!(r["timing_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn floats_carry_seventeen_digits() {
    let dir = workspace();
    let out = coordproj(dir.path(), &["psi", "--input", "spike.csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"value\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
}

#[test]
fn projection_uses_one_based_points() {
    let dir = workspace();
    let r = report(&coordproj(dir.path(), &["project", "--input", "spike.csv", "--indices", "1,2"]));
    assert_eq!(r["results"]["sigma"], serde_json::json!([1, 2]));
    let proj: Vec<f64> = serde_json::from_value(r["results"]["rows"][0]["projected"].clone()).unwrap();
    assert_eq!(proj, vec![1.0, 0.0]);
    let bad = coordproj(dir.path(), &["project", "--input", "spike.csv", "--indices", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn shatter_sign_cube() {
    let dir = workspace();
    let r = report(&coordproj(dir.path(), &["shatter", "--input", "cube.csv", "--t", "0.5"]));
    assert_eq!(r["results"]["vc"], 2);
    let r = report(&coordproj(dir.path(), &["shatter", "--input", "cube.csv", "--t", "1.5"]));
    assert_eq!(r["results"]["vc"], 0);
    let r = report(&coordproj(dir.path(), &["shatter", "--input", "cube.csv", "--t", "1", "--sigma", "2"]));
    assert_eq!(r["results"]["shattered"], true);
    assert_eq!(r["results"]["witness"]["sigma"], serde_json::json!([2]));
}

#[test]
fn hull_on_dual_ball_matches_domination() {
    let dir = workspace();
    let r = report(&coordproj(dir.path(), &["hull", "--input", "hadamard.csv", "--t", "0.7", "--dual-ball"]));
    assert_eq!(r["results"]["shattered"], true);
    let eps = r["results"]["l1_domination"]["epsilon_star"].as_f64().unwrap();
    assert!((eps - 1.0).abs() < 1e-9);
    let r = report(&coordproj(dir.path(), &["hull", "--input", "hadamard.csv", "--t", "1.2", "--dual-ball"]));
    assert_eq!(r["results"]["shattered"], false);
}

#[test]
fn entropy_writes_curves() {
    let dir = workspace();
    let out = coordproj(dir.path(), &["--csv", "curves.csv", "entropy", "--input", "cube.csv", "--t-grid", "0.5,0.9"]);
    let r = report(&out);
    assert_eq!(r["fitted_constants"][0]["name"], "K");
    assert_eq!(r["fitted_constants"][0]["inputs_digest"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("curve,x,y"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn output_file_matches_stdout() {
    let dir = workspace();
    let args = ["complexity", "--input", "cube.csv", "--kind", "rademacher", "--exact"];
    let stdout = coordproj(dir.path(), &args).stdout;
    let mut with_file = vec!["--output", "report.json"];
    with_file.extend_from_slice(&args);
    let out = coordproj(dir.path(), &with_file);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(dir.path().join("report.json")).unwrap(), stdout);
    let r: Value = serde_json::from_slice(&stdout).unwrap();
    assert_eq!(r["results"]["complexity"]["mean"].as_f64(), Some(2.0));
}

#[test]
fn seed_changes_monte_carlo_output() {
    let dir = workspace();
    let a = coordproj(dir.path(), &["--seed", "1", "complexity", "--input", "cube.csv"]);
    let b = coordproj(dir.path(), &["--seed", "2", "complexity", "--input", "cube.csv"]);
    assert_ne!(report(&a)["results"], report(&b)["results"]);
}

#[test]
fn seed_from_environment() {
    let dir = workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_coordproj"))
        .current_dir(dir.path())
        .env("COORDPROJ_SEED", "99")
        .args(["--deterministic", "psi", "--input", "spike.csv"])
        .output()
        .unwrap();
    assert_eq!(report(&out)["seed"], 99);
}

#[test]
fn jl_reports_fitted_constant() {
    let dir = workspace();
    let r = report(&coordproj(dir.path(), &["jl", "--basis", "16", "--eps", "0.5", "--runs", "2"]));
    assert_eq!(r["results"]["runs"].as_array().unwrap().len(), 2);
    assert_eq!(r["fitted_constants"][0]["name"], "C");
    let r = report(&coordproj(dir.path(), &["jl", "--basis", "16", "--eps", "0.5", "--cfit", "1.0"]));
    assert!(r["fitted_constants"].as_array().unwrap().is_empty());
}

#[test]
fn threads_do_not_change_results() {
    let dir = workspace();
    let args = ["jl", "--basis", "32", "--eps", "0.3", "--runs", "6"];
    let one = coordproj(dir.path(), &args).stdout;
    let many = Command::new(env!("CARGO_BIN_EXE_coordproj"))
        .current_dir(dir.path())
        .args(["--deterministic", "--threads", "4"])
        .args(args)
        .output()
        .unwrap()
        .stdout;
    assert_eq!(one, many);
}

#[test]
fn exit_codes() {
    let dir = workspace();
    let missing = coordproj(dir.path(), &["psi", "--input", "absent.csv"]);
    assert_eq!(missing.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"]["reason"], "IO");

    std::fs::write(dir.path().join("ragged.csv"), "1,2\n3\n").unwrap();
    let ragged = coordproj(dir.path(), &["psi", "--input", "ragged.csv"]);
    assert_eq!(ragged.status.code(), Some(2));

    let capped = coordproj(dir.path(), &["shatter", "--input", "cube.csv", "--t", "0.5", "--max-points", "0"]);
    assert_eq!(capped.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&capped.stderr).unwrap();
    assert_eq!(err["error"]["reason"], "SIZE_CAP");

    let bad_eps = coordproj(dir.path(), &["jl", "--basis", "8", "--eps", "1.5"]);
    assert_eq!(bad_eps.status.code(), Some(2));
}

#[test]
fn typecmp_and_audit_run() {
    let dir = workspace();
    std::fs::write(dir.path().join("vec.csv"), "0.5,0\n0,0.5\n0.25,0.25\n").unwrap();
    let r = report(&coordproj(dir.path(), &["typecmp", "--input", "vec.csv", "--trials", "200"]));
    assert_eq!(r["results"]["min_sign_norm"]["exact"], true);
    let r = report(&coordproj(dir.path(), &["audit", "--input", "cube.csv", "--trials", "200"]));
    assert!(r["results"]["k_fit"].as_f64().unwrap() > 0.0);
}
