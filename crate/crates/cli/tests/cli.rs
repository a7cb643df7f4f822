use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use piqudit::io::{read_trajectory_csv, Manifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_piqudit"))
}

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_reproduces_superradiance_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = model("superradiance.json");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["run", "-m", spec.to_str().unwrap(), "-o", out.to_str().unwrap(), "--snapshots", "--coo"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv = fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(csv, fs::read(b.join("trajectory.csv")).unwrap());
    assert!(a.join("snapshots.csv").exists() && a.join("liouvillian.csv").exists());

    let manifest = Manifest::from_json(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    let index = manifest.index().unwrap();
    assert_eq!(index.dim, 10);
    let records = read_trajectory_csv(&csv[..], &manifest).unwrap();
    let k = manifest.observables.iter().position(|n| n == "p_mid").unwrap();
    let at = |t: f64| records.iter().find(|r| (r.t - t).abs() < 1e-9).unwrap();
    for t in [0.1, 0.5, 1.0] {
        assert!((at(t).values[k].re - (-2.0 * t).exp()).abs() < 1e-6);
    }
    assert!((at(0.5).values[k].re - 0.3679).abs() < 5e-5);
    // thinning 10 over 1000 steps plus the initial row
    assert_eq!(records.len(), 101);
}

#[test]
fn validate_exit_codes() {
    let spec = model("pair_interaction.json");
    let ok = run(&["validate", "-m", spec.to_str().unwrap(), "--tol", "1e-8"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).contains("PASS"));
    let strict = run(&["validate", "-m", spec.to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(code(&strict), 2);

    let fuzz = run(&["validate", "--fuzz", "12", "--seed", "5"]);
    assert_eq!(code(&fuzz), 0, "{}", stdout(&fuzz));
    assert_eq!(stdout(&fuzz).lines().filter(|l| l.starts_with("fuzz#")).count(), 12);
    let fuzz2 = run(&["validate", "--fuzz", "4", "--seed", "5", "--two-particle"]);
    assert_eq!(code(&fuzz2), 0, "{}", stdout(&fuzz2));
}

#[test]
fn schema_and_cap_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"N": 2, "d": 2, "channels": [{"scope": "local", "jump": [[0,1,0],[0,0,0],[0,0,0]], "rate": 1}],
            "initial_state": {"kind": "maximally_mixed"}, "grid": {"t1": 1}}"#,
    )
    .unwrap();
    let o = run(&["run", "-m", bad.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 2×2"));

    fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["validate", "-m", bad.to_str().unwrap()])), 4);

    let big = dir.path().join("big.json");
    fs::write(&big, r#"{"N": 13, "d": 2, "initial_state": {"kind": "maximally_mixed"}, "grid": {"t1": 0.1, "dt": 0.1, "method": "rk4"}}"#)
        .unwrap();
    assert_eq!(code(&run(&["validate", "-m", big.to_str().unwrap()])), 3);
    assert_eq!(code(&run(&["run", "-m", dir.path().join("missing.json").to_str().unwrap()])), 1);
}

#[test]
fn bench_reports_dimensions() {
    let o = run(&["bench", "--d", "2", "--n-min", "20", "--n-max", "20", "--steps", "1", "--json"]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[0]["commutant_dim"], 1771);
    assert_eq!(rows[0]["full_dim"].as_f64().unwrap(), 4f64.powi(20));
    let o = run(&["bench", "--d", "3", "--n-min", "10", "--n-max", "10", "--steps", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().nth(1).unwrap().split_whitespace().nth(2) == Some("43758"));
}

#[test]
fn tables_dump() {
    let o = run(&["tables", "--N", "4", "--d", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["commutant_dim"], "495");
    assert_eq!(v["shapes"].as_array().unwrap().len(), 4);
    assert!(v.get("cgc").is_none());
    let o = run(&["tables", "--N", "2", "--d", "2", "--cgc"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cgc"]["2"]["1,0,1;1;2,0,1"], "0.7071067811865476");
}
