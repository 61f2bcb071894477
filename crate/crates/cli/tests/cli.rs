use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freejacobi")).args(args).output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn fubm_table_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let o = run(&["fubm", "--t", "1.0", "--grid", "4096", "--out", csv.to_str().unwrap()]);
    let meta = json_of(&o);
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("theta,kappa"));
    assert_eq!(lines.count(), 4096);
    assert!((meta["g"].as_f64().unwrap() - 1.9131).abs() < 1e-3);
    assert_eq!(meta["support"], "arc");
    assert_eq!(read_json(&dir.path().join("d.json")), meta);
    for m in meta["moments"].as_array().unwrap() {
        assert!((m["closed_form"].as_f64().unwrap() - m["quadrature"].as_f64().unwrap()).abs() < 1e-6);
    }
}

#[test]
fn fubm_parameter_errors_and_full_circle() {
    assert_eq!(run(&["fubm", "--t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["fubm", "--t", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["fubm"]).status.code(), Some(2));
    let meta = json_of(&run(&["fubm", "--t", "8", "--grid", "64"]));
    assert_eq!(meta["support"], "full-circle");
}

#[test]
fn liberation_classical_crosscheck() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "liberation", "--t", "0.5", "--alpha", "0.6", "--beta", "0.2", "--grid", "256", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let meta = json_of(&o);
    assert!(meta["crosscheck"]["max_error"].as_f64().unwrap() < 1e-5);
    assert_eq!(meta["init"]["tag"], "classical");
    assert_eq!(meta["nodes"], 4096);
    assert!((meta["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let atoms = meta["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    let body = std::fs::read_to_string(dir.path().join("liberation.csv")).unwrap();
    assert_eq!(body.lines().count(), 257);
}

#[test]
fn liberation_symmetric_classical_crosscheck() {
    let meta = json_of(&run(&["liberation", "--t", "1", "--alpha", "0", "--beta", "0", "--init", "{\"tag\":\"classical\"}", "--grid", "64"]));
    assert!(meta["crosscheck"]["max_error"].as_f64().unwrap() < 1e-5);
}

#[test]
fn liberation_rejects_bad_parameters() {
    assert_eq!(run(&["liberation", "--t", "1", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["liberation", "--t", "1", "--init", "{\"tag\":\"nope\"}"]).status.code(), Some(2));
    assert_eq!(run(&["liberation", "--t", "1", "--init", "not json"]).status.code(), Some(2));
    let o = run(&["liberation", "--t", "1", "--alpha", "0.5", "--init", "{\"tag\":\"boolean\"}"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn free_start_has_stationary_arcs() {
    let meta = json_of(&run(&[
        "liberation", "--t", "1", "--alpha", "0.6", "--beta", "0.2", "--init", "{\"tag\":\"free\"}", "--grid", "64",
    ]));
    let (a, b) = (meta["arcs"].as_array().unwrap(), meta["stationary_arcs"].as_array().unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        for i in 0..2 {
            assert!((x[i].as_f64().unwrap() - y[i].as_f64().unwrap()).abs() < 1e-4, "{x} vs {y}");
        }
    }
}

#[test]
fn jacobi_atoms() {
    let meta = json_of(&run(&["jacobi", "--t", "1", "--trP", "0.8", "--trQ", "0.6", "--grid", "100"]));
    assert!((meta["atoms"]["0"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((meta["atoms"]["1"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((meta["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(meta["mass_balance"].as_str().unwrap().contains("(density)"));

    let meta = json_of(&run(&["jacobi", "--t", "1", "--trp", "0.5", "--trq", "0.5", "--grid", "100"]));
    assert!((meta["atoms"]["0"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(meta["atoms"].get("1").is_none());
}

#[test]
fn jacobi_parameter_errors() {
    assert_eq!(run(&["jacobi", "--trP", "0.8", "--trQ", "0.6"]).status.code(), Some(2));
    assert_eq!(run(&["jacobi", "--t", "1", "--trP", "0", "--trQ", "0.6"]).status.code(), Some(2));
    assert_eq!(run(&["jacobi", "--t", "1", "--trP", "1.2"]).status.code(), Some(2));
}

#[test]
fn stationary_uniform_law() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let meta = json_of(&run(&["stationary", "--grid", "32", "--out", csv.to_str().unwrap()]));
    assert_eq!(meta["atoms"].as_array().map(|a| a.len()), Some(0));
    for line in std::fs::read_to_string(&csv).unwrap().lines().skip(1) {
        let k: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(k, 1.0);
    }
}

#[test]
fn moments_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let meta = json_of(&run(&["moments", "--t", "0", "--kmax", "4", "--out", csv.to_str().unwrap()]));
    // No asymmetry, classical start: ν_0 is spread evenly on ±1.
    let m: Vec<f64> = meta["moments"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(m, vec![0.0, 1.0, 0.0, 1.0]);
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("k,m_k\n"));
    assert_eq!(body.lines().count(), 5);
    assert_eq!(run(&["moments", "--t", "1", "--kmax", "0"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["verify", "--suite", "closed-forms", "--out", out.to_str().unwrap()]);
    let meta = json_of(&o);
    assert_eq!(meta["passed"], true);
    assert_eq!(meta["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(meta["criteria"][1]["checks"].as_array().unwrap().len(), 15);
    assert_eq!(read_json(&out), meta);
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "mc", "--d", "1"]).status.code(), Some(2));
}

#[test]
fn same_inputs_give_identical_output() {
    let args = ["liberation", "--t", "0.3", "--init", "{\"tag\":\"monotone\"}", "--grid", "128", "--nodes", "1024"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_settings() {
    let o = Command::new(env!("CARGO_BIN_EXE_freejacobi"))
        .args(["fubm", "--t", "1", "--grid", "8"])
        .env("FREEJACOBI_THREADS", "two")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--threads", "1", "fubm", "--t", "1", "--grid", "8"]);
    assert_eq!(o.status.code(), Some(0));
}
