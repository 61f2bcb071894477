//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion.

use freejacobi_cli::verify::*;
use std::process::Command;
use std::time::{Duration, Instant};

struct Line {
    id: String,
    passed: bool,
    detail: String,
}

fn timed(f: impl FnOnce() -> CriterionResult, limit: Option<Duration>) -> Line {
    let start = Instant::now();
    let r = f();
    let took = start.elapsed();
    let fast = limit.map_or(true, |l| took < l);
    let worst: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} measured {:?} tol {}", c.name, c.measured, c.tolerance))
        .collect();
    let limit_s = limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs()));
    let mut detail = format!("{} checks, {:.1}s (limit {limit_s})", r.checks.len(), took.as_secs_f64());
    if !worst.is_empty() {
        detail.push_str(&format!("; failing: {}", worst.join("; ")));
    }
    Line { id: r.id.to_string(), passed: r.passed && fast, detail }
}

fn verify_mc(path: &std::path::Path) -> (i32, Vec<u8>, Duration) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_freejacobi"))
        .args(["verify", "--suite", "mc", "--d", "300", "--replicas", "20", "--seed", "7", "--out"])
        .arg(path)
        .output()
        .expect("binary runs");
    let took = start.elapsed();
    (status.status.code().unwrap_or(-1), std::fs::read(path).unwrap_or_default(), took)
}

#[test]
fn acceptance() {
    let s = |n| Some(Duration::from_secs(n));
    let mut lines = vec![
        timed(fubm_moments, s(10)),
        timed(centered_delta, s(60)),
        timed(push_forward, s(120)),
        timed(moment_oracle, s(30)),
        timed(atom_structure, None),
        timed(mass_balance, None),
        timed(stationary_limit, None),
    ];

    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("first.json"), dir.path().join("second.json"));
    let (code, first, took) = verify_mc(&a);
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap_or(serde_json::Value::Null);
    let mc_ok = code == 0 && report["passed"] == serde_json::Value::Bool(true);
    lines.push(Line {
        id: "monte-carlo".into(),
        passed: mc_ok && took < Duration::from_secs(300),
        detail: format!("exit {code}, {:.1}s (limit 300s)", took.as_secs_f64()),
    });
    let (code2, second, _) = verify_mc(&b);
    lines.push(Line {
        id: "determinism".into(),
        passed: !first.is_empty() && first == second && code == code2,
        detail: format!("{} and {} report bytes", first.len(), second.len()),
    });

    for l in &lines {
        println!("{} {} ({})", if l.passed { "PASS" } else { "FAIL" }, l.id, l.detail);
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.passed).map(|l| l.id.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
