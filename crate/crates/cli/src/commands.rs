//! Subcommand implementations. Each returns the CSV table (if any) and
//! the JSON metadata; [`emit`] writes them.

use crate::args::*;
use crate::verify::{run_suite, McSettings};
use crate::{CliResult, Failure};
use freejacobi_core::fubm::{fubm_density, fubm_moment, support_edge};
use freejacobi_core::initlaws::{InitialLaw, InitialLawSpec};
use freejacobi_core::jacobi::{mu_t, ProjectionPair};
use freejacobi_core::liberation::{nu_t_detailed, stationary_arcs, stationary_measure, LiberationParams, NuOptions};
use freejacobi_core::measures::{uniform_grid, CircleMeasure, IntervalMeasure};
use freejacobi_core::momentflow::{crosscheck_with_nodes, evolve_moments, MAX_ORDER};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

/// Result of a subcommand before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Output {
    pub name: &'static str,
    pub csv: Option<String>,
    pub json: Value,
    /// False only for a failed verification.
    pub ok: bool,
}

pub fn run(cmd: &Command) -> CliResult<Output> {
    match cmd {
        Command::Fubm(a) => fubm(a),
        Command::Liberation(a) => liberation(a),
        Command::Jacobi(a) => jacobi(a),
        Command::Stationary(a) => stationary(a),
        Command::Moments(a) => moments(a),
        Command::Verify(a) => verify(a),
    }
}

pub fn out_of(cmd: &Command) -> &OutArgs {
    match cmd {
        Command::Fubm(a) => &a.out,
        Command::Liberation(a) => &a.out,
        Command::Jacobi(a) => &a.out,
        Command::Stationary(a) => &a.out,
        Command::Moments(a) => &a.out,
        Command::Verify(a) => &a.out,
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn check_time(t: f64, strict: bool) -> CliResult<()> {
    let ok = t.is_finite() && if strict { t > 0.0 } else { t >= 0.0 };
    if !ok {
        let need = if strict { "t > 0" } else { "t >= 0" };
        return Err(usage(format!("--t {t}: {need} is required")));
    }
    Ok(())
}

fn check_count(name: &str, n: usize, min: usize) -> CliResult<()> {
    if n < min {
        return Err(usage(format!("--{name} {n} must be at least {min}")));
    }
    Ok(())
}

fn parse_init(json: &str, alpha: f64, beta: f64) -> CliResult<(InitialLaw, Value)> {
    let spec: InitialLawSpec =
        serde_json::from_str(json).map_err(|e| usage(format!("--init is not a valid initial law: {e}")))?;
    let law = spec.build(alpha, beta)?;
    Ok((law, serde_json::to_value(&spec).expect("spec serializes")))
}

/// Density of a circle measure resampled on `grid` uniform angles.
fn circle_table(m: &CircleMeasure, grid: usize) -> String {
    let mut s = String::from("theta,kappa\n");
    for th in uniform_grid(grid) {
        s.push_str(&format!("{:.16e},{:.16e}\n", th, m.density_at(th)));
    }
    s
}

/// Density of an interval measure at the midpoints of `grid` cells.
fn interval_table(m: &IntervalMeasure, grid: usize) -> String {
    let mut s = String::from("x,density\n");
    for j in 0..grid {
        let x = (j as f64 + 0.5) / grid as f64;
        s.push_str(&format!("{:.16e},{:.16e}\n", x, m.density_at(x)));
    }
    s
}

fn arcs_json(arcs: &[(f64, f64)]) -> Value {
    Value::from(arcs.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>())
}

fn fubm(a: &FubmArgs) -> CliResult<Output> {
    check_time(a.t, true)?;
    check_count("grid", a.grid, 2)?;
    check_count("nodes", a.nodes, 16)?;
    let m = fubm_density(a.t, a.nodes)?;
    let g = support_edge(a.t)?;
    let moments: Vec<Value> = (0..=10)
        .map(|k| {
            let exact = fubm_moment(a.t, k)?;
            Ok(json!({ "k": k, "closed_form": exact, "quadrature": m.circle_moment(k as i64).re }))
        })
        .collect::<freejacobi_core::Result<_>>()?;
    let json = json!({
        "command": "fubm",
        "t": a.t,
        "grid": a.grid,
        "nodes": a.nodes,
        "g": g,
        "support": if g >= PI { "full-circle" } else { "arc" },
        "total_mass": m.total_mass(),
        "moments": moments,
    });
    Ok(Output { name: "fubm", csv: Some(circle_table(&m, a.grid)), json, ok: true })
}

fn liberation(a: &LiberationArgs) -> CliResult<Output> {
    check_time(a.t, false)?;
    check_count("grid", a.grid, 2)?;
    check_count("nodes", a.nodes, 16)?;
    if a.kmax == 0 || a.kmax > MAX_ORDER {
        return Err(usage(format!("--kmax {} must lie in 1..={MAX_ORDER}", a.kmax)));
    }
    let p = LiberationParams::new(a.alpha, a.beta)?;
    let (law, init) = parse_init(&a.init, a.alpha, a.beta)?;
    let (la, lb) = law.traces();
    if la != a.alpha || lb != a.beta {
        return Err(usage(format!("the initial law has traces ({la}, {lb}), not ({}, {})", a.alpha, a.beta)));
    }
    let r = nu_t_detailed(a.t, &law, &p, NuOptions::with_nodes(a.nodes))?;
    let cross = crosscheck_with_nodes(a.t, &law, &p, a.kmax, a.nodes)?;
    let json = json!({
        "command": "liberation",
        "t": a.t,
        "alpha": a.alpha,
        "beta": a.beta,
        "init": init,
        "grid": a.grid,
        "nodes": a.nodes,
        "atoms": r.measure.atoms_json()["atoms"],
        "arcs": arcs_json(&r.arcs),
        "stationary_arcs": arcs_json(&stationary_arcs(&p)),
        "density_mass": r.measure.density_mass(),
        "total_mass": r.measure.total_mass(),
        "fallbacks": r.fallbacks,
        "crosscheck": { "kmax": a.kmax, "max_error": cross },
    });
    Ok(Output { name: "liberation", csv: Some(circle_table(&r.measure, a.grid)), json, ok: true })
}

fn jacobi(a: &JacobiArgs) -> CliResult<Output> {
    check_time(a.t, false)?;
    check_count("grid", a.grid, 2)?;
    check_count("nodes", a.nodes, 16)?;
    let pp = ProjectionPair::new(a.tr_p, a.tr_q)?;
    let (law, init) = parse_init(&a.init, pp.alpha(), pp.beta())?;
    let mu = mu_t(a.t, &law, &pp, a.nodes)?;
    let mut atoms = serde_json::Map::new();
    if mu.mass_at_zero > 0.0 {
        atoms.insert("0".into(), json!(mu.mass_at_zero));
    }
    if mu.mass_at_one > 0.0 {
        atoms.insert("1".into(), json!(mu.mass_at_one));
    }
    let dens = mu.density_mass();
    let total = mu.total_mass();
    let json = json!({
        "command": "jacobi",
        "t": a.t,
        "trP": a.tr_p,
        "trQ": a.tr_q,
        "init": init,
        "grid": a.grid,
        "nodes": a.nodes,
        "atoms": atoms,
        "density_mass": dens,
        "total_mass": total,
        "mass_balance": format!(
            "{:.9} (at 0) + {:.9} (at 1) + {:.9} (density) = {:.9}",
            mu.mass_at_zero, mu.mass_at_one, dens, total
        ),
    });
    Ok(Output { name: "jacobi", csv: Some(interval_table(&mu, a.grid)), json, ok: true })
}

fn stationary(a: &StationaryArgs) -> CliResult<Output> {
    check_count("grid", a.grid, 2)?;
    check_count("nodes", a.nodes, 16)?;
    let p = LiberationParams::new(a.alpha, a.beta)?;
    let m = stationary_measure(&p, a.nodes)?;
    let json = json!({
        "command": "stationary",
        "alpha": a.alpha,
        "beta": a.beta,
        "grid": a.grid,
        "nodes": a.nodes,
        "atoms": m.atoms_json()["atoms"],
        "arcs": arcs_json(&stationary_arcs(&p)),
        "total_mass": m.total_mass(),
    });
    Ok(Output { name: "stationary", csv: Some(circle_table(&m, a.grid)), json, ok: true })
}

fn moments(a: &MomentsArgs) -> CliResult<Output> {
    check_time(a.t, false)?;
    if a.kmax == 0 || a.kmax > MAX_ORDER {
        return Err(usage(format!("--kmax {} must lie in 1..={MAX_ORDER}", a.kmax)));
    }
    LiberationParams::new(a.alpha, a.beta)?;
    let (law, init) = parse_init(&a.init, a.alpha, a.beta)?;
    let (la, lb) = law.traces();
    let m0 = law.initial_moments(a.kmax)?;
    let st = evolve_moments(&m0, la, lb, a.t, a.kmax)?;
    let json = json!({
        "command": "moments",
        "t": a.t,
        "alpha": la,
        "beta": lb,
        "init": init,
        "kmax": a.kmax,
        "moments": st.m,
    });
    Ok(Output { name: "moments", csv: Some(st.to_csv()), json, ok: true })
}

fn verify(a: &VerifyArgs) -> CliResult<Output> {
    let s = McSettings { d: a.d, replicas: a.replicas, seed: a.seed };
    let report = run_suite(&a.suite, &s)?;
    let ok = report.passed;
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Output { name: "verify", csv: None, json, ok })
}

/// Where the files go. A path ending in `.csv` (or `.json` for a report)
/// names the table itself and the metadata takes the same stem; any other
/// path is a directory holding `<command>.csv` and `<command>.json`.
pub fn targets(out: &Path, name: &str, has_csv: bool) -> (Option<PathBuf>, PathBuf) {
    match out.extension().and_then(|e| e.to_str()) {
        Some("csv") => (has_csv.then(|| out.to_path_buf()), out.with_extension("json")),
        Some("json") => (has_csv.then(|| out.with_extension("csv")), out.to_path_buf()),
        _ => (has_csv.then(|| out.join(format!("{name}.csv"))), out.join(format!("{name}.json"))),
    }
}

/// Writes the output files (if `--out` was given) and returns the JSON
/// text that goes to stdout.
pub fn emit(o: &Output, out: Option<&Path>) -> CliResult<String> {
    let text = serde_json::to_string_pretty(&o.json).expect("json serializes") + "\n";
    if let Some(out) = out {
        let (csv, meta) = targets(out, o.name, o.csv.is_some());
        let io = |p: &Path, e: std::io::Error| usage(format!("cannot write {}: {e}", p.display()));
        if let Some(dir) = meta.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        }
        if let (Some(p), Some(body)) = (csv, &o.csv) {
            fs::write(&p, body).map_err(|e| io(&p, e))?;
        }
        fs::write(&meta, &text).map_err(|e| io(&meta, e))?;
    }
    Ok(text)
}
