//! Verification suites: each criterion recomputes a known identity and
//! records the measured error next to its tolerance.
//!
//! Reports contain no timings or other run-dependent data, so a fixed
//! seed gives byte-identical output.

use crate::{CliResult, Failure};
use freejacobi_core::fubm::{biane_h, fubm_density, fubm_moment, support_edge};
use freejacobi_core::initlaws::InitialLaw;
use freejacobi_core::jacobi::{herglotz_nu_from_mu, mu_t, szego_to_interval, ProjectionPair};
use freejacobi_core::liberation::{
    nu_t, nu_t_detailed, stationary_density, stationary_measure, FlowHerglotz, LiberationParams, NuOptions,
};
use freejacobi_core::measures::{atom_mass, CircleMeasure};
use freejacobi_core::momentflow::{crosscheck, evolve_moments};
use freejacobi_core::{Complex64 as C, Result};
use freejacobi_rmt::empirical::{at_checkpoint, trace_moment};
use freejacobi_rmt::{empirical_jacobi_from, empirical_nu_from, sample_paths, McConfig, Structure};
use serde::Serialize;
use std::f64::consts::PI;

/// One measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when the computation itself failed.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    /// Passes when the measured error is at most `tolerance`.
    pub fn within(name: impl Into<String>, measured: Result<f64>, tolerance: f64) -> Check {
        let name = name.into();
        match measured {
            Ok(v) => Check { name, measured: Some(v), tolerance, passed: v <= tolerance, error: None },
            Err(e) => Check { name, measured: None, tolerance, passed: false, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    fn new(id: &'static str, title: &'static str, checks: Vec<Check>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        CriterionResult { id, title, passed, checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub d: usize,
    pub replicas: usize,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub d: usize,
    pub replicas: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings { d: 300, replicas: 20, seed: 7 }
    }
}

pub const SUITES: [&str; 8] = ["closed-forms", "fubm", "moments", "structure", "jacobi", "stationary", "mc", "all"];

const NODES: usize = 4096;

pub fn run_suite(suite: &str, s: &McSettings) -> CliResult<Report> {
    type Crit = fn(&McSettings) -> CriterionResult;
    let fubm: [Crit; 3] = [|_| fubm_moments(), |_| centered_delta(), |_| push_forward()];
    let list: Vec<Crit> = match suite {
        "closed-forms" => fubm[1..].to_vec(),
        "fubm" => fubm[..1].to_vec(),
        "moments" => vec![|_| moment_oracle()],
        "structure" => vec![|_| atom_structure()],
        "jacobi" => vec![|_| mass_balance()],
        "stationary" => vec![|_| stationary_limit()],
        "mc" => vec![monte_carlo],
        "all" => {
            let mut v = fubm.to_vec();
            v.extend([
                (|_| moment_oracle()) as Crit,
                |_| atom_structure(),
                |_| mass_balance(),
                |_| stationary_limit(),
                monte_carlo,
            ]);
            v
        }
        other => return Err(Failure::Usage(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    };
    if suite == "mc" || suite == "all" {
        McConfig::new(s.d, s.replicas, s.seed, 1.0, 0.0, 0.0).validate()?;
    }
    let criteria: Vec<CriterionResult> = list.iter().map(|f| f(s)).collect();
    let passed = criteria.iter().all(|c| c.passed);
    Ok(Report { suite: suite.to_string(), seed: s.seed, d: s.d, replicas: s.replicas, passed, criteria })
}

fn params(a: f64, b: f64) -> Result<LiberationParams> {
    LiberationParams::new(a, b)
}

/// Free unitary Brownian motion density at `t` (zero off the support).
fn rho(t: f64, theta: f64) -> f64 {
    biane_h(t, theta).map(|h| h.re.max(0.0)).unwrap_or(0.0)
}

/// Sup over the nodes of `m` of `|κ − f|`.
fn node_error(m: &CircleMeasure, f: impl Fn(f64) -> f64) -> f64 {
    m.nodes().iter().zip(m.values()).map(|(&x, &v)| (v - f(x)).abs()).fold(0.0, f64::max)
}

/// Quadrature moments of the free unitary Brownian motion density
/// against the closed-form sums.
pub fn fubm_moments() -> CriterionResult {
    let checks = [0.25, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&t| {
            let err = (|| {
                let m = fubm_density(t, NODES)?;
                let mut worst: f64 = 0.0;
                for k in 0..=10u32 {
                    worst = worst.max((m.circle_moment(k as i64) - fubm_moment(t, k)?).norm());
                }
                Ok(worst)
            })();
            Check::within(format!("t={t}, k<=10"), err, 1e-6)
        })
        .collect();
    CriterionResult::new("fubm-moments", "Free unitary Brownian motion moments", checks)
}

/// With no asymmetry and `ν_0 = δ_1` the law is that of a free unitary
/// Brownian motion at time `2t`.
pub fn centered_delta() -> CriterionResult {
    let checks = [0.3, 1.0, 2.5]
        .iter()
        .map(|&t| {
            let err = (|| {
                let nu = nu_t(t, &InitialLaw::centered_delta(), &params(0.0, 0.0)?, NODES)?;
                Ok(node_error(&nu, |x| rho(2.0 * t, x)))
            })();
            Check::within(format!("t={t}"), err, 1e-4)
        })
        .collect();
    CriterionResult::new("centered-delta", "Centered point-mass start", checks)
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Largest endpoint mismatch between computed arcs and `p` arcs of
/// half-width `g(2pt)/p` centred at the `p`-th roots of unity.
fn arc_error(arcs: &[(f64, f64)], p: usize, t: f64) -> Result<f64> {
    let half = support_edge(2.0 * p as f64 * t)? / p as f64;
    let expect: Vec<(f64, f64)> = if half * p as f64 >= PI - 1e-12 {
        vec![(-PI, PI)]
    } else {
        let mut v: Vec<(f64, f64)> = (0..p)
            .map(|k| {
                let s = wrap(2.0 * PI * k as f64 / p as f64 - half);
                (s, s + 2.0 * half)
            })
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let mut got = arcs.to_vec();
    got.sort_by(|a, b| a.0.total_cmp(&b.0));
    if got.len() != expect.len() {
        return Err(freejacobi_core::Error::Numeric(format!(
            "{} arcs found, {} expected",
            got.len(),
            expect.len()
        )));
    }
    if expect.len() == 1 && expect[0] == (-PI, PI) {
        // Full circle: only the length is meaningful.
        return Ok((got[0].1 - got[0].0 - 2.0 * PI).abs());
    }
    Ok(got.iter().zip(&expect).map(|(a, b)| (a.0 - b.0).abs().max((a.1 - b.1).abs())).fold(0.0, f64::max))
}

/// Power push-forwards of the classical, boolean and monotone starts,
/// their support arcs, and stationarity of the free start.
pub fn push_forward() -> CriterionResult {
    let mut checks = Vec::new();
    let laws = [("classical", InitialLaw::classical(0.0, 0.0), 2u32), ("boolean", Ok(InitialLaw::BooleanSymmetric), 3), ("monotone", Ok(InitialLaw::MonotoneSymmetric), 4)];
    for (name, law, p) in &laws {
        for t in [0.2, 0.5] {
            let run = (|| {
                let law = law.clone()?;
                nu_t_detailed(t, &law, &params(0.0, 0.0)?, NuOptions::with_nodes(NODES))
            })();
            let dens = run.as_ref().map_err(Clone::clone).and_then(|r| {
                let pf = r.measure.push_forward_power(*p)?;
                Ok(node_error(&pf, |x| rho(2.0 * *p as f64 * t, x)))
            });
            checks.push(Check::within(format!("{name} p={p} t={t} density"), dens, 1e-4));
            let arcs = run.as_ref().map_err(Clone::clone).and_then(|r| arc_error(&r.arcs, *p as usize, t));
            checks.push(Check::within(format!("{name} p={p} t={t} arcs"), arcs, 1e-4));
        }
    }
    for t in [0.1, 1.0, 10.0] {
        let err = (|| {
            let p = params(0.6, 0.2)?;
            let nu = nu_t(t, &InitialLaw::free(0.6, 0.2)?, &p, NODES)?;
            Ok(node_error(&nu, |x| stationary_density(x, &p)))
        })();
        checks.push(Check::within(format!("free (0.6, 0.2) t={t} stationary"), err, 1e-4));
    }
    CriterionResult::new("push-forward", "Power push-forwards and support arcs", checks)
}

/// Flow moments against the moment hierarchy.
pub fn moment_oracle() -> CriterionResult {
    let sets: [(&str, f64, f64, f64); 6] = [
        ("free", 0.6, 0.2, 1.0),
        ("classical", 0.6, 0.2, 0.5),
        ("classical", 0.3, 0.3, 1.0),
        ("boolean", 0.0, 0.0, 0.3),
        ("monotone", 0.0, 0.0, 0.5),
        ("centered", 0.0, 0.0, 0.7),
    ];
    let checks = sets
        .iter()
        .map(|&(tag, a, b, t)| {
            let err = (|| {
                let law = match tag {
                    "free" => InitialLaw::free(a, b)?,
                    "classical" => InitialLaw::classical(a, b)?,
                    "boolean" => InitialLaw::BooleanSymmetric,
                    "monotone" => InitialLaw::MonotoneSymmetric,
                    _ => InitialLaw::centered_delta(),
                };
                crosscheck(t, &law, &params(a, b)?, 8)
            })();
            Check::within(format!("{tag} ({a}, {b}) t={t}"), err, 1e-5)
        })
        .collect();
    CriterionResult::new("moment-oracle", "Moment hierarchy cross-check", checks)
}

/// Atoms at `π` and `0` from radial limits, density mass, and stability
/// of the density maximum under grid refinement.
pub fn atom_structure() -> CriterionResult {
    let mut checks = Vec::new();
    for t in [0.5, 2.0] {
        let prep = (|| Ok((params(0.6, 0.2)?, InitialLaw::classical(0.6, 0.2)?)))();
        let (p, law) = match prep {
            Ok(v) => v,
            Err(e) => {
                checks.push(Check::within(format!("t={t}"), Err(e), 0.0));
                continue;
            }
        };
        let h = FlowHerglotz::new(t, &law, &p);
        for (angle, label, mass) in [(PI, "pi", 0.2), (0.0, "0", 0.4)] {
            let e = h.as_ref().map_err(Clone::clone).and_then(|h| Ok((atom_mass(h, angle)?.mass - mass).abs()));
            checks.push(Check::within(format!("t={t} atom at {label}"), e, 1e-3));
        }
        let coarse = nu_t(t, &law, &p, NODES / 2);
        let fine = nu_t(t, &law, &p, NODES);
        let dm = fine.as_ref().map_err(Clone::clone).map(|m| (m.density_mass() - 0.4).abs());
        checks.push(Check::within(format!("t={t} density mass"), dm, 1e-6));
        let sup = match (&coarse, &fine) {
            (Ok(c), Ok(f)) => Ok((c.sup_density() - f.sup_density()).abs() / f.sup_density()),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        };
        checks.push(Check::within(format!("t={t} sup density, {} vs {NODES} nodes", NODES / 2), sup, 0.01));
    }
    CriterionResult::new("atom-structure", "Atoms and density of the asymmetric law", checks)
}

/// Disc sample for the Herglotz relation: 20 points on four radii.
fn disc_points() -> Vec<C> {
    let mut v = Vec::new();
    for (i, r) in [0.05, 0.3, 0.55, 0.75].iter().enumerate() {
        for j in 0..5 {
            v.push(C::from_polar(*r, 0.4 * i as f64 + 2.0 * PI * j as f64 / 5.0));
        }
    }
    v
}

/// Total mass of `μ_t` over a grid of traces, and the relation between
/// the Herglotz transforms of `μ_t` and `ν_t`.
pub fn mass_balance() -> CriterionResult {
    let grid = [0.2, 0.4, 0.5, 0.7, 0.9];
    let mut worst = Ok(0.0f64);
    'sweep: for &a in &grid {
        for &b in &grid {
            let r = (|| {
                let pp = ProjectionPair::new(a, b)?;
                let law = InitialLaw::classical(pp.alpha(), pp.beta())?;
                Ok((mu_t(1.0, &law, &pp, NODES)?.total_mass() - 1.0).abs())
            })();
            match r {
                Ok(v) => worst = worst.map(|w| w.max(v)),
                Err(e) => {
                    worst = Err(e);
                    break 'sweep;
                }
            }
        }
    }
    let mut checks = vec![Check::within("total mass, 5x5 trace sweep at t=1", worst, 1e-6)];
    let cases: [(f64, f64, &str); 3] = [(0.5, 0.5, "centered"), (0.8, 0.6, "classical"), (0.65, 0.65, "classical")];
    for &(a, b, tag) in &cases {
        for t in [0.5, 1.0] {
            let err = (|| {
                let pp = ProjectionPair::new(a, b)?;
                let law = if tag == "centered" {
                    InitialLaw::centered_delta()
                } else {
                    InitialLaw::classical(pp.alpha(), pp.beta())?
                };
                // The relation weights the density mass by (1-z)/(1+z), so
                // it needs the finer grid.
                let nu = nu_t(t, &law, &pp.params()?, 2 * NODES)?;
                let mu = szego_to_interval(&nu, &pp)?;
                let mut w: f64 = 0.0;
                for z in disc_points() {
                    w = w.max((herglotz_nu_from_mu(&mu, &pp, z)? - nu.herglotz_eval(z)?).norm());
                }
                Ok(w)
            })();
            checks.push(Check::within(format!("Herglotz relation trP={a} trQ={b} {tag} t={t}"), err, 1e-6));
        }
    }
    CriterionResult::new("mass-balance", "Jacobi mass balance and Herglotz relation", checks)
}

/// Long-time output against the stationary law, and the uniform law for
/// vanishing traces.
pub fn stationary_limit() -> CriterionResult {
    let late = (|| {
        let p = params(0.3, 0.3)?;
        let nu = nu_t(8.0, &InitialLaw::classical(0.3, 0.3)?, &p, NODES)?;
        let st = stationary_measure(&p, NODES)?;
        let mut w = node_error(&nu, |x| stationary_density(x, &p));
        for a in st.atoms() {
            w = w.max((nu.atom_at(a.angle) - a.mass).abs());
        }
        Ok(w)
    })();
    let uniform = (|| {
        let st = stationary_measure(&params(0.0, 0.0)?, 512)?;
        let atoms: f64 = st.atoms().iter().map(|a| a.mass).sum();
        Ok(st.values().iter().map(|v| (v - 1.0).abs()).fold(atoms, f64::max))
    })();
    let checks = vec![
        Check::within("classical (0.3, 0.3) at t=8", late, 1e-2),
        Check::within("alpha = beta = 0 is uniform", uniform, 0.0),
    ];
    CriterionResult::new("stationary-limit", "Stationary law", checks)
}

fn moment_gap(nu: &freejacobi_rmt::EmpiricalNu, law: &InitialLaw, t: f64) -> Result<f64> {
    let (a, b) = law.traces();
    let ev = evolve_moments(&law.initial_moments(4)?, a, b, t, 4)?;
    Ok((1..=4).map(|k| (nu.moment(k) - ev.m[k - 1]).norm()).fold(0.0, f64::max))
}

/// Random-matrix model against the free-probability predictions.
pub fn monte_carlo(s: &McSettings) -> CriterionResult {
    let mut checks = Vec::new();
    let paths = match sample_paths(s.d, 0.01, &[50, 100], s.replicas, s.seed) {
        Ok(p) => p,
        Err(e) => return CriterionResult::new("monte-carlo", "Random-matrix model", vec![Check::within("sampling", Err(e), 0.0)]),
    };
    let (half, one) = (at_checkpoint(&paths, 0), at_checkpoint(&paths, 1));
    let tau = trace_moment(&one, 1)
        .map(|m| (m - (-0.5f64).exp()).norm())
        .ok_or_else(|| freejacobi_core::Error::Numeric("no replica finished".into()));
    checks.push(Check::within("(1/d) E tr U_1 vs exp(-1/2)", tau, 0.02));
    let cfg = |t: f64, a: f64, b: f64, st: Structure| McConfig::new(s.d, s.replicas, s.seed, t, a, b).with_structure(st);
    let free = (|| moment_gap(&empirical_nu_from(&cfg(1.0, 0.0, 0.0, Structure::FreePair), &one)?, &InitialLaw::free(0.0, 0.0)?, 1.0))();
    checks.push(Check::within("free pair t=1 moments k<=4", free, 0.03));
    let classical = (|| {
        let nu = empirical_nu_from(&cfg(0.5, 0.0, 0.0, Structure::CommutingClassical), &half)?;
        moment_gap(&nu, &InitialLaw::classical(0.0, 0.0)?, 0.5)
    })();
    checks.push(Check::within("commuting pair t=0.5 moments k<=4", classical, 0.03));
    let jac = McConfig::from_traces(s.d, s.replicas, s.seed, 1.0, 0.8, 0.6);
    let mu = empirical_jacobi_from(&jac, &one);
    for (label, expect, pick) in [("0", 0.4, 0usize), ("1", 0.4, 1)] {
        let e = mu.as_ref().map_err(Clone::clone).map(|m| {
            let got = if pick == 0 { m.atom_zero } else { m.atom_one };
            (got - expect).abs()
        });
        checks.push(Check::within(format!("Jacobi trP=0.8 trQ=0.6 t=1 atom at {label}"), e, 0.05));
    }
    CriterionResult::new("monte-carlo", "Random-matrix model", checks)
}
