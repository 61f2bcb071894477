//! The free Jacobi law `μ_t` on `[0, 1]` obtained from `ν_t` through the
//! change of variables `x = cos²(θ/2)`.

use crate::error::{Error, Result};
use crate::initlaws::InitialLaw;
use crate::liberation::{nu_t, LiberationParams};
use crate::measures::{theta_of_x, x_of_theta, Atom, CircleMeasure, HerglotzEvaluator, IntervalMeasure};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

/// Traces of two projections `P`, `Q`, with `R = 2P − I`, `S = 2Q − I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPair {
    pub tr_p: f64,
    pub tr_q: f64,
}

impl ProjectionPair {
    pub fn new(tr_p: f64, tr_q: f64) -> Result<Self> {
        for (n, v) in [("trP", tr_p), ("trQ", tr_q)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidInput(format!("{n} = {v} must lie in (0, 1]")));
            }
        }
        Ok(ProjectionPair { tr_p, tr_q })
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.tr_p - 1.0
    }

    pub fn beta(&self) -> f64 {
        2.0 * self.tr_q - 1.0
    }

    pub fn params(&self) -> Result<LiberationParams> {
        LiberationParams::new(self.alpha(), self.beta())
    }

    /// Atom of `μ_t` at 0.
    pub fn mass_at_zero(&self) -> f64 {
        1.0 - self.tr_p.min(self.tr_q)
    }

    /// Atom of `μ_t` at 1.
    pub fn mass_at_one(&self) -> f64 {
        (self.tr_p + self.tr_q - 1.0).max(0.0)
    }
}

impl HerglotzEvaluator for IntervalMeasure {
    fn herglotz(&self, w: C) -> Result<C> {
        IntervalMeasure::herglotz(self, w)
    }
}

/// `μ_t` from `ν_t`: atoms `1 − min(trP, trQ)` at 0 and
/// `max(trP + trQ − 1, 0)` at 1, density `κ(θ)/(2π√(x(1−x)))` at
/// `θ = 2 arccos √x`, with `κ` the density of `ν` with respect to `dm`.
pub fn szego_to_interval(nu: &CircleMeasure, pp: &ProjectionPair) -> Result<IntervalMeasure> {
    let p = pp.params()?;
    let (at_pi, at_zero) = (nu.atom_at(PI), nu.atom_at(0.0));
    if (at_pi - p.a).abs() > 1e-9 || (at_zero - p.b).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "circle atoms ({at_pi}, {at_zero}) at (pi, 0) do not match the projection traces, expected ({}, {})",
            p.a, p.b
        )));
    }
    let mut xs = Vec::new();
    let mut gs = Vec::new();
    // θ decreasing gives x increasing.
    for (&th, &v) in nu.nodes().iter().zip(nu.values()).rev() {
        if th <= 0.0 || th >= PI {
            continue;
        }
        let x = x_of_theta(th);
        if !(x > 0.0 && x < 1.0) || xs.last().is_some_and(|&l| x <= l) {
            continue;
        }
        xs.push(x);
        gs.push(v / (2.0 * PI) / (x * (1.0 - x)).sqrt());
    }
    let edge = [nu.density_at(PI) / (2.0 * PI), nu.density_at(0.0) / (2.0 * PI)];
    IntervalMeasure::new(pp.mass_at_zero(), pp.mass_at_one(), xs, gs, edge)
}

/// `μ_t` for the pair `pp` started from `law`, with about `n` nodes.
pub fn mu_t(t: f64, law: &InitialLaw, pp: &ProjectionPair, n: usize) -> Result<IntervalMeasure> {
    let p = pp.params()?;
    let nu = nu_t(t, law, &p, n)?;
    szego_to_interval(&nu, pp)
}

/// `H_ν(z) = ((1−z)/(1+z))·H_μ(4z/(1+z)²) + 2(α+β)·z/(z²−1)`.
pub fn herglotz_nu_from_mu<H: HerglotzEvaluator + ?Sized>(h_mu: &H, pp: &ProjectionPair, z: C) -> Result<C> {
    let one = C::new(1.0, 0.0);
    if (z - one).norm() < 1e-14 || (z + one).norm() < 1e-14 {
        return Err(Error::Pole(format!("z = {z} is a pole of the relation")));
    }
    let w = z * 4.0 / ((one + z) * (one + z));
    let hm = h_mu.herglotz(w)?;
    Ok((one - z) / (one + z) * hm + z * (2.0 * (pp.alpha() + pp.beta())) / (z * z - one))
}

/// A positive measure on `[0, π]`: atoms and a density with respect to
/// `dθ/2π` on the given nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfCircleMeasure {
    pub atoms: Vec<Atom>,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl HalfCircleMeasure {
    pub fn total_mass(&self) -> f64 {
        let a: f64 = self.atoms.iter().map(|a| a.mass).sum();
        let d: f64 = self
            .nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum();
        a + d / (2.0 * PI)
    }
}

/// Pullback of `μ` to `[0, π]` under `x = cos²(θ/2)`.
pub fn interval_to_halfcircle(mu: &IntervalMeasure) -> HalfCircleMeasure {
    let [w0, w1] = mu.edge_weight();
    let mut nodes = vec![0.0];
    let mut values = vec![2.0 * PI * w1];
    for (&x, &d) in mu.nodes().iter().zip(mu.density()).rev() {
        nodes.push(theta_of_x(x));
        values.push(2.0 * PI * d * (x * (1.0 - x)).sqrt());
    }
    nodes.push(PI);
    values.push(2.0 * PI * w0);
    let mut atoms = Vec::new();
    if mu.mass_at_one > 0.0 {
        atoms.push(Atom { angle: 0.0, mass: mu.mass_at_one });
    }
    if mu.mass_at_zero > 0.0 {
        atoms.push(Atom { angle: PI, mass: mu.mass_at_zero });
    }
    HalfCircleMeasure { atoms, nodes, values }
}

/// Even extension to the circle: atoms at 0 and π are kept, interior atoms
/// and the density are halved and mirrored under `θ ↦ −θ`.
pub fn symmetrize_halfcircle(mu: &HalfCircleMeasure) -> Result<CircleMeasure> {
    if mu.nodes.len() != mu.values.len() {
        return Err(Error::InvalidInput("nodes and values differ in length".into()));
    }
    let mut atoms = Vec::new();
    for a in &mu.atoms {
        if !(0.0..=PI).contains(&a.angle) {
            return Err(Error::InvalidInput(format!("atom at {} outside [0, pi]", a.angle)));
        }
        if a.angle == 0.0 || a.angle == PI {
            atoms.push(*a);
        } else {
            atoms.push(Atom { angle: a.angle, mass: a.mass / 2.0 });
            atoms.push(Atom { angle: -a.angle, mass: a.mass / 2.0 });
        }
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * mu.nodes.len());
    for (&th, &v) in mu.nodes.iter().zip(&mu.values) {
        if !(0.0..=PI).contains(&th) {
            return Err(Error::InvalidInput(format!("node {th} outside [0, pi]")));
        }
        pts.push((th, v / 2.0));
        if th > 0.0 && th < PI {
            pts.push((-th, v / 2.0));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let (n, v): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    CircleMeasure::new_unnormalized(atoms, n, v)
}
