//! The stationary law `ν_∞ = a δ_π + b δ_0 + κ_∞ dm`.

use super::density::{degenerate_measure, full_arcs, half_nodes, kappa_from_k, mirror_measure};
use super::params::LiberationParams;
use crate::error::Result;
use crate::measures::CircleMeasure;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `κ_∞(θ)`, supported on `{r₋ < cos θ < r₊}`.
pub fn stationary_density(theta: f64, p: &LiberationParams) -> f64 {
    if p.degenerate() {
        return 0.0;
    }
    let k = p.k_free();
    kappa_from_k(Complex64::new(k * k, 0.0), theta, p)
}

/// Support arcs of `κ_∞` on the circle.
pub fn stationary_arcs(p: &LiberationParams) -> Vec<(f64, f64)> {
    if p.degenerate() {
        return vec![];
    }
    full_arcs(&[half_arc(p)])
}

fn half_arc(p: &LiberationParams) -> (f64, f64) {
    let l = if p.b == 0.0 { 0.0 } else { p.theta_plus };
    let r = if p.a == 0.0 { PI } else { p.theta_minus };
    (l, r)
}

/// `ν_∞` with about `n` density nodes.
pub fn stationary_measure(p: &LiberationParams, n: usize) -> Result<CircleMeasure> {
    if p.degenerate() {
        return degenerate_measure(p);
    }
    if p.a == 0.0 && p.b == 0.0 {
        return Ok(CircleMeasure::uniform(n.max(1)));
    }
    let nodes = half_nodes(&[half_arc(p)], n, p.a > 0.0);
    let values: Vec<f64> = nodes
        .iter()
        .map(|&(x, edge)| if edge { 0.0 } else { stationary_density(x, p) })
        .collect();
    mirror_measure(p, &nodes, &values)
}
