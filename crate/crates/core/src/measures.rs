//! Probability measures on the unit circle and on `[0, 1]`.
//!
//! A [`CircleMeasure`] is a finite set of atoms plus a density with respect
//! to normalized arclength `dθ/2π`, stored as samples on sorted nodes in
//! `(−π, π]` and interpolated linearly (periodically). Nodes need not be
//! uniform; densities with square-root edges are sampled on grids clustered
//! toward the edges.

use crate::error::{Error, Result};
use crate::quad::{gl8, gl8_real, integrate_near_poles};
use crate::wrap_angle;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

/// Total-mass tolerance accepted by constructors of sampled measures.
pub const MASS_TOL: f64 = 1e-6;

/// Radius used for boundary evaluation of Herglotz functions.
pub const R_STAR: f64 = 1.0 - 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub mass: f64,
}

/// An analytic function on the open disc with nonnegative real part.
pub trait HerglotzEvaluator {
    fn herglotz(&self, z: C) -> Result<C>;
}

/// Adapts a closure to [`HerglotzEvaluator`].
pub struct FnHerglotz<F>(pub F);

impl<F: Fn(C) -> Result<C>> HerglotzEvaluator for FnHerglotz<F> {
    fn herglotz(&self, z: C) -> Result<C> {
        (self.0)(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    atoms: Vec<Atom>,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

/// `ψ = (H − 1)/2`.
pub fn psi_from_herglotz(h: C) -> C {
    (h - 1.0) * 0.5
}

/// `H = 1 + 2ψ`.
pub fn herglotz_from_psi(psi: C) -> C {
    psi * 2.0 + 1.0
}

/// The Herglotz kernel `(ζ + z)/(ζ − z)` at `ζ = e^{iθ}`.
#[inline]
pub fn kernel(theta: f64, z: C) -> C {
    let zeta = C::from_polar(1.0, theta);
    (zeta + z) / (zeta - z)
}

/// Uniformly spaced angles `−π + 2π(j+1)/n`, `j = 0..n`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| (-PI + 2.0 * PI * (j as f64 + 1.0) / n as f64).min(PI)).collect()
}

impl CircleMeasure {
    /// Validated constructor. Atom angles are wrapped into `(−π, π]`; atoms
    /// at coincident angles are rejected; nodes must be strictly increasing
    /// inside `(−π, π]`; masses and values must be nonnegative; the total
    /// mass must be 1 within [`MASS_TOL`].
    pub fn new(atoms: Vec<Atom>, nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let m = Self::new_unnormalized(atoms, nodes, values)?;
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!("total mass {total} differs from 1")));
        }
        Ok(m)
    }

    /// Like [`CircleMeasure::new`] without the total-mass check.
    pub fn new_unnormalized(mut atoms: Vec<Atom>, nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::InvalidInput("nodes and values differ in length".into()));
        }
        for a in atoms.iter_mut() {
            if !(a.mass >= 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidInput(format!("atom mass {} is not a nonnegative number", a.mass)));
            }
            a.angle = wrap_angle(a.angle);
        }
        atoms.sort_by(|x, y| x.angle.total_cmp(&y.angle));
        for w in atoms.windows(2) {
            if (w[1].angle - w[0].angle).abs() < 1e-12 {
                return Err(Error::InvalidInput(format!("two atoms at angle {}", w[0].angle)));
            }
        }
        if atoms.len() >= 2 {
            let (f, l) = (atoms[0].angle, atoms[atoms.len() - 1].angle);
            if (f + 2.0 * PI - l).abs() < 1e-12 {
                return Err(Error::InvalidInput(format!("two atoms at angle {l}")));
            }
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput("density nodes must be strictly increasing".into()));
            }
        }
        if let (Some(&f), Some(&l)) = (nodes.first(), nodes.last()) {
            if !(f > -PI && l <= PI) {
                return Err(Error::InvalidInput("density nodes must lie in (-pi, pi]".into()));
            }
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("density values must be finite and nonnegative".into()));
        }
        Ok(CircleMeasure { atoms, nodes, values })
    }

    /// Normalized arclength: density 1 on `n` uniform nodes.
    pub fn uniform(n: usize) -> Self {
        CircleMeasure { atoms: vec![], nodes: uniform_grid(n), values: vec![1.0; n] }
    }

    /// A purely atomic measure.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        Self::new(atoms, vec![], vec![])
    }

    /// Samples a density function on the given nodes.
    pub fn from_density_fn<F: Fn(f64) -> f64>(atoms: Vec<Atom>, nodes: Vec<f64>, f: F) -> Result<Self> {
        let values = nodes.iter().map(|&t| f(t)).collect();
        Self::new(atoms, nodes, values)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass of the atom stored at `angle` (0 if none).
    pub fn atom_at(&self, angle: f64) -> f64 {
        let a = wrap_angle(angle);
        self.atoms
            .iter()
            .find(|x| {
                let d = (x.angle - a).abs();
                d < 1e-12 || (2.0 * PI - d).abs() < 1e-12
            })
            .map_or(0.0, |x| x.mass)
    }

    /// Periodic linear segments `(θ0, θ1, κ0, κ1)` with `θ1 > θ0`; the wrap
    /// segment ends beyond `π`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        let n = self.nodes.len();
        (0..n).filter_map(move |i| {
            if n == 1 {
                // A single node means a constant density.
                let t = self.nodes[0];
                return Some((t, t + 2.0 * PI, self.values[0], self.values[0]));
            }
            let j = (i + 1) % n;
            let t1 = if j == 0 { self.nodes[0] + 2.0 * PI } else { self.nodes[j] };
            Some((self.nodes[i], t1, self.values[i], self.values[j]))
        })
    }

    /// Interpolated density at `θ`.
    pub fn density_at(&self, theta: f64) -> f64 {
        let n = self.nodes.len();
        if n == 0 {
            return 0.0;
        }
        if n == 1 {
            return self.values[0];
        }
        let t = wrap_angle(theta);
        let idx = self.nodes.partition_point(|&x| x <= t);
        let (t0, t1, v0, v1) = if idx == 0 {
            (self.nodes[n - 1] - 2.0 * PI, self.nodes[0], self.values[n - 1], self.values[0])
        } else if idx == n {
            (self.nodes[n - 1], self.nodes[0] + 2.0 * PI, self.values[n - 1], self.values[0])
        } else {
            (self.nodes[idx - 1], self.nodes[idx], self.values[idx - 1], self.values[idx])
        };
        let s = (t - t0) / (t1 - t0);
        v0 + s * (v1 - v0)
    }

    /// Mass of the absolutely continuous part (trapezoidal rule, exact for
    /// the piecewise-linear density).
    pub fn density_mass(&self) -> f64 {
        self.segments().map(|(t0, t1, v0, v1)| 0.5 * (t1 - t0) * (v0 + v1)).sum::<f64>() / (2.0 * PI)
    }

    pub fn atom_mass_total(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass_total() + self.density_mass()
    }

    pub fn sup_density(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `∫ f dμ` with 8-point Gauss–Legendre on each density segment.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut s: f64 = self.atoms.iter().map(|a| a.mass * f(a.angle)).sum();
        for (t0, t1, v0, v1) in self.segments() {
            if v0 == 0.0 && v1 == 0.0 {
                continue;
            }
            let slope = (v1 - v0) / (t1 - t0);
            s += gl8_real(t0, t1, |t| (v0 + slope * (t - t0)) * f(t)) / (2.0 * PI);
        }
        s
    }

    /// `H(z) = ∫ (ζ + z)/(ζ − z) dμ(ζ)` for `|z| < 1`.
    pub fn herglotz_eval(&self, z: C) -> Result<C> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::Domain(format!("|z| = {r} is not inside the unit disc")));
        }
        let mut h = C::new(0.0, 0.0);
        for a in &self.atoms {
            h += kernel(a.angle, z) * a.mass;
        }
        if self.nodes.is_empty() {
            return Ok(h);
        }
        let poles: Vec<C> = if r > 0.3 {
            let p = C::new(z.arg(), -r.ln());
            (-1..=2).map(|k| p + 2.0 * PI * k as f64).collect()
        } else {
            vec![]
        };
        let mut acc = C::new(0.0, 0.0);
        for (t0, t1, v0, v1) in self.segments() {
            if v0 == 0.0 && v1 == 0.0 {
                continue;
            }
            let slope = (v1 - v0) / (t1 - t0);
            let mut f = |t: f64| kernel(t, z) * (v0 + slope * (t - t0));
            acc += integrate_near_poles(t0, t1, &poles, 64, &mut f);
        }
        Ok(h + acc / (2.0 * PI))
    }

    /// `H(z)` together with `H'(z) = ∫ 2ζ/(ζ − z)² dμ(ζ)`.
    pub fn herglotz_with_derivative(&self, z: C) -> Result<(C, C)> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::Domain(format!("|z| = {r} is not inside the unit disc")));
        }
        let mut h = C::new(0.0, 0.0);
        let mut d = C::new(0.0, 0.0);
        for a in &self.atoms {
            let zeta = C::from_polar(1.0, a.angle);
            h += (zeta + z) / (zeta - z) * a.mass;
            d += zeta * 2.0 / ((zeta - z) * (zeta - z)) * a.mass;
        }
        if self.nodes.is_empty() {
            return Ok((h, d));
        }
        let poles: Vec<C> = if r > 0.3 {
            let p = C::new(z.arg(), -r.ln());
            (-1..=2).map(|k| p + 2.0 * PI * k as f64).collect()
        } else {
            vec![]
        };
        let mut ah = C::new(0.0, 0.0);
        let mut ad = C::new(0.0, 0.0);
        for (t0, t1, v0, v1) in self.segments() {
            if v0 == 0.0 && v1 == 0.0 {
                continue;
            }
            let slope = (v1 - v0) / (t1 - t0);
            ah += integrate_near_poles(t0, t1, &poles, 64, &mut |t: f64| kernel(t, z) * (v0 + slope * (t - t0)));
            ad += integrate_near_poles(t0, t1, &poles, 64, &mut |t: f64| {
                let zeta = C::from_polar(1.0, t);
                zeta * 2.0 / ((zeta - z) * (zeta - z)) * (v0 + slope * (t - t0))
            });
        }
        Ok((h + ah / (2.0 * PI), d + ad / (2.0 * PI)))
    }

    /// `∫ e^{ikθ} dμ(θ)`: atoms plus the exact integral of the piecewise
    /// linear density against `e^{ikθ}`.
    pub fn circle_moment(&self, k: i64) -> C {
        let mut m = C::new(0.0, 0.0);
        for a in &self.atoms {
            m += C::from_polar(a.mass, k as f64 * a.angle);
        }
        let kf = k as f64;
        let mut acc = C::new(0.0, 0.0);
        for (t0, t1, v0, v1) in self.segments() {
            if v0 == 0.0 && v1 == 0.0 {
                continue;
            }
            let h = t1 - t0;
            if (kf * h).abs() < 0.5 {
                let slope = (v1 - v0) / h;
                acc += gl8(t0, t1, |t| C::from_polar(v0 + slope * (t - t0), kf * t));
            } else {
                // ∫ f e^{ikt} = [f e^{ikt}/(ik)] + f' [e^{ikt}]/k² for linear f.
                let e0 = C::from_polar(1.0, kf * t0);
                let e1 = C::from_polar(1.0, kf * t1);
                let ik = C::new(0.0, kf);
                let slope = (v1 - v0) / h;
                acc += (e1 * v1 - e0 * v0) / ik + (e1 - e0) * (slope / (kf * kf));
            }
        }
        m + acc / (2.0 * PI)
    }

    /// Push-forward under `ζ ↦ ζ^p`.
    pub fn push_forward_power(&self, p: u32) -> Result<CircleMeasure> {
        if p == 0 {
            return Err(Error::InvalidInput("power must be at least 1".into()));
        }
        let pf = p as f64;
        let mut atoms: Vec<Atom> = Vec::new();
        for a in &self.atoms {
            let ang = wrap_angle(pf * a.angle);
            match atoms.iter_mut().find(|x| {
                let d = (x.angle - ang).abs();
                d < 1e-10 || (2.0 * PI - d).abs() < 1e-10
            }) {
                Some(x) => x.mass += a.mass,
                None => atoms.push(Atom { angle: ang, mass: a.mass }),
            }
        }
        let mut nodes: Vec<f64> = self.nodes.iter().map(|&t| wrap_angle(pf * t)).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|x, y| (*x - *y).abs() < 1e-10);
        if nodes.len() >= 2 && nodes[0] + 2.0 * PI - nodes[nodes.len() - 1] < 1e-10 {
            nodes.pop();
        }
        let values = nodes
            .iter()
            .map(|&psi| {
                (0..p)
                    .map(|j| self.density_at((psi + 2.0 * PI * j as f64) / pf))
                    .sum::<f64>()
                    / pf
            })
            .collect();
        CircleMeasure::new_unnormalized(atoms, nodes, values)
    }

    /// Largest difference of the two densities over the union of both node
    /// sets.
    pub fn density_sup_distance(&self, other: &CircleMeasure) -> f64 {
        self.nodes
            .iter()
            .chain(other.nodes.iter())
            .map(|&t| (self.density_at(t) - other.density_at(t)).abs())
            .fold(0.0, f64::max)
    }

    /// CSV table `theta,kappa` with 17 significant digits.
    pub fn density_csv(&self) -> String {
        let mut s = String::from("theta,kappa\n");
        for (t, v) in self.nodes.iter().zip(&self.values) {
            s.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        s
    }

    /// JSON sidecar `{"atoms": [{"angle": .., "mass": ..}]}`.
    pub fn atoms_json(&self) -> serde_json::Value {
        serde_json::json!({ "atoms": self.atoms })
    }

    /// Parses the CSV table and JSON sidecar back into a measure.
    pub fn from_csv(csv: &str, atoms_json: &str) -> Result<CircleMeasure> {
        #[derive(Deserialize)]
        struct Side {
            atoms: Vec<Atom>,
        }
        let side: Side = serde_json::from_str(atoms_json)?;
        let (nodes, values) = crate::io::parse_two_column_csv(csv, "theta", "kappa")?;
        CircleMeasure::new(side.atoms, nodes, values)
    }
}

impl HerglotzEvaluator for CircleMeasure {
    fn herglotz(&self, z: C) -> Result<C> {
        self.herglotz_eval(z)
    }
}

/// Result of a radial-limit atom estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomEstimate {
    pub mass: f64,
    /// Difference between the full and the reduced extrapolant.
    pub spread: f64,
    pub converged: bool,
}

/// Radii used by [`atom_mass`].
pub const ATOM_RADII: [f64; 4] = [0.9, 0.99, 0.999, 0.9999];

fn neville_at_zero(h: &[f64], f: &[f64]) -> f64 {
    let mut p = f.to_vec();
    let n = h.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

/// Estimates `μ{e^{iθ}} = ½ lim_{r→1} (1 − r) H(r e^{iθ})` by polynomial
/// extrapolation in `1 − r` over [`ATOM_RADII`].
pub fn atom_mass<H: HerglotzEvaluator + ?Sized>(h: &H, angle: f64) -> Result<AtomEstimate> {
    let mut hs = Vec::with_capacity(4);
    let mut fs = Vec::with_capacity(4);
    for &r in &ATOM_RADII {
        let v = h.herglotz(C::from_polar(r, angle))?;
        hs.push(1.0 - r);
        fs.push((1.0 - r) * v.re);
    }
    let full = neville_at_zero(&hs, &fs);
    let reduced = neville_at_zero(&hs[1..], &fs[1..]);
    let spread = (full - reduced).abs() * 0.5;
    Ok(AtomEstimate { mass: (0.5 * full).max(0.0), spread, converged: spread <= 1e-4 })
}

/// `κ(θ_j) = Re H(r* e^{iθ_j})`, clamped at 0.
pub fn density_from_boundary<H: HerglotzEvaluator + ?Sized>(h: &H, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&t| h.herglotz(C::from_polar(R_STAR, t)).map(|v| v.re.max(0.0)))
        .collect()
}

/// A probability measure on `[0, 1]`: atoms at the endpoints plus a density.
///
/// The density is represented through `g(θ) = ρ(x)·√(x(1−x))` with
/// `x = cos²(θ/2)`, which is piecewise linear in `θ ∈ [0, π]` between the
/// nodes and takes the values `edge_weight[1]` at `θ = 0` (`x = 1`) and
/// `edge_weight[0]` at `θ = π` (`x = 0`). This is the exact image of a
/// piecewise-linear circle density and resolves arcsine-type endpoint
/// behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMeasure {
    pub mass_at_zero: f64,
    pub mass_at_one: f64,
    nodes: Vec<f64>,
    density: Vec<f64>,
    edge_weight: [f64; 2],
}

#[inline]
pub fn x_of_theta(theta: f64) -> f64 {
    let c = (0.5 * theta).cos();
    c * c
}

#[inline]
pub fn theta_of_x(x: f64) -> f64 {
    2.0 * x.clamp(0.0, 1.0).sqrt().acos()
}

impl IntervalMeasure {
    /// Validated constructor; `nodes` strictly increasing in `(0, 1)`.
    pub fn new(
        mass_at_zero: f64,
        mass_at_one: f64,
        nodes: Vec<f64>,
        density: Vec<f64>,
        edge_weight: [f64; 2],
    ) -> Result<Self> {
        if nodes.len() != density.len() {
            return Err(Error::InvalidInput("nodes and density differ in length".into()));
        }
        for m in [mass_at_zero, mass_at_one, edge_weight[0], edge_weight[1]] {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidInput("masses and edge weights must be nonnegative".into()));
            }
        }
        if mass_at_zero > 1.0 + MASS_TOL || mass_at_one > 1.0 + MASS_TOL {
            return Err(Error::InvalidInput("endpoint mass above 1".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput("x nodes must be strictly increasing".into()));
            }
        }
        if nodes.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::InvalidInput("x nodes must lie in (0, 1)".into()));
        }
        if density.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("density values must be finite and nonnegative".into()));
        }
        let m = IntervalMeasure { mass_at_zero, mass_at_one, nodes, density, edge_weight };
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!("total mass {total} differs from 1")));
        }
        Ok(m)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn edge_weight(&self) -> [f64; 2] {
        self.edge_weight
    }

    /// `(θ, g)` breakpoints in increasing `θ` from 0 to π.
    fn theta_knots(&self) -> Vec<(f64, f64)> {
        let mut k = Vec::with_capacity(self.nodes.len() + 2);
        k.push((0.0, self.edge_weight[1]));
        for (x, d) in self.nodes.iter().zip(&self.density).rev() {
            k.push((theta_of_x(*x), d * (x * (1.0 - x)).sqrt()));
        }
        k.push((PI, self.edge_weight[0]));
        k
    }

    /// Interpolated density at `x ∈ (0, 1)`.
    pub fn density_at(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return 0.0;
        }
        let th = theta_of_x(x);
        let k = self.theta_knots();
        let i = k.partition_point(|p| p.0 <= th).clamp(1, k.len() - 1);
        let (t0, g0) = k[i - 1];
        let (t1, g1) = k[i];
        let g = if t1 > t0 { g0 + (g1 - g0) * (th - t0) / (t1 - t0) } else { g0 };
        g / (x * (1.0 - x)).sqrt()
    }

    pub fn density_mass(&self) -> f64 {
        self.theta_knots().windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_at_zero + self.mass_at_one + self.density_mass()
    }

    /// `∫ f dμ`, integrating the density in the angular variable.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut s = self.mass_at_zero * f(0.0) + self.mass_at_one * f(1.0);
        for w in self.theta_knots().windows(2) {
            let ((t0, g0), (t1, g1)) = (w[0], w[1]);
            if t1 <= t0 || (g0 == 0.0 && g1 == 0.0) {
                continue;
            }
            let sl = (g1 - g0) / (t1 - t0);
            s += gl8_real(t0, t1, |t| (g0 + sl * (t - t0)) * f(x_of_theta(t)));
        }
        s
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.integrate(|x| x.powi(k))
    }

    /// `H_μ(w) = ∫ (1 + wx)/(1 − wx) dμ(x)`, for `w` off `[1, ∞)`.
    pub fn herglotz(&self, w: C) -> Result<C> {
        let one = C::new(1.0, 0.0);
        if (w - one).norm() < 1e-300 || (w.im.abs() < 1e-15 && w.re >= 1.0) {
            return Err(Error::Domain(format!("w = {w} lies on the cut [1, inf)")));
        }
        let mut h = C::new(self.mass_at_zero, 0.0) + (one + w) / (one - w) * self.mass_at_one;
        // Kernel poles: x = 1/w ⇔ e^{iθ} ∈ {z, 1/z} with w = 4z/(1+z)².
        let z = {
            let s = (one - w).sqrt();
            let c1 = (C::new(2.0, 0.0) - w + s * 2.0) / w;
            let c2 = (C::new(2.0, 0.0) - w - s * 2.0) / w;
            if c1.norm() < c2.norm() { c1 } else { c2 }
        };
        let poles: Vec<C> = if w.norm() > 1e-3 && z.norm() > 1e-300 {
            let p = C::new(z.arg(), -z.norm().ln());
            vec![p, -p, p.conj(), -p.conj()]
        } else {
            vec![]
        };
        for win in self.theta_knots().windows(2) {
            let ((t0, g0), (t1, g1)) = (win[0], win[1]);
            if t1 <= t0 || (g0 == 0.0 && g1 == 0.0) {
                continue;
            }
            let sl = (g1 - g0) / (t1 - t0);
            let mut f = |t: f64| {
                let x = x_of_theta(t);
                (one + w * x) / (one - w * x) * (g0 + sl * (t - t0))
            };
            h += integrate_near_poles(t0, t1, &poles, 64, &mut f);
        }
        Ok(h)
    }

    pub fn density_csv(&self) -> String {
        let mut s = String::from("x,density\n");
        for (x, v) in self.nodes.iter().zip(&self.density) {
            s.push_str(&format!("{x:.16e},{v:.16e}\n"));
        }
        s
    }

    pub fn atoms_json(&self) -> serde_json::Value {
        serde_json::json!({
            "atoms": [
                { "x": 0.0, "mass": self.mass_at_zero },
                { "x": 1.0, "mass": self.mass_at_one },
            ],
            "edge_weight": { "x0": self.edge_weight[0], "x1": self.edge_weight[1] },
        })
    }
}
