//! Boundary values of `K`, the density `κ_t`, and the measure `ν_t`.

use super::chart::{fan_angles, ray_entry, RayEntry};
use super::flow::{k0_eval, v_and_der, v_on_circle, Flow, Propagation};
use super::params::LiberationParams;
use super::stationary::stationary_measure;
use crate::error::{Error, Result};
use crate::fubm::chebyshev_arc;
use crate::initlaws::InitialLaw;
use crate::measures::{Atom, CircleMeasure, HerglotzEvaluator};
use crate::wrap_angle;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

/// Below this time `ν_t` is reported as `ν_0`.
pub const T_MIN: f64 = 1e-6;
/// Densities below this are treated as outside the support.
pub const KAPPA_FLOOR: f64 = 1e-9;
/// Radius of the interior fallback evaluation.
pub const R_FALLBACK: f64 = 1.0 - 1e-5;
/// Width to which support edges are located.
pub const EDGE_TOL: f64 = 1e-10;
/// Default number of density nodes on the circle.
pub const DEFAULT_NODES: usize = 4096;

/// Density from the two equivalent closed forms.
///
/// `κ = Re √(K² − (a tan(θ/2) − b cot(θ/2))²)`; the limit at `θ ∈ {0, π}` is
/// 0 whenever the bracket diverges there.
pub fn kappa_from_k(k_sq: C, theta: f64, p: &LiberationParams) -> f64 {
    let th = wrap_angle(theta);
    if (th == 0.0 && p.b > 0.0) || (th.abs() == PI && p.a > 0.0) {
        return 0.0;
    }
    let s = v_on_circle(th, p);
    (k_sq - s * s).sqrt().re.max(0.0)
}

/// The `sin²θ` form `Re √(K² + (a+b)² − 1 − (cosθ − r₊)(cosθ − r₋)/sin²θ)`.
pub fn kappa_sin_form(k_sq: C, theta: f64, p: &LiberationParams) -> f64 {
    let c = theta.cos();
    let s2 = theta.sin().powi(2);
    let x = k_sq + (p.a + p.b).powi(2) - 1.0 - (c - p.r_plus) * (c - p.r_minus) / s2;
    x.sqrt().re.max(0.0)
}

/// A boundary preimage: the start point whose characteristic is on the unit
/// circle at angle `θ` exactly at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySolution {
    pub theta: f64,
    pub z0: C,
    pub k0sq: C,
    pub kappa: f64,
    pub iterations: usize,
}

/// Angle of the rays closest to the real axis in the fan.
pub const END_RAY: f64 = 1e-5;

/// Result of [`BoundarySolver::probe_ray`].
#[derive(Debug, Clone, Copy)]
pub struct RayProbe {
    pub entry: RayEntry,
    pub solution: Option<BoundarySolution>,
}

/// Shooting solver for fixed `(t, law, params)`.
pub struct BoundarySolver<'a> {
    pub t: f64,
    pub flow: Flow<'a>,
    pub entries: Vec<RayEntry>,
}

fn wrap_residual(g: C) -> C {
    C::new(g.re, wrap_angle(g.im))
}

impl<'a> BoundarySolver<'a> {
    /// Prepares the solver and a fan of about `fan` rays on `(0, π)`.
    pub fn new(t: f64, law: &'a InitialLaw, p: &LiberationParams, fan: usize) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        let flow = Flow::new(law, p)?;
        let mut solver = BoundarySolver { t, flow, entries: vec![] };
        let mut rays: Vec<f64> = fan_angles(2 * fan.max(4)).into_iter().filter(|&f| f > 0.0).collect();
        for e in [END_RAY, 2.0 * END_RAY] {
            rays.push(e);
            rays.push(PI - e);
        }
        // Small petals around the mass of ν_0 can fall between fan rays.
        rays.extend(law.mass_angles().into_iter().filter(|&a| a > 4.0 * END_RAY && a < PI - 4.0 * END_RAY));
        rays.sort_by(f64::total_cmp);
        rays.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let probed: Result<Vec<RayProbe>> = rays.par_iter().map(|&phi| solver.probe_ray(phi)).collect();
        solver.entries = probed?.into_iter().map(|r| r.entry).collect();
        Ok(solver)
    }

    /// Entry point of one ray, with `interior` set only if the boundary
    /// solve at its exit angle confirms a positive density.
    pub fn probe_ray(&self, phi: f64) -> Result<RayProbe> {
        let mut entry = ray_entry(&self.flow, phi, self.t)?;
        let mut sol = None;
        if entry.interior {
            match self.solve_from(entry.exit_angle.abs(), entry.z0) {
                Ok(s) => {
                    entry.exit_angle = s.theta;
                    entry.z0 = s.z0;
                    sol = Some(s);
                }
                Err(Error::ExteriorPoint { .. }) => entry.interior = false,
                Err(e) => return Err(e),
            }
        }
        Ok(RayProbe { entry, solution: sol })
    }

    fn propagate(&self, z0: C) -> Result<Propagation> {
        self.flow.propagate(z0, self.t)
    }

    /// Damped Newton for `log φ_t(z0) = target` (imaginary part modulo 2π).
    pub fn newton(&self, target: C, seed: C, tol: f64) -> Result<(C, Propagation, usize)> {
        let mut z = seed;
        if !(z.norm() < 1.0) {
            z = C::from_polar(1.0 - 1e-9, z.arg());
        }
        let mut pr = self.propagate(z)?;
        let mut g = wrap_residual(pr.u - target);
        let mut near_rim = 0;
        for it in 0..60 {
            if g.norm() < tol {
                // Near a critical point of φ_t the residual only fixes z to its
                // cube root, so keep going while it still drops.
                for _ in 0..60 {
                    if g.norm() < 1e-15 {
                        break;
                    }
                    let zn = z - g / pr.du;
                    if !(zn.norm() < 1.0) {
                        break;
                    }
                    match self.propagate(zn) {
                        Ok(pn) => {
                            let gn = wrap_residual(pn.u - target);
                            if !(gn.norm() < g.norm()) {
                                break;
                            }
                            z = zn;
                            pr = pn;
                            g = gn;
                        }
                        Err(_) => break,
                    }
                }
                return Ok((z, pr, it));
            }
            let step = g / pr.du;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let mut lam = 1.0;
            let mut accepted = false;
            for _ in 0..16 {
                let zn = z - step * lam;
                if zn.norm() < 1.0 && zn.norm() > 0.0 {
                    if let Ok(pn) = self.propagate(zn) {
                        let gn = wrap_residual(pn.u - target);
                        if gn.norm() < g.norm() * (1.0 - 1e-4 * lam) {
                            z = zn;
                            pr = pn;
                            g = gn;
                            accepted = true;
                            break;
                        }
                    }
                }
                lam *= 0.5;
            }
            if !accepted {
                break;
            }
            // Iterates pressed against the circle mean the preimage is not interior.
            near_rim = if z.norm() > 1.0 - 1e-9 { near_rim + 1 } else { 0 };
            if near_rim > 3 {
                break;
            }
        }
        Err(Error::NoSolution { theta: target.im })
    }

    /// Solves at angle `θ` from one seed; `Err(ExteriorPoint)` unless the
    /// preimage is interior with positive density.
    pub fn solve_from(&self, theta: f64, seed: C) -> Result<BoundarySolution> {
        let th = wrap_angle(theta);
        let p = &self.flow.p;
        if (th == 0.0 && p.b > 0.0) || (th.abs() == PI && p.a > 0.0) {
            return Err(Error::ExteriorPoint { theta: th });
        }
        match self.newton(C::new(0.0, th), seed, 1e-10) {
            Ok((z0, pr, it)) => {
                let kappa = kappa_from_k(pr.k0sq, th, p);
                if z0.norm() < 1.0 && kappa > KAPPA_FLOOR {
                    Ok(BoundarySolution { theta: th, z0, k0sq: pr.k0sq, kappa, iterations: it })
                } else {
                    Err(Error::ExteriorPoint { theta: th })
                }
            }
            Err(Error::NoSolution { .. }) | Err(Error::SingularApproach { .. }) | Err(Error::Domain(_)) => {
                Err(Error::ExteriorPoint { theta: th })
            }
            Err(e) => Err(e),
        }
    }

    /// Seeds from the ray fan for angle `θ ∈ [0, π]`: interpolation between
    /// bracketing interior entries, then the nearest interior entries.
    pub fn chart_seeds(&self, theta: f64) -> Vec<C> {
        let mut out = Vec::new();
        let e = &self.entries;
        for w in e.windows(2) {
            if w[0].interior && w[1].interior {
                let (t0, t1) = (w[0].exit_angle, w[1].exit_angle);
                if (t0 - theta) * (t1 - theta) <= 0.0 && (t1 - t0).abs() > 0.0 && (t1 - t0).abs() < PI {
                    let s = (theta - t0) / (t1 - t0);
                    let r = w[0].radius + s * (w[1].radius - w[0].radius);
                    let ph = w[0].ray_angle + s * (w[1].ray_angle - w[0].ray_angle);
                    out.push(C::from_polar(r.min(1.0 - 1e-12), ph));
                }
            }
        }
        let mut near: Vec<&RayEntry> = e.iter().filter(|x| x.interior).collect();
        near.sort_by(|a, b| (a.exit_angle - theta).abs().total_cmp(&(b.exit_angle - theta).abs()));
        for x in near.into_iter().take(2) {
            out.push(x.z0);
        }
        out
    }

    /// Tries the given seeds, then the chart seeds.
    pub fn solve(&self, theta: f64, seeds: &[C]) -> Result<BoundarySolution> {
        let th = wrap_angle(theta);
        let a = th.abs();
        let mut last = Err(Error::ExteriorPoint { theta: th });
        // Caller seeds are for `θ`; chart seeds are for `|θ|`.
        let own = seeds.iter().map(|s| if th < 0.0 { s.conj() } else { *s });
        for s in own.chain(self.chart_seeds(a)) {
            match self.solve_from(a, s) {
                Ok(sol) => {
                    return Ok(if th < 0.0 { BoundarySolution { theta: th, z0: sol.z0.conj(), k0sq: sol.k0sq.conj(), ..sol } } else { sol });
                }
                Err(e @ Error::ExteriorPoint { .. }) => last = Err(e),
                Err(e) => return Err(e),
            }
        }
        last
    }

    /// Walks from a solved angle toward `target` by step halving; returns
    /// the last solution reached (equal to `target` if it is in the support).
    pub fn march(&self, from: &BoundarySolution, target: f64) -> BoundarySolution {
        let mut cur = *from;
        let mut h = target - from.theta;
        while h.abs() > EDGE_TOL {
            let next = if (cur.theta + h - target) * h.signum() > 0.0 { target } else { cur.theta + h };
            match self.solve_from(next, cur.z0) {
                Ok(s) => {
                    cur = s;
                    if cur.theta == target {
                        break;
                    }
                }
                Err(_) => h *= 0.5,
            }
        }
        cur
    }

    /// `H(t, z)` at an interior point via the preimage `φ_t^{-1}(z)`, with
    /// continuation along the radius when no seed is given.
    pub fn herglotz_interior(&self, z: C, seed: Option<C>) -> Result<(C, C)> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::Domain(format!("|z| = {r} is not inside the unit disc")));
        }
        if r == 0.0 {
            return Ok((C::new(1.0, 0.0), C::new(0.0, 0.0)));
        }
        // Near an atom φ_t is nearly flat, so the attainable residual in
        // log z grows like 1/(1 − r).
        let tol = 1e-12f64.max(1e-14 / (1.0 - r));
        if let Some(s) = seed {
            if let Ok((z0, pr, _)) = self.newton(z.ln(), s, tol) {
                return Ok((pr.speed, z0));
            }
        }
        let psi = z.arg();
        let mut rho = r.min(0.05);
        let mut z0 = C::from_polar(rho * (-self.t).exp(), psi);
        loop {
            let (zz, _, _) = self.newton(C::new(rho.ln(), psi), z0, tol)?;
            z0 = zz;
            if rho >= r {
                break;
            }
            let gap = 1.0 - rho;
            rho = (rho + 0.1).min(1.0 - gap * 0.4).min(r);
        }
        let (z0, pr, _) = self.newton(z.ln(), z0, tol)?;
        Ok((pr.speed, z0))
    }

    /// Disc-interior estimate `Re L(t, r e^{iθ})`, `L = H − V`.
    pub fn kappa_fallback(&self, theta: f64, seed: Option<C>) -> Result<f64> {
        let z = C::from_polar(R_FALLBACK, theta);
        let (h, _) = self.herglotz_interior(z, seed)?;
        let (v, _) = v_and_der(z, self.flow.p.a, self.flow.p.b);
        Ok((h - v).re.max(0.0))
    }
}

/// Node layout on `[0, π]` for one support arc; see [`half_nodes`].
#[derive(Debug, Clone, Copy, PartialEq)]
enum ArcKind {
    Interior,
    ThroughZero,
    ThroughPi,
    Full,
}

/// Support arcs in `[0, π]` and the half-circle node positions placed on
/// them. Arcs through 0 or π are extended by reflection before the
/// Chebyshev points are laid out, so that congruent arcs get congruent
/// nodes.
pub(crate) fn half_nodes(arcs: &[(f64, f64)], n: usize, cluster_at_pi: bool) -> Vec<(f64, bool)> {
    let classify = |(l, r): (f64, f64)| -> (ArcKind, f64) {
        let z = l <= 0.0;
        let p = r >= PI;
        match (z, p) {
            (true, true) => (ArcKind::Full, 2.0 * PI),
            (true, false) => (ArcKind::ThroughZero, 2.0 * r),
            (false, true) => (ArcKind::ThroughPi, 2.0 * (PI - l)),
            (false, false) => (ArcKind::Interior, 2.0 * (r - l)),
        }
    };
    // Full-circle lengths: interior arcs appear twice.
    let total: f64 = arcs
        .iter()
        .map(|&a| match classify(a) {
            (ArcKind::Interior, l) => l,
            (_, l) => l,
        })
        .sum();
    let lam = n as f64 / total.max(1e-300);
    let mut out: Vec<(f64, bool)> = Vec::new();
    for &(l, r) in arcs {
        let (kind, len) = classify((l, r));
        match kind {
            ArcKind::Interior => {
                let m = ((lam * len / 2.0).round() as usize).max(8);
                let nodes = chebyshev_arc(0.5 * (l + r), r - l, m);
                for (j, &x) in nodes.iter().enumerate() {
                    out.push((x, j == 0 || j == m));
                }
            }
            ArcKind::ThroughZero => {
                let m = 2 * ((lam * len / 2.0).round() as usize).max(8);
                let nodes = chebyshev_arc(0.0, 2.0 * r, m);
                for (j, &x) in nodes.iter().enumerate().skip(m / 2) {
                    out.push((if j == m / 2 { 0.0 } else { x }, j == m));
                }
            }
            ArcKind::ThroughPi => {
                let m = 2 * ((lam * len / 2.0).round() as usize).max(8);
                let nodes = chebyshev_arc(PI, 2.0 * (PI - l), m);
                for (j, &x) in nodes.iter().enumerate().take(m / 2 + 1) {
                    out.push((if j == m / 2 { PI } else { x }, j == 0));
                }
            }
            ArcKind::Full => {
                let m = 2 * ((lam * len / 2.0).round() as usize).max(8);
                let c = if cluster_at_pi { 0.0 } else { PI };
                let nodes = chebyshev_arc(c, 2.0 * PI, m);
                let mut h: Vec<f64> = nodes
                    .iter()
                    .map(|&x| wrap_angle(x).abs())
                    .collect();
                h.sort_by(f64::total_cmp);
                h.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
                if let Some(f) = h.first_mut() {
                    *f = 0.0;
                }
                if let Some(f) = h.last_mut() {
                    *f = PI;
                }
                out.extend(h.into_iter().map(|x| (x, false)));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14);
    out
}

/// Computed `ν_t` with diagnostics.
#[derive(Debug, Clone)]
pub struct NuResult {
    pub measure: CircleMeasure,
    /// Support arcs of `κ_t` as `(start, end)` with `end > start`; arcs
    /// through `π` end beyond `π`.
    pub arcs: Vec<(f64, f64)>,
    /// Nodes where the interior fallback was used.
    pub fallbacks: usize,
}

/// Options of [`nu_t_detailed`].
#[derive(Debug, Clone, Copy)]
pub struct NuOptions {
    /// Approximate number of density nodes on the circle.
    pub nodes: usize,
    /// Rays in the fan over the half-circle.
    pub fan: usize,
}

impl Default for NuOptions {
    fn default() -> Self {
        NuOptions::with_nodes(DEFAULT_NODES)
    }
}

impl NuOptions {
    pub fn with_nodes(nodes: usize) -> Self {
        NuOptions { nodes, fan: 48 }
    }
}

/// Description of `ν_0`, used for `t ≤ T_MIN`.
pub fn nu_zero(law: &InitialLaw, p: &LiberationParams, n: usize) -> Result<CircleMeasure> {
    let atoms = |v: Vec<(f64, f64)>| CircleMeasure::atomic(v.into_iter().filter(|x| x.1 > 0.0).map(|(angle, mass)| Atom { angle, mass }).collect());
    match law {
        InitialLaw::Classical { alpha, beta } => {
            atoms(vec![(0.0, (1.0 + alpha * beta) / 2.0), (PI, (1.0 - alpha * beta) / 2.0)])
        }
        InitialLaw::BooleanSymmetric => {
            atoms(vec![(0.0, 1.0 / 3.0), (2.0 * PI / 3.0, 1.0 / 3.0), (-2.0 * PI / 3.0, 1.0 / 3.0)])
        }
        InitialLaw::MonotoneSymmetric => {
            atoms(vec![(0.0, 0.25), (PI / 2.0, 0.25), (PI, 0.25), (-PI / 2.0, 0.25)])
        }
        InitialLaw::Free { .. } => stationary_measure(p, n),
        InitialLaw::Centered { nu0 } => Ok(nu0.clone()),
        InitialLaw::Moments { .. } => Err(Error::InvalidInput("a moment-only initial law has no circle measure".into())),
    }
}

pub(crate) fn degenerate_measure(p: &LiberationParams) -> Result<CircleMeasure> {
    let mut atoms = Vec::new();
    if p.a > 0.0 {
        atoms.push(Atom { angle: PI, mass: p.a });
    }
    if p.b > 0.0 {
        atoms.push(Atom { angle: 0.0, mass: p.b });
    }
    CircleMeasure::new(atoms, vec![], vec![])
}

/// `ν_t = a δ_π + b δ_0 + κ_t dm` on about `n` density nodes.
pub fn nu_t(t: f64, law: &InitialLaw, p: &LiberationParams, n: usize) -> Result<CircleMeasure> {
    nu_t_detailed(t, law, p, NuOptions::with_nodes(n)).map(|r| r.measure)
}

/// [`nu_t`] with support arcs and diagnostics.
pub fn nu_t_detailed(t: f64, law: &InitialLaw, p: &LiberationParams, opts: NuOptions) -> Result<NuResult> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    if p.degenerate() {
        return Ok(NuResult { measure: degenerate_measure(p)?, arcs: vec![], fallbacks: 0 });
    }
    if t <= T_MIN {
        let m = nu_zero(law, p, opts.nodes)?;
        return Ok(NuResult { measure: m, arcs: vec![], fallbacks: 0 });
    }
    let mut solver = BoundarySolver::new(t, law, p, opts.fan)?;
    let (arcs_half, cluster_at_pi, coarse) = scan_support(&mut solver)?;
    if arcs_half.is_empty() {
        return Err(Error::Numeric(format!("no support found for the density at t = {t}")));
    }
    let mut nodes = half_nodes(&arcs_half, opts.nodes, cluster_at_pi);
    let (mut values, mut fallbacks) = solve_nodes(&solver, &nodes, &coarse)?;
    // Cusp-like minima inside the support get the same node clustering as
    // support edges.
    let pinches = find_pinches(&solver, &nodes, &values);
    if !pinches.is_empty() {
        nodes = half_nodes(&split_arcs(&arcs_half, &pinches), opts.nodes, cluster_at_pi);
        let at_pinch = |x: f64| pinches.iter().find(|c| (c.0 - x).abs() < 1e-12).map(|c| c.1);
        for nd in nodes.iter_mut() {
            if at_pinch(nd.0).is_some() {
                nd.1 = false;
            }
        }
        (values, fallbacks) = solve_nodes(&solver, &nodes, &coarse)?;
        for (nd, v) in nodes.iter().zip(values.iter_mut()) {
            if let Some(k) = at_pinch(nd.0) {
                *v = k;
            }
        }
    }

    let measure = mirror_measure(p, &nodes, &values)?;
    Ok(NuResult { measure, arcs: full_arcs(&arcs_half), fallbacks })
}

/// Half-width of the window in which a pinch must be the smallest value.
const PINCH_WINDOW: usize = 8;

/// Interior local minima of `κ` that are sharp on the node scale, as
/// `(θ, κ(θ))` pairs in `(0, π)`. Cusps are located by extrapolation from
/// both sides, other minima by golden-section search.
fn find_pinches(solver: &BoundarySolver, nodes: &[(f64, bool)], values: &[f64]) -> Vec<(f64, f64)> {
    let w = PINCH_WINDOW;
    let mut out = Vec::new();
    if nodes.len() < 2 * w + 1 {
        return out;
    }
    for i in w..nodes.len() - w {
        let win = i - w..=i + w;
        if nodes[win.clone()].iter().any(|n| n.1) || !(nodes[i].0 > 0.0 && nodes[i].0 < PI) {
            continue;
        }
        let v = values[i];
        if values[win].iter().any(|&u| u < v) || v >= 0.9 * values[i - w].min(values[i + w]) {
            continue;
        }
        let side = |j: usize, k: usize| {
            let a = solver.solve(nodes[j].0, &[]).ok()?;
            let b = solver.solve(nodes[k].0, &[a.z0]).ok()?;
            cusp_from_side(solver, a, b)
        };
        // A cusp shows the same zero from both sides.
        match (side(i - 2, i - 1), side(i + 2, i + 1)) {
            (Some(l), Some(r)) if (l - r).abs() < 1e-9 && l > nodes[i - 1].0 && l < nodes[i + 1].0 => {
                out.push((0.5 * (l + r), 0.0))
            }
            _ => {
                let seed = solver.solve(nodes[i].0, &[]).ok();
                out.extend(golden_min(solver, nodes[i - 1].0, nodes[i + 1].0, seed));
            }
        }
    }
    out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
    out
}

fn golden_min(solver: &BoundarySolver, mut lo: f64, mut hi: f64, seed: Option<BoundarySolution>) -> Option<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut last = seed?;
    let eval = |th: f64, last: &mut BoundarySolution| -> Option<f64> {
        let s = solver.solve(th, &[last.z0]).ok()?;
        *last = s;
        Some(s.kappa)
    };
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = eval(x1, &mut last)?;
    let mut f2 = eval(x2, &mut last)?;
    while hi - lo > 1e-13 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1, &mut last)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2, &mut last)?;
        }
    }
    Some(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Angle where `κ` vanishes in a cube-root cusp, approached from one side
/// through the solutions `far`, `near` (in this order towards the cusp).
///
/// `κ³` is close to linear in `θ` there, so each step extrapolates it to
/// zero from the last two points and moves three quarters of the way,
/// continuing the solve from the previous preimage. The extrapolated zero
/// is returned once the steps fall below `1e−13`; `None` if the estimates
/// stop contracting, as they do at a smooth minimum.
fn cusp_from_side(solver: &BoundarySolver, far: BoundarySolution, near: BoundarySolution) -> Option<f64> {
    let zero = |a: &BoundarySolution, b: &BoundarySolution| -> Option<f64> {
        let (ka, kb) = (a.kappa.powi(3), b.kappa.powi(3));
        (ka > kb).then(|| b.theta + kb * (b.theta - a.theta) / (ka - kb))
    };
    let (mut a, mut b) = (far, near);
    let mut est = zero(&a, &b)?;
    let dir = (b.theta - a.theta).signum();
    for _ in 0..80 {
        let gap = (est - b.theta) * dir;
        if !(gap > 0.0) || gap > 2.0 * (b.theta - a.theta).abs() {
            return None;
        }
        if gap < 1e-13 {
            return Some(est);
        }
        let c = solver.solve_from(b.theta + 0.75 * (est - b.theta), b.z0).ok()?;
        a = b;
        b = c;
        est = zero(&a, &b)?;
    }
    None
}

/// Splits half-circle arcs at the given interior points.
fn split_arcs(arcs: &[(f64, f64)], cuts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(l, r) in arcs {
        let mut a = l;
        for &(c, _) in cuts {
            if c > a.max(0.0) && c < r.min(PI) {
                out.push((a, c));
                a = c;
            }
        }
        out.push((a, r));
    }
    out
}

/// Builds `a δ_π + b δ_0 + κ dm` from half-circle samples of `κ`.
pub(crate) fn mirror_measure(p: &LiberationParams, nodes: &[(f64, bool)], values: &[f64]) -> Result<CircleMeasure> {
    let mut full: Vec<(f64, f64)> = Vec::with_capacity(2 * nodes.len());
    for (&(x, _), &v) in nodes.iter().zip(values) {
        if x > 0.0 && x < PI {
            full.push((-x, v));
        }
        full.push((x, v));
    }
    full.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nd, vl): (Vec<f64>, Vec<f64>) = full.into_iter().unzip();
    let mut atoms = Vec::new();
    if p.a > 0.0 {
        atoms.push(Atom { angle: PI, mass: p.a });
    }
    if p.b > 0.0 {
        atoms.push(Atom { angle: 0.0, mass: p.b });
    }
    CircleMeasure::new_unnormalized(atoms, nd, vl)
}

/// Mirrors half-circle arcs onto the circle, merging across 0 and π.
pub(crate) fn full_arcs(half: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(l, r) in half {
        match (l <= 0.0, r >= PI) {
            (true, true) => out.push((-PI, PI)),
            (true, false) => out.push((-r, r)),
            (false, true) => out.push((l, 2.0 * PI - l)),
            (false, false) => {
                out.push((-r, -l));
                out.push((l, r));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Support arcs on `[0, π]` from the ray fan, with edges refined by
/// bisection in the ray angle. Returns the arcs, whether a full-circle grid
/// should cluster at π, and the solutions found along the way.
fn scan_support(solver: &mut BoundarySolver) -> Result<(Vec<(f64, f64)>, bool, Vec<BoundarySolution>)> {
    let mut probes: Vec<RayProbe> = Vec::new();
    let mut extra: Vec<RayEntry> = Vec::new();
    for e in &solver.entries {
        let solution = if e.interior {
            Some(BoundarySolution { theta: e.exit_angle, z0: e.z0, k0sq: C::new(0.0, 0.0), kappa: 0.0, iterations: 0 })
        } else {
            None
        };
        probes.push(RayProbe { entry: *e, solution });
    }
    let n = probes.len();
    let mut arcs = Vec::new();
    let mut i = 0;
    while i < n {
        if !probes[i].entry.interior {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && probes[i + 1].entry.interior {
            i += 1;
        }
        let end = i;
        // Near the real axis the exit angle is linear in the ray angle when
        // the arc runs through the axis, and flat when it ends at a slit.
        let left = if start == 0 && end >= 1 {
            let (t1, t2) = (probes[0].entry.exit_angle, probes[1].entry.exit_angle);
            if t2 > 1.5 * t1 { 0.0 } else { t1 }
        } else if start == 0 {
            probes[0].entry.exit_angle
        } else {
            let (e, more) = bisect_edge(solver, &probes[start].entry, probes[start - 1].entry.ray_angle)?;
            extra.extend(more);
            refine_edge(solver, &e, -1.0)
        };
        let right = if end == n - 1 && start + 1 < n - 1 {
            let (t1, t2) = (PI - probes[n - 1].entry.exit_angle, PI - probes[n - 2].entry.exit_angle);
            if t2 > 1.5 * t1 { PI } else { PI - t1 }
        } else if end == n - 1 {
            probes[n - 1].entry.exit_angle
        } else {
            let (e, more) = bisect_edge(solver, &probes[end].entry, probes[end + 1].entry.ray_angle)?;
            extra.extend(more);
            refine_edge(solver, &e, 1.0)
        };
        // Isolated rays can pass the density test inside a gap.
        if right - left > 1e-6 {
            arcs.push((left, right));
        }
        i += 1;
    }
    solver.entries.extend(extra);
    solver.entries.retain(|e| e.interior);
    solver.entries.sort_by(|a, b| a.ray_angle.total_cmp(&b.ray_angle));
    let sols: Vec<BoundarySolution> = solver
        .entries
        .iter()
        .map(|e| BoundarySolution { theta: e.exit_angle, z0: e.z0, k0sq: C::new(0.0, 0.0), kappa: 0.0, iterations: 0 })
        .collect();
    let k_end = |th: f64| solver.solve(th, &[]).map(|s| s.kappa).unwrap_or(0.0);
    let cluster_at_pi = match arcs.as_slice() {
        [(l, r)] if *l == 0.0 && *r == PI => k_end(PI - 1e-3) <= k_end(1e-3),
        _ => false,
    };
    Ok((arcs, cluster_at_pi, sols))
}

/// Continues the boundary solution at a ray's exit angle outward (`dir`)
/// until the support edge is bracketed to [`EDGE_TOL`].
fn refine_edge(solver: &BoundarySolver, e: &RayEntry, dir: f64) -> f64 {
    match solver.solve_from(e.exit_angle, e.z0) {
        Ok(s) => {
            let m = solver.march(&s, (s.theta + dir * 1e-3).clamp(0.0, PI));
            m.theta + dir * EDGE_TOL / 2.0
        }
        Err(_) => e.exit_angle,
    }
}

/// Bisection in the ray angle between a good ray and a bad one; returns the
/// last good entry and the good entries met on the way.
fn bisect_edge(solver: &BoundarySolver, good: &RayEntry, bad_phi: f64) -> Result<(RayEntry, Vec<RayEntry>)> {
    let mut g = *good;
    let mut b = bad_phi;
    let mut seen = Vec::new();
    for _ in 0..60 {
        if (g.ray_angle - b).abs() < 1e-13 {
            break;
        }
        let mid = 0.5 * (g.ray_angle + b);
        let pr = solver.probe_ray(mid)?;
        if pr.entry.interior {
            g = pr.entry;
            seen.push(g);
        } else {
            b = mid;
        }
    }
    Ok((g, seen))
}

/// Solves every half-circle node, continuing from the nearest coarse point.
fn solve_nodes(
    solver: &BoundarySolver,
    nodes: &[(f64, bool)],
    coarse: &[BoundarySolution],
) -> Result<(Vec<f64>, usize)> {
    let p = &solver.flow.p;
    let nearest = |th: f64| -> Option<&BoundarySolution> {
        coarse.iter().min_by(|a, b| (a.theta - th).abs().total_cmp(&(b.theta - th).abs()))
    };
    // Split into runs between edge nodes; runs are solved in parallel.
    let mut runs: Vec<Vec<usize>> = vec![];
    let mut cur = vec![];
    for (i, &(_, edge)) in nodes.iter().enumerate() {
        cur.push(i);
        if edge && cur.len() > 1 && (i + 1 == nodes.len() || nodes[i + 1].1) {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    let results: Vec<Result<Vec<(usize, f64, bool)>>> = runs
        .par_iter()
        .map(|run| {
            let mut out = Vec::with_capacity(run.len());
            // Start near the middle of the run and sweep outward both ways.
            let mid = run.len() / 2;
            let mut at_mid: Option<BoundarySolution> = None;
            for dir in [1i64, -1] {
                let mut last: Option<BoundarySolution> = if dir > 0 { None } else { at_mid };
                let range: Vec<usize> = if dir > 0 { (mid..run.len()).collect() } else { (0..mid).rev().collect() };
                for k in range {
                    let idx = run[k];
                    let (th, edge) = nodes[idx];
                    if edge || (th == 0.0 && p.b > 0.0) || (th == PI && p.a > 0.0) {
                        out.push((idx, 0.0, false));
                        continue;
                    }
                    let mut seeds = vec![];
                    if let Some(s) = last {
                        seeds.push(s.z0);
                    }
                    if let Some(s) = nearest(th) {
                        seeds.push(s.z0);
                    }
                    let sol = solver.solve(th, &seeds).ok().or_else(|| {
                        let from = last.or_else(|| nearest(th).copied())?;
                        let m = solver.march(&from, th);
                        (m.theta == th).then_some(m)
                    });
                    match sol {
                        Some(s) => {
                            out.push((idx, s.kappa, false));
                            last = Some(s);
                            if k == mid {
                                at_mid = last;
                            }
                        }
                        None => {
                            let seed = last.map(|s| s.z0);
                            let v = solver.kappa_fallback(th, seed).unwrap_or(0.0);
                            out.push((idx, v, true));
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut values = vec![0.0; nodes.len()];
    let mut fallbacks = 0;
    for r in results {
        for (i, v, fb) in r? {
            values[i] = v;
            fallbacks += fb as usize;
        }
    }
    Ok((values, fallbacks))
}

/// `K(t, e^{iθ})`; `Err(ExteriorPoint)` outside the closure of the support.
pub fn boundary_k(t: f64, theta: f64, law: &InitialLaw, p: &LiberationParams) -> Result<C> {
    if p.degenerate() {
        return Ok(C::new(0.0, 0.0));
    }
    let solver = BoundarySolver::new(t, law, p, 64)?;
    let sol = solver.solve(theta, &[])?;
    k0_eval(law, p, sol.z0)
}

/// `κ_t(θ)`, zero outside the support.
pub fn kappa_density(t: f64, theta: f64, law: &InitialLaw, p: &LiberationParams) -> Result<f64> {
    if p.degenerate() {
        return Ok(0.0);
    }
    let solver = BoundarySolver::new(t, law, p, 64)?;
    match solver.solve(theta, &[]) {
        Ok(s) => Ok(s.kappa),
        Err(Error::ExteriorPoint { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Support arcs of `κ_t` (edges located to [`EDGE_TOL`]).
pub fn support_estimate(t: f64, law: &InitialLaw, p: &LiberationParams) -> Result<Vec<(f64, f64)>> {
    if p.degenerate() {
        return Ok(vec![]);
    }
    let mut solver = BoundarySolver::new(t, law, p, 64)?;
    let (arcs, _, _) = scan_support(&mut solver)?;
    Ok(full_arcs(&arcs))
}

/// `H(t, ·)` of `ν_t` evaluated through the characteristic flow.
pub struct FlowHerglotz<'a> {
    pub solver: BoundarySolver<'a>,
}

impl<'a> FlowHerglotz<'a> {
    pub fn new(t: f64, law: &'a InitialLaw, p: &LiberationParams) -> Result<Self> {
        Ok(FlowHerglotz { solver: BoundarySolver::new(t, law, p, 16)? })
    }
}

impl HerglotzEvaluator for FlowHerglotz<'_> {
    fn herglotz(&self, z: C) -> Result<C> {
        self.solver.herglotz_interior(z, None).map(|r| r.0)
    }
}
