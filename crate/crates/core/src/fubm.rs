//! The law `λ_t` of the free unitary Brownian motion.

use crate::error::{Error, Result};
use crate::measures::CircleMeasure;
use crate::wrap_angle;
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// `τ(U_t^k) = e^{−kt/2} Σ_{j<k} (−t)^j/j! · C(k, j+1) · k^{j−1}`, with the
/// `k = 0` moment equal to 1.
pub fn fubm_moment(t: f64, k: u32) -> Result<f64> {
    if k > 64 {
        return Err(Error::InvalidInput(format!("moment order {k} exceeds 64")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("t = {t} is negative")));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let kf = k as f64;
    // term_j = (−t)^j / j! · C(k, j+1) · k^{j−1}
    let mut term = kf / kf; // j = 0: C(k,1)·k^{-1} = 1
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..k {
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        let jf = j as f64;
        // C(k, j+2)/C(k, j+1) = (k − j − 1)/(j + 2)
        term *= -t / (jf + 1.0) * (kf - jf - 1.0) / (jf + 2.0) * kf;
    }
    Ok((-kf * t / 2.0).exp() * sum)
}

/// Half-length `g(t)` of the support arc of `λ_t`; `π` for `t ≥ 4`.
pub fn support_edge(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} is negative")));
    }
    if t >= 4.0 {
        return Ok(PI);
    }
    Ok(0.5 * (t * (4.0 - t)).sqrt() + (1.0 - t / 2.0).acos())
}

fn f_val(t: f64, theta: f64, z: C) -> C {
    ((z - 1.0) / (z + 1.0)).ln() + z * (t / 2.0) - C::new(0.0, theta)
}

fn f_der(t: f64, z: C) -> C {
    C::new(2.0, 0.0) / (z * z - 1.0) + t / 2.0
}

/// Residual of the defining equation `(z−1)/(z+1)·e^{tz/2} = e^{iθ}`.
pub fn biane_residual(t: f64, theta: f64, z: C) -> f64 {
    ((z - 1.0) / (z + 1.0) * (z * (t / 2.0)).exp() - C::from_polar(1.0, theta)).norm()
}

/// Accepted residual: `1e-12`, unless rounding of `z` itself makes that
/// unreachable (for large `t` the root near `θ = 0` sits within `e^{-t/2}`
/// of the singular point `z = 1`).
fn residual_tol(t: f64, z: C) -> f64 {
    (8.0 * f64::EPSILON * z.norm() * f_der(t, z).norm()).max(1e-12)
}

/// Damped Newton on the logarithmic form, staying in `Re z > 0`.
fn newton(t: f64, theta: f64, mut z: C) -> Option<C> {
    let mut fz = f_val(t, theta, z);
    for _ in 0..100 {
        if fz.norm() < 1e-15 {
            break;
        }
        let d = f_der(t, z);
        let step = fz / d;
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let zn = z - step * lam;
            if zn.re > 0.0 {
                let fn_ = f_val(t, theta, zn);
                if fn_.norm() < fz.norm() || fn_.norm() < 1e-14 {
                    z = zn;
                    fz = fn_;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
        if (step * lam).norm() < 1e-16 * z.norm().max(1e-3) {
            break;
        }
    }
    (z.re > 0.0 && biane_residual(t, theta, z) < residual_tol(t, z)).then_some(z)
}

/// The real root of `log((x−1)/(x+1)) + tx/2 = 0` in `(1, ∞)`.
fn real_root(t: f64) -> f64 {
    let f = |x: f64| ((x - 1.0) / (x + 1.0)).ln() + t * x / 2.0;
    let (mut lo, mut hi) = (1.0, 5.0 + 8.0 / t);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if f(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// The root at `θ = π` for `t ≥ 4` (real, in `[0, 1)`).
fn root_at_pi(t: f64) -> f64 {
    if t <= 4.0 {
        return 0.0;
    }
    let f = |x: f64| ((1.0 - x) / (1.0 + x)).ln() + t * x / 2.0;
    let (mut lo, mut hi) = (1e-300_f64.max(1e-12), 1.0);
    // f > 0 just right of 0, f → −∞ at 1.
    if f(lo) <= 0.0 {
        lo = 1e-9;
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if f(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Expansion of the root near the support edge, used as a Newton seed.
fn edge_seed(t: f64, theta: f64) -> Option<C> {
    if t < 4.0 {
        let g = support_edge(t).ok()?;
        let ze = C::new(0.0, (4.0 / t - 1.0).sqrt());
        let f2 = -ze * 4.0 / (ze * ze - 1.0).powi(2);
        let d = (C::new(0.0, 2.0 * (theta - g)) / f2).sqrt();
        let cands = [ze + d, ze - d];
        cands.into_iter().filter(|z| z.re > 0.0).max_by(|a, b| a.re.total_cmp(&b.re))
    } else {
        None
    }
}

/// Solver state for sweeping increasing angles in `[0, π]` with continuation.
struct Sweep {
    t: f64,
    theta: f64,
    z: C,
}

impl Sweep {
    fn new(t: f64) -> Self {
        Sweep { t, theta: 0.0, z: C::new(real_root(t), 0.0) }
    }

    fn advance(&mut self, target: f64) -> Result<C> {
        let t = self.t;
        if t < 4.0 {
            let g = support_edge(t)?;
            if g - target < 1e-3 {
                if let Some(s) = edge_seed(t, target) {
                    if let Some(z) = newton(t, target, s) {
                        self.theta = target;
                        self.z = z;
                        return Ok(z);
                    }
                }
            }
        }
        if t >= 4.0 && PI - target < 1e-3 && t < 4.0 + 1e-9 {
            let s = C::from_polar((1.5 * (PI - target)).cbrt(), PI / 6.0);
            if let Some(z) = newton(t, target, s) {
                self.theta = target;
                self.z = z;
                return Ok(z);
            }
        }
        let mut step = target - self.theta;
        let mut guard = 0;
        while self.theta < target {
            guard += 1;
            if guard > 10_000 {
                break;
            }
            let next = (self.theta + step).min(target);
            match newton(t, next, self.z) {
                Some(z) => {
                    self.theta = next;
                    self.z = z;
                    step *= 2.0;
                }
                None => {
                    step *= 0.5;
                    if step < 1e-14 {
                        break;
                    }
                }
            }
        }
        if self.theta >= target {
            Ok(self.z)
        } else {
            Err(Error::Numeric(format!(
                "Newton continuation stalled at theta = {} (target {target}, t = {t}, z = {})",
                self.theta, self.z
            )))
        }
    }
}

/// The root `h_t(e^{iθ})` with positive real part of
/// `(z−1)/(z+1)·e^{tz/2} = e^{iθ}`; its real part is the density of `λ_t`.
pub fn biane_h(t: f64, theta: f64) -> Result<C> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let th = wrap_angle(theta);
    let a = th.abs();
    if t <= 4.0 && a >= support_edge(t)? {
        if t == 4.0 && a == PI {
            return Ok(C::new(0.0, 0.0));
        }
        return Err(Error::NoSolution { theta: th });
    }
    let z = if a == PI {
        C::new(root_at_pi(t), 0.0)
    } else {
        let mut sw = Sweep::new(t);
        // Several continuation steps keep Newton on the correct root.
        let n = 8;
        let mut z = sw.z;
        for k in 1..=n {
            z = sw.advance(a * k as f64 / n as f64)?;
        }
        z
    };
    Ok(if th < 0.0 { z.conj() } else { z })
}

/// Nodes for a density supported on `(c − L/2, c + L/2)`: Chebyshev points
/// `c − (L/2) cos(πj/n)`, `j = 0..=n`.
pub fn chebyshev_arc(c: f64, len: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|j| c - 0.5 * len * (PI * j as f64 / n as f64).cos()).collect()
}

/// `λ_t` sampled on `n` nodes clustered toward the support edges (or toward
/// `π` once the support is the whole circle).
pub fn fubm_density(t: f64, n: usize) -> Result<CircleMeasure> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let n = n.max(16) & !1; // even, so that 0 is a node
    let (g, full) = if t < 4.0 { (support_edge(t)?, false) } else { (PI, true) };
    let nodes = chebyshev_arc(0.0, 2.0 * g, n);
    let mut values = vec![0.0; nodes.len()];
    let half = n / 2;
    let mut sw = Sweep::new(t);
    for j in half..=n {
        let th = nodes[j];
        let v = if j == n {
            if full { root_at_pi(t) } else { 0.0 }
        } else if j == half {
            sw.z.re
        } else {
            sw.advance(th)?.re
        };
        values[j] = v;
        values[n - j] = v;
    }
    let (nodes, values) = if full {
        // −π and π coincide on the circle.
        (nodes[1..].to_vec(), values[1..].to_vec())
    } else {
        (nodes, values)
    };
    CircleMeasure::new(vec![], nodes, values)
}
