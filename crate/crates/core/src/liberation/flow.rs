//! The conserved quantity `K` and the characteristic flow of the PDE.
//!
//! Along a characteristic `s ↦ w(s)` started at `z0`, `K² = H² − V²` is
//! constant, so in the logarithmic coordinate `u = log w` the flow closes as
//! `u' = √(K0² + V(e^u)²)` with the branch of nonnegative real part.

use super::params::LiberationParams;
use crate::error::{Error, Result};
use crate::initlaws::InitialLaw;
use crate::ode::{dopri5, Outcome, Tolerances};
use num_complex::Complex64;

type C = Complex64;

/// Closest approach to `±1` tolerated by the integrator.
pub const POLE_GUARD: f64 = 1e-9;

/// `V(w) = a(1−w)/(1+w) + b(1+w)/(1−w)`.
pub fn v_eval(w: C, p: &LiberationParams) -> Result<C> {
    let one = C::new(1.0, 0.0);
    if (p.a > 0.0 && (w + one).norm() == 0.0) || (p.b > 0.0 && (w - one).norm() == 0.0) {
        return Err(Error::Pole(format!("V has a pole at w = {w}")));
    }
    Ok(v_and_der(w, p.a, p.b).0)
}

/// `(V(w), V'(w))`.
#[inline]
pub(crate) fn v_and_der(w: C, a: f64, b: f64) -> (C, C) {
    let one = C::new(1.0, 0.0);
    let mut v = C::new(0.0, 0.0);
    let mut d = C::new(0.0, 0.0);
    if a != 0.0 {
        let p = one + w;
        v += (one - w) / p * a;
        d -= C::new(2.0 * a, 0.0) / (p * p);
    }
    if b != 0.0 {
        let m = one - w;
        v += (one + w) / m * b;
        d += C::new(2.0 * b, 0.0) / (m * m);
    }
    (v, d)
}

/// Boundary value `V(e^{iθ}) = i (b cot(θ/2) − a tan(θ/2))`, as the real
/// coefficient of `i`.
pub fn v_on_circle(theta: f64, p: &LiberationParams) -> f64 {
    let h = 0.5 * theta;
    let mut s = 0.0;
    if p.b != 0.0 {
        s += p.b * h.cos() / h.sin();
    }
    if p.a != 0.0 {
        s -= p.a * h.tan();
    }
    s
}

/// `(K0², d K0²/dz)` with `K0² = H0² − V²`.
pub fn k0_squared(law: &InitialLaw, p: &LiberationParams, z: C) -> Result<(C, C)> {
    let (h2, dh2) = law.h0_squared(z)?;
    let (v, dv) = v_and_der(z, p.a, p.b);
    Ok((h2 - v * v, dh2 - v * dv * 2.0))
}

/// `K(0, z) = √(H0(z)² − V(z)²)`, continued along the radius from
/// `K(0, 0) = √(1 − (a + b)²)`.
pub fn k0_eval(law: &InitialLaw, p: &LiberationParams, z: C) -> Result<C> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not inside the unit disc", z.norm())));
    }
    let steps = 64;
    let mut k = C::new(p.k_free(), 0.0);
    for j in 1..=steps {
        let zj = z * (j as f64 / steps as f64);
        let (k2, _) = k0_squared(law, p, zj)?;
        let r = k2.sqrt();
        if r.norm() < 1e-13 && j < steps {
            return Err(Error::Branch { re: zj.re, im: zj.im });
        }
        k = if (r - k).norm() <= (r + k).norm() { r } else { -r };
    }
    Ok(k)
}

/// Result of integrating one characteristic together with its variation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    /// `log w(t)`.
    pub u: C,
    /// `∂u(t)/∂z0`.
    pub du: C,
    /// `H(t, w(t))`.
    pub speed: C,
    pub k0sq: C,
}

/// Characteristic integrator for one `(law, params)` pair.
#[derive(Debug, Clone)]
pub struct Flow<'a> {
    pub law: &'a InitialLaw,
    pub p: LiberationParams,
    closed_form: bool,
    tol: Tolerances,
}

impl<'a> Flow<'a> {
    pub fn new(law: &'a InitialLaw, p: &LiberationParams) -> Result<Self> {
        if !law.has_herglotz() {
            return Err(Error::InvalidInput("the characteristic flow needs an initial law with a Herglotz transform".into()));
        }
        let (al, be) = law.traces();
        if (al - p.alpha).abs() > 1e-12 || (be - p.beta).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "initial law has traces ({al}, {be}) but parameters are ({}, {})",
                p.alpha, p.beta
            )));
        }
        Ok(Flow {
            law,
            p: *p,
            closed_form: p.a == 0.0 && p.b == 0.0,
            tol: Tolerances { rtol: 1e-11, atol: 1e-13, h_min: 1e-14, max_steps: 4_000 },
        })
    }

    /// Whether the flow is explicit (`V ≡ 0`).
    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }

    #[inline]
    fn rhs(&self, y: &[C; 2], k2: C, dk2: C) -> Option<[C; 2]> {
        let w = y[0].exp();
        let one = C::new(1.0, 0.0);
        if (self.p.b != 0.0 && (w - one).norm() < POLE_GUARD) || (self.p.a != 0.0 && (w + one).norm() < POLE_GUARD) {
            return None;
        }
        let (v, dv) = v_and_der(w, self.p.a, self.p.b);
        let h = (k2 + v * v).sqrt();
        if !(h.norm() > 1e-300) || !h.re.is_finite() {
            return None;
        }
        let dh_du = w * v * dv / h;
        Some([h, dh_du * y[1] + dk2 / (h * 2.0)])
    }

    /// Integrates the characteristic from `z0` up to time `t`.
    pub fn propagate(&self, z0: C, t: f64) -> Result<Propagation> {
        if !(z0.norm() < 1.0) || z0.norm() == 0.0 {
            return Err(Error::Domain(format!("start point {z0} must satisfy 0 < |z0| < 1")));
        }
        if self.closed_form {
            let (h, dh) = self.law.h0_with_derivative(z0)?;
            return Ok(Propagation { u: z0.ln() + h * t, du: z0.inv() + dh * t, speed: h, k0sq: h * h });
        }
        let (k2, dk2) = k0_squared(self.law, &self.p, z0)?;
        let out = dopri5(
            |_, y: &[C; 2]| self.rhs(y, k2, dk2),
            [z0.ln(), z0.inv()],
            t,
            &self.tol,
            None::<fn(&[C; 2]) -> f64>,
            |_, _| {},
        );
        match out {
            Outcome::Reached(y) => {
                let w = y[0].exp();
                let (v, _) = v_and_der(w, self.p.a, self.p.b);
                Ok(Propagation { u: y[0], du: y[1], speed: (k2 + v * v).sqrt(), k0sq: k2 })
            }
            Outcome::Singular { s, y } | Outcome::Event { s, y } => {
                let w = y[0].exp();
                Err(Error::SingularApproach { s, re: w.re, im: w.im })
            }
        }
    }

    /// First time `≤ horizon` at which `|w| ≥ 1 − 1e−12`, with the exit
    /// angle. `Ok(None)` if the characteristic is still inside at `horizon`.
    pub fn exit(&self, z0: C, horizon: f64) -> Result<Option<(f64, f64)>> {
        let r = z0.norm();
        if r >= 1.0 {
            return Ok(Some((0.0, z0.arg())));
        }
        if r == 0.0 {
            return Ok(None);
        }
        let thr = -1e-12;
        if z0.ln().re >= thr {
            return Ok(Some((0.0, z0.arg())));
        }
        if self.closed_form {
            let h = self.law.h0_eval(z0)?;
            if h.re <= 0.0 {
                return Ok(None);
            }
            let s = (thr - z0.ln().re) / h.re;
            return Ok((s <= horizon).then(|| (s, crate::wrap_angle(z0.arg() + h.im * s))));
        }
        let (k2, dk2) = k0_squared(self.law, &self.p, z0)?;
        let out = dopri5(
            |_, y: &[C; 2]| self.rhs(y, k2, dk2),
            [z0.ln(), z0.inv()],
            horizon,
            &self.tol,
            Some(|y: &[C; 2]| y[0].re - thr),
            |_, _| {},
        );
        match out {
            Outcome::Reached(_) => Ok(None),
            Outcome::Event { s, y } => Ok(Some((s, crate::wrap_angle(y[0].im)))),
            // Only happens within POLE_GUARD of ±1, i.e. at the boundary.
            Outcome::Singular { s, y } => Ok(Some((s, crate::wrap_angle(y[0].im)))),
        }
    }

    /// Samples `(s, w(s))` along the characteristic up to `t` or exit.
    pub fn trajectory(&self, z0: C, t: f64) -> Result<(Vec<(f64, C)>, Option<(f64, f64)>)> {
        let mut path = Vec::new();
        if z0.norm() == 0.0 {
            path.push((0.0, z0));
            path.push((t, z0));
            return Ok((path, None));
        }
        let thr = -1e-12;
        if self.closed_form {
            let h = self.law.h0_eval(z0)?;
            let exit = self.exit(z0, t)?;
            let end = exit.map_or(t, |e| e.0);
            let n = 64;
            for i in 0..=n {
                let s = end * i as f64 / n as f64;
                path.push((s, (z0.ln() + h * s).exp()));
            }
            return Ok((path, exit));
        }
        let (k2, dk2) = k0_squared(self.law, &self.p, z0)?;
        let out = dopri5(
            |_, y: &[C; 2]| self.rhs(y, k2, dk2),
            [z0.ln(), z0.inv()],
            t,
            &self.tol,
            Some(|y: &[C; 2]| y[0].re - thr),
            |s, y: &[C; 2]| path.push((s, y[0].exp())),
        );
        match out {
            Outcome::Reached(_) => Ok((path, None)),
            Outcome::Event { s, y } => {
                path.push((s, y[0].exp()));
                Ok((path, Some((s, crate::wrap_angle(y[0].im)))))
            }
            Outcome::Singular { s, y } => {
                let w = y[0].exp();
                if w.norm() >= 1.0 - 1e-8 {
                    path.push((s, w));
                    Ok((path, Some((s, crate::wrap_angle(y[0].im)))))
                } else {
                    Err(Error::SingularApproach { s, re: w.re, im: w.im })
                }
            }
        }
    }
}

/// A characteristic with its conserved value and exit data.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRecord {
    pub z0: C,
    pub k0: C,
    pub exit_time: Option<f64>,
    pub exit_angle: Option<f64>,
    pub trajectory: Vec<(f64, C)>,
}

/// Integrates the characteristic from `z0` for time `t`, stopping early if
/// it reaches the unit circle.
pub fn characteristic_flow(z0: C, t: f64, law: &InitialLaw, p: &LiberationParams) -> Result<CharacteristicRecord> {
    if !(z0.norm() < 1.0) {
        return Err(Error::Domain(format!("|z0| = {} is not inside the unit disc", z0.norm())));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} is negative")));
    }
    let flow = Flow::new(law, p)?;
    let k0 = k0_eval(law, p, z0)?;
    let (trajectory, exit) = flow.trajectory(z0, t)?;
    Ok(CharacteristicRecord {
        z0,
        k0,
        exit_time: exit.map(|e| e.0),
        exit_angle: exit.map(|e| e.1),
        trajectory,
    })
}
