//! Moment hierarchy of `ν_t`: a triangular ODE system for `m_1, …, m_N`
//! read off the power series of the equation for `H`.

use crate::error::{Error, Result};
use crate::initlaws::InitialLaw;
use crate::liberation::{nu_t, LiberationParams};
use crate::ode::rk4_step;

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 64;
/// Density nodes used for the flow side of [`crosscheck`].
pub const CROSSCHECK_NODES: usize = 8192;

/// Moments `m_1..m_N` of `ν_t` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `m[k-1] = m_k`.
    pub m: Vec<f64>,
}

impl MomentState {
    /// CSV with header `k,m_k`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,m_k\n");
        for (k, v) in self.m.iter().enumerate() {
            s.push_str(&format!("{},{:.16e}\n", k + 1, v));
        }
        s
    }
}

fn binomial_products(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= n {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Taylor coefficients `r_0..r_N` of
/// `2z(αz²+2βz+α)(βz²+2αz+β)/(1−z²)³`.
pub fn rhs_series(alpha: f64, beta: f64, n: usize) -> Result<Vec<f64>> {
    if n > MAX_ORDER {
        return Err(Error::InvalidInput(format!("order {n} exceeds {MAX_ORDER}")));
    }
    let p1 = [alpha, 2.0 * beta, alpha];
    let p2 = [beta, 2.0 * alpha, beta];
    let num = binomial_products(&p1, &p2, n);
    // 1/(1−z²)³ = Σ C(m+2, 2) z^{2m}
    let den: Vec<f64> = (0..=n)
        .map(|k| if k % 2 == 0 { let m = (k / 2) as f64; (m + 1.0) * (m + 2.0) / 2.0 } else { 0.0 })
        .collect();
    let q = binomial_products(&num, &den, n);
    let mut r = vec![0.0; n + 1];
    for k in 1..=n {
        r[k] = 2.0 * q[k - 1];
    }
    Ok(r)
}

/// Right side of the moment system; `m[k-1] = m_k`, `r[k]` from
/// [`rhs_series`].
fn moment_rhs(m: &[f64], r: &[f64]) -> Vec<f64> {
    let n = m.len();
    let mut d = vec![0.0; n];
    for k in 1..=n {
        let mut conv = 0.0;
        for j in 1..k {
            conv += m[j - 1] * m[k - j - 1];
        }
        let kf = k as f64;
        d[k - 1] = -kf * m[k - 1] - kf * conv + 0.5 * r[k];
    }
    d
}

/// Evolves `m_1..m_N` from `init` (either `m_1..m_N` or `m_0..m_N` with
/// `m_0 = 1`) to time `t` by fixed-step RK4.
pub fn evolve_moments(init: &[f64], alpha: f64, beta: f64, t: f64, n: usize) -> Result<MomentState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if n == 0 || n > MAX_ORDER {
        return Err(Error::InvalidInput(format!("order {n} must lie in 1..={MAX_ORDER}")));
    }
    let m0: &[f64] = if init.len() == n + 1 { &init[1..] } else { init };
    if m0.len() < n {
        return Err(Error::InvalidInput(format!("{} initial moments given, {n} needed", m0.len())));
    }
    let mut m: Vec<f64> = m0[..n].to_vec();
    check(&m, 0.0)?;
    let r = rhs_series(alpha, beta, n)?;
    let h_max = 1e-3 * (1.0f64).min(1.0 / n as f64);
    let steps = (t / h_max).ceil() as usize;
    if steps > 0 {
        let h = t / steps as f64;
        let mut f = |_s: f64, y: &[f64]| moment_rhs(y, &r);
        for i in 0..steps {
            m = rk4_step(&mut f, i as f64 * h, &m, h);
            check(&m, (i + 1) as f64 * h)?;
        }
    }
    Ok(MomentState { t, alpha, beta, m })
}

fn check(m: &[f64], t: f64) -> Result<()> {
    for (k, v) in m.iter().enumerate() {
        if !(v.abs() <= 1.0 + 1e-6) {
            return Err(Error::Instability { k: k + 1, value: *v, t });
        }
    }
    Ok(())
}

/// `max_{k ≤ K} |m_k(t) − ∫ζ^k dν_t|` between the moment hierarchy and the
/// characteristic-flow measure.
pub fn crosscheck(t: f64, law: &InitialLaw, p: &LiberationParams, k_max: usize) -> Result<f64> {
    crosscheck_with_nodes(t, law, p, k_max, CROSSCHECK_NODES)
}

/// [`crosscheck`] with an explicit node count for the flow side.
pub fn crosscheck_with_nodes(t: f64, law: &InitialLaw, p: &LiberationParams, k_max: usize, nodes: usize) -> Result<f64> {
    let init = law.initial_moments(k_max)?;
    let ev = evolve_moments(&init, p.alpha, p.beta, t, k_max)?;
    let nu = nu_t(t, law, p, nodes)?;
    let mut worst: f64 = 0.0;
    for k in 1..=k_max {
        let c = nu.circle_moment(k as i64);
        worst = worst.max((ev.m[k - 1] - c.re).abs()).max(c.im.abs());
    }
    Ok(worst)
}
