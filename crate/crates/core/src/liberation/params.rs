use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Traces `α = τ(R)`, `β = τ(S)` and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiberationParams {
    pub alpha: f64,
    pub beta: f64,
    /// `|α − β|/2`, the atom at `π`.
    pub a: f64,
    /// `|α + β|/2`, the atom at `0`.
    pub b: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
}

impl LiberationParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (n, v) in [("alpha", alpha), ("beta", beta)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!("{n} = {v} must lie in [-1, 1]")));
            }
        }
        let a = (alpha - beta).abs() / 2.0;
        let b = (alpha + beta).abs() / 2.0;
        let s = ((1.0 - alpha * alpha) * (1.0 - beta * beta)).max(0.0).sqrt();
        let r_plus = (-alpha * beta + s).clamp(-1.0, 1.0);
        let r_minus = (-alpha * beta - s).clamp(-1.0, 1.0);
        Ok(LiberationParams {
            alpha,
            beta,
            a,
            b,
            r_plus,
            r_minus,
            theta_plus: r_plus.acos(),
            theta_minus: r_minus.acos(),
        })
    }

    /// `√(1 − (a + b)²)`, the conserved value of the free law.
    pub fn k_free(&self) -> f64 {
        (1.0 - (self.a + self.b).powi(2)).max(0.0).sqrt()
    }

    /// One of `R`, `S` is `±I`.
    pub fn degenerate(&self) -> bool {
        self.a + self.b >= 1.0 - 1e-14
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = LiberationParams::new(0.6, 0.2).unwrap();
        assert!((p.a - 0.2).abs() < 1e-15 && (p.b - 0.4).abs() < 1e-15);
        let s = (0.64f64 * 0.96).sqrt();
        assert!((p.r_plus - (-0.12 + s)).abs() < 1e-15);
        assert!((p.r_minus - (-0.12 - s)).abs() < 1e-15);
        assert!(p.theta_plus <= p.theta_minus);
        assert!(LiberationParams::new(1.5, 0.0).is_err());
    }
}
