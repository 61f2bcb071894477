//! Initial conditions `H(0, ·)` of the liberation PDE.

use crate::error::{Error, Result};
use crate::measures::{Atom, CircleMeasure};
use crate::series::TransformSeries;
use std::f64::consts::PI;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Default truncation order of moment series.
pub const DEFAULT_ORDER: usize = 32;

/// Initial law of the pair `(R, U_0 S U_0^*)`, described through the law
/// `ν_0` of `RS`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialLaw {
    /// `R` and `S` free.
    Free { alpha: f64, beta: f64 },
    /// `R` and `S` classically independent (commuting).
    Classical { alpha: f64, beta: f64 },
    /// Boolean independent symmetric Bernoulli pair (`α = β = 0`).
    BooleanSymmetric,
    /// Monotone independent symmetric Bernoulli pair (`α = β = 0`).
    MonotoneSymmetric,
    /// Arbitrary `ν_0` with `α = β = 0`.
    Centered { nu0: CircleMeasure },
    /// Only the moments `m_k(0)`, `k ≥ 1`, of `ν_0` are known.
    Moments { alpha: f64, beta: f64, moments: Vec<f64> },
}

/// `Σ_{λ_t}(z) = exp((t/2)(1+z)/(1−z))`.
pub fn sigma_lambda(t: f64, z: C) -> Result<C> {
    let one = C::new(1.0, 0.0);
    if (z - one).norm() == 0.0 {
        return Err(Error::Pole("sigma transform at z = 1".into()));
    }
    Ok(((one + z) / (one - z) * (t / 2.0)).exp())
}

/// Multiplicative boolean convolution in the `F` picture: `F = F_1 F_2`.
pub fn boolean_convolve_f(f1: &TransformSeries, f2: &TransformSeries) -> TransformSeries {
    f1 * f2
}

/// Multiplicative monotone convolution in the `χ` picture: `χ = χ_1 ∘ χ_2`.
pub fn monotone_convolve_chi(chi1: &TransformSeries, chi2: &TransformSeries) -> Result<TransformSeries> {
    chi1.compose(chi2)
}

/// `ψ` of the symmetric Bernoulli law `½(δ_1 + δ_{−1})`: `z²/(1 − z²)`.
pub fn bernoulli_psi(order: usize) -> TransformSeries {
    &TransformSeries::geometric(1.0, 2, order) - &TransformSeries::constant(1.0, order)
}

fn check_trace(name: &str, v: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&v) || !v.is_finite() {
        return Err(Error::InvalidInput(format!("{name} = {v} must lie in [-1, 1]")));
    }
    Ok(())
}

/// `(1 + z^p)/(1 − z^p)` and its derivative.
fn power_law(z: C, p: i32) -> (C, C) {
    let zp = z.powi(p);
    let one = C::new(1.0, 0.0);
    let den = one - zp;
    ((one + zp) / den, z.powi(p - 1) * (2.0 * p as f64) / (den * den))
}

impl InitialLaw {
    pub fn free(alpha: f64, beta: f64) -> Result<Self> {
        check_trace("alpha", alpha)?;
        check_trace("beta", beta)?;
        Ok(InitialLaw::Free { alpha, beta })
    }

    pub fn classical(alpha: f64, beta: f64) -> Result<Self> {
        check_trace("alpha", alpha)?;
        check_trace("beta", beta)?;
        Ok(InitialLaw::Classical { alpha, beta })
    }

    /// Centered law; `ν_0` must have no atom-free mass defect.
    pub fn centered(nu0: CircleMeasure) -> Self {
        InitialLaw::Centered { nu0 }
    }

    /// `ν_0 = δ_1`, i.e. `P = Q` with `τ(P) = ½`.
    pub fn centered_delta() -> Self {
        InitialLaw::Centered {
            nu0: CircleMeasure::atomic(vec![Atom { angle: 0.0, mass: 1.0 }]).expect("valid atom"),
        }
    }

    pub fn moments(alpha: f64, beta: f64, moments: Vec<f64>) -> Result<Self> {
        check_trace("alpha", alpha)?;
        check_trace("beta", beta)?;
        if moments.iter().any(|m| !(m.abs() <= 1.0 + 1e-12)) {
            return Err(Error::InvalidInput("moments of a circle law have modulus at most 1".into()));
        }
        Ok(InitialLaw::Moments { alpha, beta, moments })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            InitialLaw::Free { .. } => "free",
            InitialLaw::Classical { .. } => "classical",
            InitialLaw::BooleanSymmetric => "boolean",
            InitialLaw::MonotoneSymmetric => "monotone",
            InitialLaw::Centered { .. } => "centered",
            InitialLaw::Moments { .. } => "moments",
        }
    }

    /// The traces `(α, β)` implied by the law.
    pub fn traces(&self) -> (f64, f64) {
        match self {
            InitialLaw::Free { alpha, beta }
            | InitialLaw::Classical { alpha, beta }
            | InitialLaw::Moments { alpha, beta, .. } => (*alpha, *beta),
            _ => (0.0, 0.0),
        }
    }

    /// Angles in `[0, π]` carrying mass of `ν_0`: its atoms, and a sample
    /// of density nodes for a centered law.
    pub fn mass_angles(&self) -> Vec<f64> {
        let mut v = match self {
            InitialLaw::Free { .. } | InitialLaw::Moments { .. } => vec![],
            InitialLaw::Classical { .. } => vec![0.0, PI],
            InitialLaw::BooleanSymmetric => vec![0.0, 2.0 * PI / 3.0],
            InitialLaw::MonotoneSymmetric => vec![0.0, PI / 2.0, PI],
            InitialLaw::Centered { nu0 } => {
                let mut v: Vec<f64> = nu0.atoms().iter().map(|a| a.angle.abs()).collect();
                let pos: Vec<f64> = nu0
                    .nodes()
                    .iter()
                    .zip(nu0.values())
                    .filter(|(t, d)| **t >= 0.0 && **d > 0.0)
                    .map(|(t, _)| *t)
                    .collect();
                let stride = (pos.len() / 64).max(1);
                v.extend(pos.into_iter().step_by(stride));
                v
            }
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Whether `H(0, ·)` can be evaluated.
    pub fn has_herglotz(&self) -> bool {
        !matches!(self, InitialLaw::Moments { .. })
    }

    /// `(H0², d H0²/dz)`; for the free law no square root is needed.
    pub fn h0_squared(&self, z: C) -> Result<(C, C)> {
        match self {
            InitialLaw::Free { alpha, beta } => {
                let a = (alpha - beta).abs() / 2.0;
                let b = (alpha + beta).abs() / 2.0;
                let one = C::new(1.0, 0.0);
                let m = one - z;
                let p = one + z;
                let q = b * b / (m * m) - a * a / (p * p);
                let dq = b * b * 2.0 / (m * m * m) + a * a * 2.0 / (p * p * p);
                Ok((one + z * q * 4.0, q * 4.0 + z * dq * 4.0))
            }
            _ => {
                let (h, d) = self.h0_with_derivative(z)?;
                Ok((h * h, h * d * 2.0))
            }
        }
    }

    /// `H(0, z)` for `|z| < 1`.
    pub fn h0_eval(&self, z: C) -> Result<C> {
        self.h0_with_derivative(z).map(|p| p.0)
    }

    /// `(H(0, z), ∂_z H(0, z))`.
    pub fn h0_with_derivative(&self, z: C) -> Result<(C, C)> {
        if !(z.norm() < 1.0) {
            return Err(Error::Domain(format!("|z| = {} is not inside the unit disc", z.norm())));
        }
        let one = C::new(1.0, 0.0);
        match self {
            InitialLaw::Free { .. } => {
                // Track the square-root branch along the radius from 0.
                let steps = 32;
                let mut h = one;
                for k in 1..=steps {
                    let zk = z * (k as f64 / steps as f64);
                    let (sq, _) = self.h0_squared(zk)?;
                    let r = sq.sqrt();
                    let cand = if (r - h).norm() <= (-r - h).norm() { r } else { -r };
                    if (cand - h).norm() > 0.5 * (h.norm() + cand.norm()) && sq.norm() > 1e-12 {
                        return Err(Error::Branch { re: zk.re, im: zk.im });
                    }
                    h = cand;
                }
                let (_, dsq) = self.h0_squared(z)?;
                if h.norm() < 1e-14 {
                    return Err(Error::Branch { re: z.re, im: z.im });
                }
                Ok((h, dsq / (h * 2.0)))
            }
            InitialLaw::Classical { alpha, beta } => {
                let ab = alpha * beta;
                let n = one + z * z + z * (2.0 * ab);
                let d = one - z * z;
                let dn = z * 2.0 + 2.0 * ab;
                let dd = -z * 2.0;
                Ok((n / d, (dn * d - n * dd) / (d * d)))
            }
            InitialLaw::BooleanSymmetric => Ok(power_law(z, 3)),
            InitialLaw::MonotoneSymmetric => Ok(power_law(z, 4)),
            InitialLaw::Centered { nu0 } => nu0.herglotz_with_derivative(z),
            InitialLaw::Moments { .. } => Err(Error::InvalidInput(
                "a moment-only initial law has no Herglotz evaluation".into(),
            )),
        }
    }

    /// Moments `m_0 = 1, m_1, …, m_n` of `ν_0`, i.e. the coefficients of
    /// `ψ_{ν_0}`, computed by series arithmetic.
    pub fn initial_moments(&self, n: usize) -> Result<Vec<f64>> {
        if n > 64 {
            return Err(Error::InvalidInput(format!("moment order {n} exceeds 64")));
        }
        let order = n.max(1);
        let psi: TransformSeries = match self {
            InitialLaw::Free { alpha, beta } => {
                let a = (alpha - beta).abs() / 2.0;
                let b = (alpha + beta).abs() / 2.0;
                // 1/(1−z)² = Σ (k+1) z^k
                let inv_m2: Vec<f64> = (0..=order).map(|k| (k + 1) as f64).collect();
                let inv_p2: Vec<f64> = (0..=order).map(|k| (k + 1) as f64 * if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
                let q = &TransformSeries::from_real(&inv_m2).scale(C::new(b * b, 0.0))
                    - &TransformSeries::from_real(&inv_p2).scale(C::new(a * a, 0.0));
                let h2 = &TransformSeries::constant(1.0, order) + &q.mul_by_z().scale(C::new(4.0, 0.0));
                let h = h2.sqrt()?;
                (&h - &TransformSeries::constant(1.0, order)).scale(C::new(0.5, 0.0))
            }
            InitialLaw::Classical { alpha, beta } => {
                let p = (1.0 + alpha * beta) / 2.0;
                let q = (1.0 - alpha * beta) / 2.0;
                let c: Vec<f64> = (0..=order)
                    .map(|k| if k == 0 { 0.0 } else { p + if k % 2 == 0 { q } else { -q } })
                    .collect();
                TransformSeries::from_real(&c)
            }
            InitialLaw::BooleanSymmetric => {
                let f = TransformSeries::chi_to_f(&TransformSeries::psi_to_chi(&bernoulli_psi(order + 1))?)?;
                let chi = TransformSeries::f_to_chi(&boolean_convolve_f(&f, &f), order);
                TransformSeries::chi_to_psi(&chi)?
            }
            InitialLaw::MonotoneSymmetric => {
                let chi = TransformSeries::psi_to_chi(&bernoulli_psi(order))?;
                TransformSeries::chi_to_psi(&monotone_convolve_chi(&chi, &chi)?)?
            }
            InitialLaw::Centered { nu0 } => {
                let c: Vec<C> = (0..=order)
                    .map(|k| if k == 0 { C::new(0.0, 0.0) } else { nu0.circle_moment(k as i64).conj() })
                    .collect();
                TransformSeries::from_coeffs(c)
            }
            InitialLaw::Moments { moments, .. } => {
                if moments.len() < n {
                    return Err(Error::InvalidInput(format!(
                        "{} moments given, {n} required",
                        moments.len()
                    )));
                }
                let mut c = vec![0.0];
                c.extend_from_slice(&moments[..n]);
                c.resize(order + 1, 0.0);
                TransformSeries::from_real(&c)
            }
        };
        let mut m: Vec<f64> = (0..=n).map(|k| psi.coeff(k).re).collect();
        m[0] = 1.0;
        Ok(m)
    }
}

/// JSON description of an initial law used by configuration files:
/// `{"tag": "free|classical|boolean|monotone|centered|moments", "alpha": ..,
/// "beta": .., "moments": [..], "atoms": [..]}`. Missing traces default to
/// the values supplied by the caller.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InitialLawSpec {
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<f64>>,
    /// Atoms of `ν_0` for the centered law (default `δ_1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<Atom>>,
}

impl InitialLawSpec {
    pub fn build(&self, alpha: f64, beta: f64) -> Result<InitialLaw> {
        let a = self.alpha.unwrap_or(alpha);
        let b = self.beta.unwrap_or(beta);
        let centered_only = |name: &str| -> Result<()> {
            if a != 0.0 || b != 0.0 {
                return Err(Error::InvalidInput(format!("the {name} law requires alpha = beta = 0")));
            }
            Ok(())
        };
        match self.tag.as_str() {
            "free" => InitialLaw::free(a, b),
            "classical" => InitialLaw::classical(a, b),
            "boolean" => {
                centered_only("boolean")?;
                Ok(InitialLaw::BooleanSymmetric)
            }
            "monotone" => {
                centered_only("monotone")?;
                Ok(InitialLaw::MonotoneSymmetric)
            }
            "centered" => {
                centered_only("centered")?;
                match &self.atoms {
                    None => Ok(InitialLaw::centered_delta()),
                    Some(at) => Ok(InitialLaw::centered(CircleMeasure::atomic(at.clone())?)),
                }
            }
            "moments" => {
                let m = self
                    .moments
                    .clone()
                    .ok_or_else(|| Error::InvalidInput("the moments law needs a \"moments\" array".into()))?;
                InitialLaw::moments(a, b, m)
            }
            other => Err(Error::InvalidInput(format!("unknown initial law tag {other:?}"))),
        }
    }

    pub fn parse(json: &str, alpha: f64, beta: f64) -> Result<InitialLaw> {
        let spec: InitialLawSpec =
            serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("initial law JSON: {e}")))?;
        spec.build(alpha, beta)
    }
}
