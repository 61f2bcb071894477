//! Truncated power series with complex coefficients.
//!
//! Used for the ψ/χ/F transforms of circle laws and for Taylor coefficients
//! of the initial Herglotz functions.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

type C = Complex64;

/// Coefficients `c[0..=order]` of a power series truncated at `z^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSeries {
    c: Vec<C>,
}

impl TransformSeries {
    pub fn zero(order: usize) -> Self {
        TransformSeries { c: vec![C::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = C::new(v, 0.0);
        s
    }

    /// The monomial `z^k`, truncated.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.c[k] = C::new(1.0, 0.0);
        }
        s
    }

    pub fn from_coeffs(c: Vec<C>) -> Self {
        assert!(!c.is_empty(), "series needs at least one coefficient");
        TransformSeries { c }
    }

    pub fn from_real(c: &[f64]) -> Self {
        Self::from_coeffs(c.iter().map(|&x| C::new(x, 0.0)).collect())
    }

    /// Geometric series `Σ_{n≥0} (w z^k)^n`, i.e. `1/(1 - w z^k)`.
    pub fn geometric(w: f64, k: usize, order: usize) -> Self {
        assert!(k >= 1);
        let mut s = Self::zero(order);
        let mut p = 1.0;
        let mut n = 0;
        while n <= order {
            s.c[n] = C::new(p, 0.0);
            p *= w;
            n += k;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> C {
        self.c.get(k).copied().unwrap_or(C::new(0.0, 0.0))
    }

    /// Truncates (or zero-extends) to a new order.
    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(order + 1, C::new(0.0, 0.0));
        TransformSeries { c }
    }

    pub fn scale(&self, s: C) -> Self {
        TransformSeries { c: self.c.iter().map(|&x| x * s).collect() }
    }

    pub fn eval(&self, z: C) -> C {
        self.c.iter().rev().fold(C::new(0.0, 0.0), |acc, &x| acc * z + x)
    }

    /// `z · f`, keeping the order.
    pub fn mul_by_z(&self) -> Self {
        let mut c = vec![C::new(0.0, 0.0)];
        c.extend_from_slice(&self.c[..self.order()]);
        TransformSeries { c }
    }

    /// `f / z`; requires `f(0) = 0`. The top coefficient becomes unknown and
    /// the order drops by one.
    pub fn div_by_z(&self) -> Result<Self> {
        if self.c[0].norm() > 1e-14 {
            return Err(Error::InvalidInput("div_by_z of a series with nonzero constant term".into()));
        }
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        Ok(TransformSeries { c: self.c[1..].to_vec() })
    }

    /// Multiplicative inverse `1/f`; requires `f(0) ≠ 0`.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.c[0];
        if c0.norm() == 0.0 {
            return Err(Error::InvalidInput("reciprocal of a series vanishing at 0".into()));
        }
        let n = self.order();
        let mut r = vec![C::new(0.0, 0.0); n + 1];
        r[0] = c0.inv();
        for k in 1..=n {
            let mut s = C::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s / c0;
        }
        Ok(TransformSeries { c: r })
    }

    /// Square root with the principal value of `sqrt(f(0))`; requires `f(0) ≠ 0`.
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = self.c[0];
        if c0.norm() == 0.0 {
            return Err(Error::InvalidInput("square root of a series vanishing at 0".into()));
        }
        let n = self.order();
        let mut s = vec![C::new(0.0, 0.0); n + 1];
        s[0] = c0.sqrt();
        for k in 1..=n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (s[0] * 2.0);
        }
        Ok(TransformSeries { c: s })
    }

    /// `exp(f)`.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![C::new(0.0, 0.0); n + 1];
        e[0] = self.c[0].exp();
        // e' = f' e  ⇒  k e_k = Σ_{j=1}^{k} j f_j e_{k-j}
        for k in 1..=n {
            let mut acc = C::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.c[j] * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        TransformSeries { c: e }
    }

    /// Formal composition `self ∘ inner`; requires `inner(0) = 0`.
    pub fn compose(&self, inner: &TransformSeries) -> Result<Self> {
        if inner.c[0].norm() > 1e-14 {
            return Err(Error::InvalidInput("inner series of a composition must vanish at 0".into()));
        }
        let n = self.order().min(inner.order());
        let g = inner.truncate(n);
        let mut acc = Self::zero(n);
        for &a in self.c[..=n].iter().rev() {
            acc = &acc * &g;
            acc.c[0] += a;
        }
        Ok(acc)
    }

    /// `χ = ψ / (1 + ψ)`.
    pub fn psi_to_chi(psi: &TransformSeries) -> Result<Self> {
        let one_plus = psi + &Self::constant(1.0, psi.order());
        Ok(psi * &one_plus.recip()?)
    }

    /// `ψ = χ / (1 − χ)`.
    pub fn chi_to_psi(chi: &TransformSeries) -> Result<Self> {
        let one_minus = &Self::constant(1.0, chi.order()) - chi;
        Ok(chi * &one_minus.recip()?)
    }

    /// `F = χ / z`.
    pub fn chi_to_f(chi: &TransformSeries) -> Result<Self> {
        chi.div_by_z()
    }

    /// `χ = z F`, raised back to the given order.
    pub fn f_to_chi(f: &TransformSeries, order: usize) -> Self {
        f.truncate(order).mul_by_z()
    }
}

impl Add for &TransformSeries {
    type Output = TransformSeries;
    fn add(self, o: &TransformSeries) -> TransformSeries {
        let n = self.order().min(o.order());
        TransformSeries { c: (0..=n).map(|k| self.c[k] + o.c[k]).collect() }
    }
}

impl Sub for &TransformSeries {
    type Output = TransformSeries;
    fn sub(self, o: &TransformSeries) -> TransformSeries {
        let n = self.order().min(o.order());
        TransformSeries { c: (0..=n).map(|k| self.c[k] - o.c[k]).collect() }
    }
}

impl Neg for &TransformSeries {
    type Output = TransformSeries;
    fn neg(self) -> TransformSeries {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl Mul for &TransformSeries {
    type Output = TransformSeries;
    fn mul(self, o: &TransformSeries) -> TransformSeries {
        let n = self.order().min(o.order());
        let mut c = vec![C::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            if self.c[i] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..=(n - i) {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        TransformSeries { c }
    }
}
