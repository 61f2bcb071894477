//! Pairs of symmetries `R`, `S` with prescribed normalized traces.

use crate::unitary::CMat;
use freejacobi_core::{Error, Result};
use ndarray::Array2;
use ndarray_linalg::QR;
use num_complex::Complex64 as C;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// How `S` sits relative to `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Structure {
    /// `S` conjugated by an independent Haar unitary.
    FreePair,
    /// `R` and `S` diagonal in the same basis.
    CommutingClassical,
}

/// `R = diag(r)` and `S = W diag(s) W*` (`W = I` when absent).
#[derive(Debug, Clone)]
pub struct SymmetryPair {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub w: Option<CMat>,
}

impl SymmetryPair {
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn r_matrix(&self) -> CMat {
        Array2::from_diag(&ndarray::Array1::from_iter(self.r.iter().map(|&x| C::new(x, 0.0))))
    }

    pub fn s_matrix(&self) -> CMat {
        let dg = ndarray::Array1::from_iter(self.s.iter().map(|&x| C::new(x, 0.0)));
        match &self.w {
            None => Array2::from_diag(&dg),
            Some(w) => conj_diag(w, &self.s),
        }
    }
}

/// `X diag(v) X*`.
pub(crate) fn conj_diag(x: &CMat, v: &[f64]) -> CMat {
    let mut xd = x.clone();
    for (mut col, &s) in xd.columns_mut().into_iter().zip(v) {
        col.mapv_inplace(|z| z * s);
    }
    xd.dot(&x.t().mapv(|z| z.conj()))
}

/// Number of `+1` eigenvalues giving the trace nearest `αd`.
pub fn plus_count(d: usize, alpha: f64) -> Result<usize> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("trace {alpha} must lie in [-1, 1]")));
    }
    Ok(((d as f64) * (1.0 + alpha) / 2.0).round().clamp(0.0, d as f64) as usize)
}

fn signs(d: usize, plus: usize) -> Vec<f64> {
    (0..d).map(|i| if i < plus { 1.0 } else { -1.0 }).collect()
}

/// Haar-distributed unitary from the QR factorization of a complex
/// Ginibre matrix, with the phases of `diag(R)` removed.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<CMat> {
    let z = CMat::from_shape_fn((d, d), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C::new(re, im)
    });
    let (mut q, r) = z.qr().map_err(|e| Error::Numeric(format!("qr: {e}")))?;
    for (j, mut col) in q.columns_mut().into_iter().enumerate() {
        let p = r[[j, j]];
        let ph = if p.norm() > 0.0 { p / p.norm() } else { C::new(1.0, 0.0) };
        col.mapv_inplace(|x| x * ph);
    }
    Ok(q)
}

/// Symmetries with `(1/d) tr R ≈ α`, `(1/d) tr S ≈ β`.
///
/// Both structures use exact `±1` counts. For the commuting pair the `+1`
/// positions of `S` form a uniformly random subset, independent of `R`.
pub fn make_symmetry_pair<R: Rng + ?Sized>(
    d: usize,
    alpha: f64,
    beta: f64,
    structure: Structure,
    rng: &mut R,
) -> Result<SymmetryPair> {
    let r = signs(d, plus_count(d, alpha)?);
    let mut s = signs(d, plus_count(d, beta)?);
    match structure {
        Structure::FreePair => {
            let w = haar_unitary(d, rng)?;
            Ok(SymmetryPair { r, s, w: Some(w) })
        }
        Structure::CommutingClassical => {
            s.shuffle(rng);
            Ok(SymmetryPair { r, s, w: None })
        }
    }
}
