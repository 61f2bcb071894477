//! Unitary Brownian motion on `U(d)` by geodesic increments.

use freejacobi_core::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64 as C;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMat = Array2<C>;

/// Number of steps between polar re-unitarizations.
pub const REUNITARIZE_EVERY: usize = 64;

/// Hermitian Gaussian matrix with `E|G_jk|² = 1/d`, so that
/// `(1/d) E tr G² = 1`.
pub fn gue<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let mut g = CMat::zeros((d, d));
    let s = 1.0 / (d as f64).sqrt();
    let h = s / 2f64.sqrt();
    for j in 0..d {
        let x: f64 = rng.sample(StandardNormal);
        g[[j, j]] = C::new(s * x, 0.0);
        for k in j + 1..d {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C::new(h * re, h * im);
            g[[j, k]] = z;
            g[[k, j]] = z.conj();
        }
    }
    g
}

/// Upper bound for the spectral norm of a Hermitian matrix: the smaller of
/// the Frobenius norm and an inflated power-iteration estimate.
fn norm_bound(a: &CMat) -> f64 {
    let fro = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let d = a.nrows();
    let mut v = Array1::from_shape_fn(d, |i| C::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.1));
    let mut lam = 0.0;
    for _ in 0..30 {
        let w = a.dot(&v);
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        lam = n / v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.mapv(|z| z / n);
    }
    fro.min(1.25 * lam)
}

/// `exp(iA)` for Hermitian `A`: Taylor series evaluated by the
/// Paterson–Stockmeyer scheme, with scaling and squaring above norm 1/2.
pub fn exp_i_hermitian(a: &CMat) -> CMat {
    let d = a.nrows();
    let nb = norm_bound(a);
    let mut s = 0;
    while nb / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let x = nb / 2f64.powi(s);
    // Smallest degree whose Taylor remainder is below 1e-17.
    let mut m = 1usize;
    let mut term = x;
    while term * x / (m + 1) as f64 > 1e-17 && m < 30 {
        m += 1;
        term *= x / m as f64;
    }
    let b = a.mapv(|z| z * C::new(0.0, 1.0 / 2f64.powi(s)));
    let q = ((m as f64).sqrt().ceil() as usize).max(1);
    let eye = CMat::eye(d);
    let mut pow = vec![eye.clone(), b.clone()];
    for k in 2..=q {
        let next = pow[k - 1].dot(&b);
        pow.push(next);
    }
    let mut coef = vec![1.0f64; m + 1];
    for k in 1..=m {
        coef[k] = coef[k - 1] / k as f64;
    }
    let block = |j: usize| -> CMat {
        let mut acc = CMat::zeros((d, d));
        for r in 0..q {
            let k = j * q + r;
            if k <= m {
                acc.scaled_add(C::new(coef[k], 0.0), &pow[r]);
            }
        }
        acc
    };
    let top = m / q;
    let mut p = block(top);
    for j in (0..top).rev() {
        p = pow[q].dot(&p) + block(j);
    }
    for _ in 0..s {
        p = p.dot(&p);
    }
    p
}

/// Nearest unitary matrix in the polar decomposition.
pub fn polar_unitary(u: &CMat) -> Result<CMat> {
    let (w, _, vt) = u.svd(true, true).map_err(|e| Error::Numeric(format!("svd: {e}")))?;
    let (w, vt) = (w.expect("left vectors requested"), vt.expect("right vectors requested"));
    Ok(w.dot(&vt))
}

/// `max |(U*U − I)_{jk}|`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let g = u.t().mapv(|z| z.conj()).dot(u);
    let mut worst: f64 = 0.0;
    for ((j, k), z) in g.indexed_iter() {
        let e = if j == k { *z - 1.0 } else { *z };
        worst = worst.max(e.norm());
    }
    worst
}

/// `U_t` as the product of `steps` increments `exp(i√δ G_k)`, `δ = t/steps`.
pub fn sample_unitary_bm<R: Rng + ?Sized>(d: usize, t: f64, steps: usize, rng: &mut R) -> Result<CMat> {
    if t == 0.0 {
        return Ok(CMat::eye(d));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("at least one step is needed for t > 0".into()));
    }
    let mut v = sample_unitary_bm_checkpoints(d, t / steps as f64, &[steps], rng)?;
    Ok(v.pop().expect("one checkpoint"))
}

/// The same path observed after each of the (increasing) step counts in
/// `checkpoints`, with step `dt`.
pub fn sample_unitary_bm_checkpoints<R: Rng + ?Sized>(
    d: usize,
    dt: f64,
    checkpoints: &[usize],
    rng: &mut R,
) -> Result<Vec<CMat>> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension {d} must be at least 2")));
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("step {dt} must be nonnegative")));
    }
    if checkpoints.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("checkpoints must be nondecreasing".into()));
    }
    let sq = dt.sqrt();
    let mut u = CMat::eye(d);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut done = 0usize;
    for &c in checkpoints {
        while done < c {
            let g = gue(d, rng);
            u = exp_i_hermitian(&g.mapv(|z| z * sq)).dot(&u);
            done += 1;
            if done % REUNITARIZE_EVERY == 0 {
                u = polar_unitary(&u)?;
            }
        }
        out.push(if done % REUNITARIZE_EVERY == 0 { u.clone() } else { polar_unitary(&u)? });
    }
    Ok(out)
}
