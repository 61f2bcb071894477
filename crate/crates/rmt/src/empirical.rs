//! Monte Carlo spectra of `R U_t S U_t*` and of `P U_t Q U_t* P`.

use crate::symmetry::{conj_diag, make_symmetry_pair, Structure, SymmetryPair};
use crate::unitary::{sample_unitary_bm_checkpoints, CMat};
use freejacobi_core::measures::{uniform_grid, CircleMeasure};
use freejacobi_core::{Error, Result};
use ndarray_linalg::{EigVals, EigValsh, UPLO};
use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default number of histogram bins on the circle and on `[0, 1]`.
pub const DEFAULT_BINS: usize = 24;

/// Monte Carlo configuration. `steps` is the total number of increments
/// on `[0, t]`, so the step is `t/steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub d: usize,
    pub steps: usize,
    pub replicas: usize,
    pub seed: u64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub structure: Structure,
}

impl McConfig {
    /// Configuration with `δ = 0.01` and a free pair.
    pub fn new(d: usize, replicas: usize, seed: u64, t: f64, alpha: f64, beta: f64) -> Self {
        McConfig {
            d,
            steps: (100.0 * t).ceil() as usize,
            replicas,
            seed,
            t,
            alpha,
            beta,
            structure: Structure::FreePair,
        }
    }

    /// Traces of projections, `α = 2 tr P − 1`.
    pub fn from_traces(d: usize, replicas: usize, seed: u64, t: f64, tr_p: f64, tr_q: f64) -> Self {
        Self::new(d, replicas, seed, t, 2.0 * tr_p - 1.0, 2.0 * tr_q - 1.0)
    }

    pub fn with_structure(mut self, structure: Structure) -> Self {
        self.structure = structure;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidInput(format!("dimension {} must be at least 2", self.d)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidInput(format!("time {} must be nonnegative", self.t)));
        }
        if (self.steps as f64) < 100.0 * self.t - 1e-9 {
            return Err(Error::InvalidInput(format!("{} steps are too few for t = {}", self.steps, self.t)));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidInput("at least one replica is needed".into()));
        }
        for (n, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!("{n} = {v} must lie in [-1, 1]")));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.t / self.steps as f64
        }
    }

    pub fn tr_p(&self) -> f64 {
        (1.0 + self.alpha) / 2.0
    }

    pub fn tr_q(&self) -> f64 {
        (1.0 + self.beta) / 2.0
    }
}

/// RNG driving the Brownian path of replica `r`.
pub fn path_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    g.set_stream(2 * r as u64);
    g
}

/// RNG for the symmetries of replica `r`.
pub fn pair_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    g.set_stream(2 * r as u64 + 1);
    g
}

/// Per replica, the path observed at each checkpoint; `None` marks a
/// replica whose sampling failed.
pub type Paths = Vec<Option<Vec<CMat>>>;

/// Samples `replicas` paths with step `dt`. Replicas run in parallel and
/// are returned in index order.
pub fn sample_paths(d: usize, dt: f64, checkpoints: &[usize], replicas: usize, seed: u64) -> Result<Paths> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension {d} must be at least 2")));
    }
    Ok((0..replicas)
        .into_par_iter()
        .map(|r| sample_unitary_bm_checkpoints(d, dt, checkpoints, &mut path_rng(seed, r)).ok())
        .collect())
}

/// `U_t` for each replica of `cfg`.
pub fn sample_config(cfg: &McConfig) -> Result<Vec<Option<CMat>>> {
    cfg.validate()?;
    Ok(sample_paths(cfg.d, cfg.dt(), &[cfg.steps], cfg.replicas, cfg.seed)?
        .into_iter()
        .map(|p| p.and_then(|mut v| v.pop()))
        .collect())
}

/// The `i`-th checkpoint of every path.
pub fn at_checkpoint(paths: &Paths, i: usize) -> Vec<Option<CMat>> {
    paths.iter().map(|p| p.as_ref().and_then(|v| v.get(i).cloned())).collect()
}

/// Eigenvalue angles of `R U S U*`.
pub fn nu_angles(pair: &SymmetryPair, u: &CMat) -> Result<Vec<f64>> {
    let v = match &pair.w {
        Some(w) => u.dot(w),
        None => u.clone(),
    };
    let mut m = conj_diag(&v, &pair.s);
    for (mut row, &r) in m.rows_mut().into_iter().zip(&pair.r) {
        if r < 0.0 {
            row.mapv_inplace(|z| -z);
        }
    }
    let ev = m.eigvals().map_err(|e| Error::Numeric(format!("eig: {e}")))?;
    Ok(ev.iter().map(|z| z.arg()).collect())
}

/// Full-algebra spectrum of `P U Q U* P`: the eigenvalues of the
/// compression to `range(P)`, padded with zeros from `ker P`.
pub fn jacobi_spectrum(pair: &SymmetryPair, u: &CMat) -> Result<Vec<f64>> {
    let d = pair.dim();
    let v = match &pair.w {
        Some(w) => u.dot(w),
        None => u.clone(),
    };
    let rows: Vec<usize> = (0..d).filter(|&i| pair.r[i] > 0.0).collect();
    let cols: Vec<usize> = (0..d).filter(|&j| pair.s[j] > 0.0).collect();
    let mut ev = vec![0.0; d - rows.len()];
    if !rows.is_empty() {
        let a = CMat::from_shape_fn((rows.len(), cols.len()), |(i, j)| v[[rows[i], cols[j]]]);
        let x = a.dot(&a.t().mapv(|z| z.conj()));
        let lam = x.eigvalsh(UPLO::Lower).map_err(|e| Error::Numeric(format!("eigh: {e}")))?;
        ev.extend(lam.iter().map(|l| l.clamp(0.0, 1.0)));
    }
    Ok(ev)
}

/// Pooled Monte Carlo sample of `ν_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalNu {
    pub d: usize,
    /// Eigenvalue angles, replica by replica.
    pub angles: Vec<f64>,
    pub replicas_used: usize,
    pub replicas_skipped: usize,
    /// Mass with `|θ| < 2π/d`.
    pub atom_zero: f64,
    /// Mass with `|θ − π| < 2π/d`.
    pub atom_pi: f64,
    /// Per-replica circle moments `k = 1..=4`.
    per_replica: Vec<[C; 4]>,
}

impl EmpiricalNu {
    fn from_samples(d: usize, samples: Vec<Option<Vec<f64>>>) -> Result<Self> {
        let skipped = samples.iter().filter(|s| s.is_none()).count();
        let kept: Vec<Vec<f64>> = samples.into_iter().flatten().collect();
        if kept.is_empty() {
            return Err(Error::Numeric(format!("all {skipped} replicas failed")));
        }
        let per_replica: Vec<[C; 4]> = kept
            .iter()
            .map(|a| {
                let mut m = [C::new(0.0, 0.0); 4];
                for (k, mk) in m.iter_mut().enumerate() {
                    *mk = a.iter().map(|&t| C::from_polar(1.0, (k + 1) as f64 * t)).sum::<C>() / a.len() as f64;
                }
                m
            })
            .collect();
        let angles: Vec<f64> = kept.into_iter().flatten().collect();
        let w = 2.0 * PI / d as f64;
        let n = angles.len() as f64;
        let atom_zero = angles.iter().filter(|t| t.abs() < w).count() as f64 / n;
        let atom_pi = angles.iter().filter(|t| PI - t.abs() < w).count() as f64 / n;
        Ok(EmpiricalNu {
            d,
            replicas_used: per_replica.len(),
            replicas_skipped: skipped,
            angles,
            atom_zero,
            atom_pi,
            per_replica,
        })
    }

    /// Mean over replicas of `(1/d) tr (RUSU*)^k`, `1 ≤ k ≤ 4`.
    pub fn moment(&self, k: usize) -> C {
        assert!((1..=4).contains(&k), "moment order {k} outside 1..=4");
        self.per_replica.iter().map(|m| m[k - 1]).sum::<C>() / self.per_replica.len() as f64
    }

    /// Standard error of [`EmpiricalNu::moment`] (modulus of the complex
    /// fluctuation); zero for a single replica.
    pub fn moment_stderr(&self, k: usize) -> f64 {
        let n = self.per_replica.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.moment(k);
        let var = self.per_replica.iter().map(|m| (m[k - 1] - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    }

    /// `(bin centre, count)` for `bins` equal bins centred on the uniform
    /// grid, the last bin straddling `±π`.
    pub fn bin_counts(&self, bins: usize) -> Vec<(f64, usize)> {
        let centres = uniform_grid(bins);
        let width = 2.0 * PI / bins as f64;
        let mut counts = vec![0usize; bins];
        for &t in &self.angles {
            // centre j sits at -π + (j+1)·width
            let j = ((t + PI) / width - 0.5).floor() as i64;
            counts[j.rem_euclid(bins as i64) as usize] += 1;
        }
        centres.into_iter().zip(counts).collect()
    }

    /// Histogram density with respect to normalized arclength, as a
    /// measure without atoms.
    pub fn histogram(&self, bins: usize) -> Result<CircleMeasure> {
        if bins < 2 {
            return Err(Error::InvalidInput("at least two bins are needed".into()));
        }
        let n = self.angles.len() as f64;
        let (nodes, values): (Vec<f64>, Vec<f64>) =
            self.bin_counts(bins).into_iter().map(|(c, k)| (c, k as f64 * bins as f64 / n)).unzip();
        CircleMeasure::new(vec![], nodes, values)
    }

    /// `bin_center,count,mass`.
    pub fn histogram_csv(&self, bins: usize) -> String {
        let n = self.angles.len() as f64;
        let mut s = String::from("bin_center,count,mass\n");
        for (c, k) in self.bin_counts(bins) {
            s.push_str(&format!("{c:.17e},{k},{:.17e}\n", k as f64 / n));
        }
        s
    }
}

/// Samples `ν_t` for `cfg`.
pub fn empirical_nu(cfg: &McConfig) -> Result<EmpiricalNu> {
    let us = sample_config(cfg)?;
    empirical_nu_from(cfg, &us)
}

/// `ν_t` from given `U_t` samples, one per replica. The symmetries of
/// replica `r` come from [`pair_rng`].
pub fn empirical_nu_from(cfg: &McConfig, us: &[Option<CMat>]) -> Result<EmpiricalNu> {
    cfg.validate()?;
    let samples = per_replica(cfg, us, nu_angles)?;
    EmpiricalNu::from_samples(cfg.d, samples)
}

fn per_replica<F>(cfg: &McConfig, us: &[Option<CMat>], f: F) -> Result<Vec<Option<Vec<f64>>>>
where
    F: Fn(&SymmetryPair, &CMat) -> Result<Vec<f64>> + Sync,
{
    if us.len() != cfg.replicas {
        return Err(Error::InvalidInput(format!("{} samples for {} replicas", us.len(), cfg.replicas)));
    }
    if let Some(u) = us.iter().flatten().find(|u| u.nrows() != cfg.d) {
        return Err(Error::InvalidInput(format!("sample of size {} for d = {}", u.nrows(), cfg.d)));
    }
    let pairs: Vec<SymmetryPair> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| make_symmetry_pair(cfg.d, cfg.alpha, cfg.beta, cfg.structure, &mut pair_rng(cfg.seed, r)))
        .collect::<Result<_>>()?;
    Ok(pairs
        .par_iter()
        .zip(us.par_iter())
        .map(|(p, u)| u.as_ref().and_then(|u| f(p, u).ok()))
        .collect())
}

/// Pooled Monte Carlo sample of `μ_t`, normalized in the full algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalJacobi {
    pub d: usize,
    /// Sorted pooled eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub replicas_used: usize,
    pub replicas_skipped: usize,
    /// Mass in `[0, 2/d)`.
    pub atom_zero: f64,
    /// Mass in `(1 − 2/d, 1]`.
    pub atom_one: f64,
}

impl EmpiricalJacobi {
    fn from_samples(d: usize, samples: Vec<Option<Vec<f64>>>) -> Result<Self> {
        let skipped = samples.iter().filter(|s| s.is_none()).count();
        let used = samples.len() - skipped;
        if used == 0 {
            return Err(Error::Numeric(format!("all {skipped} replicas failed")));
        }
        let mut eigenvalues: Vec<f64> = samples.into_iter().flatten().flatten().collect();
        eigenvalues.sort_by(f64::total_cmp);
        let n = eigenvalues.len() as f64;
        let w = 2.0 / d as f64;
        let atom_zero = eigenvalues.iter().filter(|&&x| x < w).count() as f64 / n;
        let atom_one = eigenvalues.iter().filter(|&&x| x > 1.0 - w).count() as f64 / n;
        Ok(EmpiricalJacobi { d, eigenvalues, replicas_used: used, replicas_skipped: skipped, atom_zero, atom_one })
    }

    /// `∫ x^k dμ` of the empirical measure.
    pub fn moment(&self, k: i32) -> f64 {
        self.eigenvalues.iter().map(|x| x.powi(k)).sum::<f64>() / self.eigenvalues.len() as f64
    }

    /// `sup_x |F_emp(x) − F(x)|` for a right-continuous distribution
/// function `F`, checking both one-sided limits at every sample.
    pub fn kolmogorov_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.eigenvalues.len() as f64;
        let mut worst: f64 = 0.0;
        let mut i = 0;
        let ev = &self.eigenvalues;
        while i < ev.len() {
            let mut j = i;
            while j + 1 < ev.len() && ev[j + 1] == ev[i] {
                j += 1;
            }
            let below = cdf(ev[i].next_down());
            worst = worst.max((below - i as f64 / n).abs()).max((cdf(ev[i]) - (j + 1) as f64 / n).abs());
            i = j + 1;
        }
        worst
    }

    /// `(bin centre, count)` for `bins` equal bins on `[0, 1]`.
    pub fn bin_counts(&self, bins: usize) -> Vec<(f64, usize)> {
        let mut counts = vec![0usize; bins];
        for &x in &self.eigenvalues {
            counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
        }
        counts.into_iter().enumerate().map(|(j, c)| ((j as f64 + 0.5) / bins as f64, c)).collect()
    }

    /// `bin_center,count,mass`.
    pub fn histogram_csv(&self, bins: usize) -> String {
        let n = self.eigenvalues.len() as f64;
        let mut s = String::from("bin_center,count,mass\n");
        for (c, k) in self.bin_counts(bins) {
            s.push_str(&format!("{c:.17e},{k},{:.17e}\n", k as f64 / n));
        }
        s
    }
}

/// Samples `μ_t` for `cfg`, with `tr P = (1+α)/2` and `tr Q = (1+β)/2`.
pub fn empirical_jacobi(cfg: &McConfig) -> Result<EmpiricalJacobi> {
    let us = sample_config(cfg)?;
    empirical_jacobi_from(cfg, &us)
}

pub fn empirical_jacobi_from(cfg: &McConfig, us: &[Option<CMat>]) -> Result<EmpiricalJacobi> {
    cfg.validate()?;
    let samples = per_replica(cfg, us, jacobi_spectrum)?;
    EmpiricalJacobi::from_samples(cfg.d, samples)
}

/// `(1/d) tr U^k` averaged over the available samples.
pub fn trace_moment(us: &[Option<CMat>], k: u32) -> Option<C> {
    let kept: Vec<&CMat> = us.iter().flatten().collect();
    if kept.is_empty() {
        return None;
    }
    let vals: Vec<C> = kept
        .par_iter()
        .map(|u| {
            let d = u.nrows() as f64;
            let mut p = (*u).clone();
            for _ in 1..k {
                p = p.dot(*u);
            }
            if k == 0 {
                C::new(1.0, 0.0)
            } else {
                p.diag().sum() / d
            }
        })
        .collect();
    Some(vals.iter().sum::<C>() / vals.len() as f64)
}
