use freejacobi_core::fubm::fubm_moment;
use freejacobi_core::initlaws::InitialLaw;
use freejacobi_core::measures::CircleMeasure;
use freejacobi_core::momentflow::evolve_moments;
use freejacobi_core::Complex64 as C;
use freejacobi_rmt::empirical::{at_checkpoint, trace_moment, Paths, DEFAULT_BINS};
use freejacobi_rmt::unitary::{gue, polar_unitary};
use freejacobi_rmt::*;
use ndarray_linalg::{Eigh, UPLO};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

const D: usize = 300;
const REPLICAS: usize = 20;
const SEED: u64 = 11;

/// Twenty paths on U(300) with δ = 0.01, observed at t = 0.5 and t = 1.
fn ensemble() -> &'static Paths {
    static P: OnceLock<Paths> = OnceLock::new();
    P.get_or_init(|| sample_paths(D, 0.01, &[50, 100], REPLICAS, SEED).unwrap())
}

fn cfg(t: f64, a: f64, b: f64, s: Structure) -> McConfig {
    McConfig::new(D, REPLICAS, SEED, t, a, b).with_structure(s)
}

fn at(t: f64) -> Vec<Option<CMat>> {
    at_checkpoint(ensemble(), if t == 0.5 { 0 } else { 1 })
}

fn analytic_moment(law: &InitialLaw, a: f64, b: f64, t: f64, k: usize) -> f64 {
    evolve_moments(&law.initial_moments(4).unwrap(), a, b, t, 4).unwrap().m[k - 1]
}

#[test]
fn zero_time_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = sample_unitary_bm(5, 0.0, 0, &mut rng).unwrap();
    assert_eq!(u, CMat::eye(5));
    assert!(sample_unitary_bm(5, 1.0, 0, &mut rng).is_err());
    assert!(sample_unitary_bm(1, 1.0, 100, &mut rng).is_err());
}

fn residual(a: &CMat, v: &CMat, lam: &ndarray::Array1<f64>) -> f64 {
    let mut vl = v.clone();
    for (mut col, l) in vl.columns_mut().into_iter().zip(lam.iter()) {
        col.mapv_inplace(|z| z * *l);
    }
    (&a.dot(v) - &vl).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn exponential_matches_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for scale in [0.05, 1.0, 7.0] {
        let a = gue(40, &mut rng).mapv(|z| z * scale);
        let (lam, v) = a.eigh(UPLO::Lower).unwrap();
        // eigenvectors of a row-major input come back conjugated
        let v = if residual(&a, &v, &lam) < 1e-12 { v } else { v.mapv(|z| z.conj()) };
        assert!(residual(&a, &v, &lam) < 1e-12);
        let mut ve = v.clone();
        for (mut col, l) in ve.columns_mut().into_iter().zip(lam.iter()) {
            col.mapv_inplace(|z| z * C::from_polar(1.0, *l));
        }
        let exact = ve.dot(&v.t().mapv(|z| z.conj()));
        let err = (&exp_i_hermitian(&a) - &exact).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "scale {scale}: {err}");
    }
}

#[test]
fn paths_stay_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for steps in [10, 64, 130] {
        let u = sample_unitary_bm(30, 2.0, steps, &mut rng).unwrap();
        assert!(unitarity_defect(&u) < 1e-12, "{steps}: {}", unitarity_defect(&u));
    }
    for p in ensemble().iter().flatten() {
        for u in p {
            assert!(unitarity_defect(u) < 1e-10);
        }
    }
    let m = CMat::eye(3).mapv(|z| z * 2.0);
    assert!(unitarity_defect(&polar_unitary(&m).unwrap()) < 1e-14);
}

#[test]
fn trace_calibration() {
    let u1 = at(1.0);
    let m1 = trace_moment(&u1, 1).unwrap();
    let m2 = trace_moment(&u1, 2).unwrap();
    assert!((m1 - fubm_moment(1.0, 1).unwrap()).norm() < 0.02, "{m1}");
    assert!((m1.re - (-0.5f64).exp()).abs() < 0.02);
    assert!((m2 - fubm_moment(1.0, 2).unwrap()).norm() < 0.02, "{m2}");
    let m = trace_moment(&at(0.5), 1).unwrap();
    assert!((m.re - (-0.25f64).exp()).abs() < 0.02, "{m}");
}

#[test]
fn symmetry_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = make_symmetry_pair(50, 1.0, 0.0, Structure::CommutingClassical, &mut rng).unwrap();
    assert_eq!(p.r_matrix(), CMat::eye(50));
    let p = make_symmetry_pair(50, 1.0, 0.4, Structure::FreePair, &mut rng).unwrap();
    assert_eq!(p.r_matrix(), CMat::eye(50));
    assert!((p.s.iter().sum::<f64>() / 50.0 - 0.4).abs() < 1e-15);
    assert!(unitarity_defect(p.w.as_ref().unwrap()) < 1e-12);
    assert!(make_symmetry_pair(10, 1.5, 0.0, Structure::FreePair, &mut rng).is_err());

    // P(rs = 1) = (1 + αβ)/2 for independent signs.
    let (a, b) = (0.6, 0.2);
    let mut agree = 0.0;
    let reps = 20;
    for _ in 0..reps {
        let p = make_symmetry_pair(1000, a, b, Structure::CommutingClassical, &mut rng).unwrap();
        agree += p.r.iter().zip(&p.s).filter(|(r, s)| **r * **s > 0.0).count() as f64;
    }
    let frac = agree / (1000.0 * reps as f64);
    assert!((frac - (1.0 + a * b) / 2.0).abs() < 0.01, "{frac}");
}

#[test]
fn free_pair_at_time_zero_is_uniform() {
    let c = McConfig::new(D, REPLICAS, 5, 0.0, 0.0, 0.0);
    let us = vec![Some(CMat::eye(D)); REPLICAS];
    let nu = empirical_nu_from(&c, &us).unwrap();
    let h = nu.histogram(DEFAULT_BINS).unwrap();
    let dist = h.density_sup_distance(&CircleMeasure::uniform(512));
    assert!(dist < 0.05, "{dist}");
}

#[test]
fn free_pair_histogram_matches_uniform_law() {
    let nu = empirical_nu_from(&cfg(1.0, 0.0, 0.0, Structure::FreePair), &at(1.0)).unwrap();
    assert_eq!(nu.replicas_used, REPLICAS);
    assert_eq!(nu.replicas_skipped, 0);
    let h = nu.histogram(DEFAULT_BINS).unwrap();
    assert!((h.total_mass() - 1.0).abs() < 1e-12);
    let dist = h.density_sup_distance(&CircleMeasure::uniform(512));
    assert!(dist < 0.05, "{dist}");
    let csv = nu.histogram_csv(DEFAULT_BINS);
    assert!(csv.starts_with("bin_center,count,mass\n"));
    assert_eq!(csv.lines().count(), DEFAULT_BINS + 1);
}

#[test]
fn atoms_of_nu() {
    let nu = empirical_nu_from(&cfg(1.0, 0.6, 0.2, Structure::FreePair), &at(1.0)).unwrap();
    assert!((nu.atom_pi - 0.2).abs() < 0.05, "{}", nu.atom_pi);
    assert!((nu.atom_zero - 0.4).abs() < 0.05, "{}", nu.atom_zero);
}

#[test]
fn moment_agreement() {
    for (t, a, b) in [(0.5, 0.0, 0.0), (1.0, 0.6, 0.2)] {
        for s in [Structure::FreePair, Structure::CommutingClassical] {
            let law = match s {
                Structure::FreePair => InitialLaw::free(a, b).unwrap(),
                Structure::CommutingClassical => InitialLaw::classical(a, b).unwrap(),
            };
            let nu = empirical_nu_from(&cfg(t, a, b, s), &at(t)).unwrap();
            for k in 1..=4 {
                let exact = analytic_moment(&law, a, b, t, k);
                let err = (nu.moment(k) - exact).norm();
                let allow = 3.0 * (nu.moment_stderr(k) + 0.02);
                assert!(err < allow, "{s:?} t={t} k={k}: {} vs {exact}", nu.moment(k));
            }
        }
    }
    // second moment of the classical centred case follows λ_{2t} pushed by z²
    let nu = empirical_nu_from(&cfg(0.5, 0.0, 0.0, Structure::CommutingClassical), &at(0.5)).unwrap();
    assert!((nu.moment(2).re - fubm_moment(2.0, 1).unwrap()).abs() < 0.03);
}

#[test]
fn jacobi_atoms() {
    let c = McConfig::from_traces(D, REPLICAS, SEED, 1.0, 0.8, 0.6);
    let mu = empirical_jacobi_from(&c, &at(1.0)).unwrap();
    assert!((mu.atom_zero - 0.4).abs() < 0.05, "{}", mu.atom_zero);
    assert!((mu.atom_one - 0.4).abs() < 0.05, "{}", mu.atom_one);
    assert!(mu.eigenvalues.iter().all(|&x| (0.0..=1.0).contains(&x)));
    assert_eq!(mu.eigenvalues.len(), D * REPLICAS);
    // first moment is τ(PQ) = trP·trQ for a free pair
    assert!((mu.moment(1) - 0.48).abs() < 0.02);
}

#[test]
fn jacobi_equal_projections_at_time_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = make_symmetry_pair(40, 0.3, 0.0, Structure::CommutingClassical, &mut rng).unwrap();
    let same = SymmetryPair { r: p.r.clone(), s: p.r.clone(), w: None };
    let ev = jacobi_spectrum(&same, &CMat::eye(40)).unwrap();
    let k = p.r.iter().filter(|&&r| r > 0.0).count();
    assert_eq!(ev.len(), 40);
    assert!(ev[..40 - k].iter().all(|&x| x == 0.0));
    assert!(ev[40 - k..].iter().all(|&x| (x - 1.0).abs() < 1e-12));
}

#[test]
fn jacobi_long_time_arcsine() {
    let c = McConfig::from_traces(D, 1, 8, 20.0, 0.5, 0.5);
    assert_eq!(c.steps, 2000);
    let mu = empirical_jacobi(&c).unwrap();
    let ks = mu.kolmogorov_distance(|x| if x < 0.0 { 0.0 } else { 0.5 + x.min(1.0).sqrt().asin() / std::f64::consts::PI });
    assert!(ks < 0.05, "{ks}");
}

#[test]
fn fixed_seed_is_reproducible() {
    let c = McConfig::new(24, 3, 99, 0.3, 0.2, -0.4);
    let a = empirical_nu(&c).unwrap();
    let b = empirical_nu(&c).unwrap();
    assert_eq!(a.angles, b.angles);
    assert_eq!(a.histogram_csv(16), b.histogram_csv(16));
    let j1 = empirical_jacobi(&c.clone().with_structure(Structure::CommutingClassical)).unwrap();
    let j2 = empirical_jacobi(&c.with_structure(Structure::CommutingClassical)).unwrap();
    assert_eq!(j1.eigenvalues, j2.eigenvalues);
}

#[test]
fn seed_change_keeps_statistics() {
    let m: Vec<EmpiricalNu> = [21u64, 22]
        .iter()
        .map(|&s| empirical_nu(&McConfig::new(60, 8, s, 0.5, 0.0, 0.0)).unwrap())
        .collect();
    for k in 1..=4 {
        let err = (m[0].moment(k) - m[1].moment(k)).norm();
        let se = (m[0].moment_stderr(k).powi(2) + m[1].moment_stderr(k).powi(2)).sqrt();
        assert!(err < 4.0 * se + 0.02, "k={k}: {err}");
    }
    assert!(m[0].angles != m[1].angles);
}

#[test]
fn config_validation() {
    assert!(McConfig::new(300, 20, 0, 1.0, 0.0, 0.0).validate().is_ok());
    let mut c = McConfig::new(300, 20, 0, 1.0, 0.0, 0.0);
    c.steps = 99;
    assert!(c.validate().is_err());
    assert!(McConfig::new(1, 20, 0, 1.0, 0.0, 0.0).validate().is_err());
    assert!(McConfig::new(10, 0, 0, 1.0, 0.0, 0.0).validate().is_err());
    assert!(McConfig::new(10, 1, 0, 1.0, 1.2, 0.0).validate().is_err());
    let j = serde_json::to_string(&McConfig::new(10, 1, 0, 1.0, 0.0, 0.0)).unwrap();
    assert!(j.contains("\"structure\":\"FreePair\""));
    let back: McConfig = serde_json::from_str(&j).unwrap();
    assert_eq!(back.d, 10);
}
