use freejacobi_core::fubm::fubm_moment;
use freejacobi_core::initlaws::InitialLaw;
use freejacobi_core::liberation::{stationary_measure, LiberationParams};
use freejacobi_core::momentflow::*;
use freejacobi_core::{Complex64 as C, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Taylor coefficients by the Cauchy integral on `|z| = 1/2`.
fn cauchy_coefficients<F: Fn(C) -> C>(f: F, n: usize) -> Vec<f64> {
    let m = 512;
    let r: f64 = 0.5;
    (0..=n)
        .map(|k| {
            let mut s = C::new(0.0, 0.0);
            for j in 0..m {
                let z = C::from_polar(r, 2.0 * PI * j as f64 / m as f64);
                s += f(z) * z.powi(-(k as i32));
            }
            s.re / m as f64
        })
        .collect()
}

#[test]
fn rhs_examples() {
    assert!(rhs_series(0.0, 0.0, 20).unwrap().iter().all(|&x| x == 0.0));
    // (1+z)/(1-z)^3 = sum (n+1)^2 z^n
    let r = rhs_series(1.0, 1.0, 12).unwrap();
    assert_eq!(r[1], 2.0);
    for (k, v) in r.iter().enumerate().skip(1) {
        assert_eq!(*v, 2.0 * (k * k) as f64);
    }
    for (a, b) in [(0.6, 0.2), (-0.3, 0.9), (0.5, -0.5)] {
        let r = rhs_series(a, b, 16).unwrap();
        assert!((r[1] - 2.0 * a * b).abs() < 1e-15);
        let one = C::new(1.0, 0.0);
        let c = cauchy_coefficients(
            |z| z * 2.0 * (z * z * a + z * 2.0 * b + a) * (z * z * b + z * 2.0 * a + b) / (one - z * z).powi(3),
            16,
        );
        for k in 0..=16 {
            assert!((r[k] - c[k]).abs() < 1e-10, "k={k}: {} vs {}", r[k], c[k]);
        }
    }
    assert!(rhs_series(0.1, 0.1, 65).is_err());
}

#[test]
fn delta_init_follows_fubm_moments() {
    let init = vec![1.0; 12];
    for t in [0.25, 1.0, 2.0] {
        let s = evolve_moments(&init, 0.0, 0.0, t, 12).unwrap();
        for k in 1..=12 {
            let exact = fubm_moment(2.0 * t, k as u32).unwrap();
            assert!((s.m[k - 1] - exact).abs() < 1e-8, "t={t} k={k}");
        }
    }
}

#[test]
fn free_law_is_stationary() {
    for (a, b) in [(0.6, 0.2), (0.3, 0.3), (-0.4, 0.7)] {
        let init = InitialLaw::free(a, b).unwrap().initial_moments(10).unwrap();
        let s = evolve_moments(&init, a, b, 3.0, 10).unwrap();
        let m0 = &init[init.len() - 10..];
        for k in 0..10 {
            assert!((s.m[k] - m0[k]).abs() < 1e-9, "({a},{b}) k={}", k + 1);
        }
    }
}

#[test]
fn first_moment_decays_exponentially() {
    let init = [0.7, 0.2, -0.1, 0.05];
    for t in [0.1, 1.0, 5.0] {
        let s = evolve_moments(&init, 0.0, 0.0, t, 4).unwrap();
        assert!((s.m[0] - 0.7 * (-t).exp()).abs() < 1e-12);
    }
    // m_1' = -m_1 + αβ in general
    let s = evolve_moments(&init, 0.6, 0.2, 2.0, 4).unwrap();
    let exact = 0.12 + (0.7 - 0.12) * (-2.0f64).exp();
    assert!((s.m[0] - exact).abs() < 1e-12);
}

#[test]
fn zero_time_returns_init() {
    let s = evolve_moments(&[1.0, 0.5, 0.25, 0.1], 0.2, 0.1, 0.0, 3).unwrap();
    assert_eq!(s.m, vec![0.5, 0.25, 0.1]);
    assert_eq!(s.t, 0.0);
    assert!(s.to_csv().starts_with("k,m_k\n1,"));
    assert_eq!(s.to_csv().lines().count(), 4);
}

#[test]
fn power_push_forward_moments() {
    // p-th powers of ν_t carry the moments of λ_{2pt}.
    let t = 0.3;
    for (law, p) in [
        (InitialLaw::classical(0.0, 0.0).unwrap(), 2usize),
        (InitialLaw::BooleanSymmetric, 3),
        (InitialLaw::MonotoneSymmetric, 4),
    ] {
        let n = 24;
        let init = law.initial_moments(n).unwrap();
        let s = evolve_moments(&init, 0.0, 0.0, t, n).unwrap();
        for k in 1..=n {
            let expect = if k % p == 0 { fubm_moment(2.0 * p as f64 * t, (k / p) as u32).unwrap() } else { 0.0 };
            assert!((s.m[k - 1] - expect).abs() < 1e-8, "{} k={k}: {} vs {expect}", law.tag(), s.m[k - 1]);
        }
    }
}

#[test]
fn odd_moments_stay_zero_for_classical_centered() {
    let init = InitialLaw::classical(0.0, 0.0).unwrap().initial_moments(15).unwrap();
    for t in [0.5, 2.0, 6.0] {
        let s = evolve_moments(&init, 0.0, 0.0, t, 15).unwrap();
        for k in (1..=15).step_by(2) {
            assert!(s.m[k - 1].abs() < 1e-15);
        }
    }
}

#[test]
fn contraction_to_stationarity() {
    let p = LiberationParams::new(0.6, 0.2).unwrap();
    let m_inf = stationary_measure(&p, 32768).unwrap().circle_moment(1).re;
    assert!((m_inf - 0.12).abs() < 1e-8);
    let init = InitialLaw::moments(0.6, 0.2, vec![0.9, 0.8, 0.7, 0.6, 0.5, 0.4]).unwrap().initial_moments(6).unwrap();
    let mut last = f64::INFINITY;
    for i in 0..=16 {
        let t = 0.25 * i as f64;
        let s = evolve_moments(&init, 0.6, 0.2, t, 6).unwrap();
        let d = (s.m[0] - m_inf).abs();
        assert!(d < last, "t={t}");
        last = d;
    }
}

#[test]
fn invalid_init_is_an_instability() {
    assert!(matches!(evolve_moments(&[1.5, 0.0], 0.0, 0.0, 1.0, 2), Err(Error::Instability { k: 1, .. })));
    assert!(evolve_moments(&[0.5], 0.0, 0.0, 1.0, 2).is_err());
    assert!(evolve_moments(&[0.5], 0.0, 0.0, -1.0, 1).is_err());
}

#[test]
fn crosscheck_examples() {
    let free = InitialLaw::free(0.6, 0.2).unwrap();
    let p = LiberationParams::new(0.6, 0.2).unwrap();
    for t in [0.5, 3.0] {
        let e = crosscheck(t, &free, &p, 8).unwrap();
        assert!(e < 1e-6, "free t={t}: {e}");
    }
    let p0 = LiberationParams::new(0.0, 0.0).unwrap();
    let e = crosscheck(1.0, &InitialLaw::classical(0.0, 0.0).unwrap(), &p0, 8).unwrap();
    assert!(e < 1e-5, "classical: {e}");
    let e = crosscheck(1e-3, &InitialLaw::BooleanSymmetric, &p0, 8).unwrap();
    assert!(e < 1e-4, "boolean: {e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn truncation_does_not_change_lower_moments(a in -1.0f64..1.0, b in -1.0f64..1.0, t in 0.0f64..2.0) {
        let init = InitialLaw::classical(a, b).unwrap().initial_moments(32).unwrap();
        let s16 = evolve_moments(&init[..=16], a, b, t, 16).unwrap();
        let s32 = evolve_moments(&init, a, b, t, 32).unwrap();
        for k in 0..16 {
            prop_assert!((s16.m[k] - s32.m[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_stay_bounded(a in -1.0f64..1.0, b in -1.0f64..1.0, t in 0.0f64..3.0) {
        let init = InitialLaw::classical(a, b).unwrap().initial_moments(8).unwrap();
        let s = evolve_moments(&init, a, b, t, 8).unwrap();
        prop_assert!(s.m.iter().all(|m| m.abs() <= 1.0 + 1e-9));
    }
}
