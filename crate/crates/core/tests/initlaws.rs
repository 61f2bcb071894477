use freejacobi_core::initlaws::*;
use freejacobi_core::measures::{Atom, CircleMeasure};
use freejacobi_core::series::TransformSeries;
use freejacobi_core::{Complex64 as C, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

const N: usize = 16;

fn z_pow(k: usize) -> TransformSeries {
    TransformSeries::monomial(k, N)
}

fn same(a: &TransformSeries, b: &TransformSeries) -> bool {
    (0..=N).all(|k| (a.coeff(k) - b.coeff(k)).norm() < 1e-14)
}

/// Taylor coefficients of `(H0 − 1)/2` by the Cauchy integral on `|z| = 0.5`.
fn cauchy_moments(law: &InitialLaw, n: usize) -> Vec<f64> {
    let m = 256;
    let r: f64 = 0.5;
    let vals: Vec<(C, C)> = (0..m)
        .map(|j| {
            let z = C::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            (z, (law.h0_eval(z).unwrap() - 1.0) * 0.5)
        })
        .collect();
    (1..=n)
        .map(|k| vals.iter().map(|(z, h)| h * z.powi(-(k as i32))).sum::<C>().re / m as f64)
        .collect()
}

fn laws() -> Vec<InitialLaw> {
    let nu0 = CircleMeasure::atomic(vec![
        Atom { angle: 0.5, mass: 0.25 },
        Atom { angle: -0.5, mass: 0.25 },
        Atom { angle: 2.0, mass: 0.25 },
        Atom { angle: -2.0, mass: 0.25 },
    ])
    .unwrap();
    vec![
        InitialLaw::free(0.6, 0.2).unwrap(),
        InitialLaw::free(-0.3, 0.5).unwrap(),
        InitialLaw::classical(0.3, 0.7).unwrap(),
        InitialLaw::BooleanSymmetric,
        InitialLaw::MonotoneSymmetric,
        InitialLaw::centered(nu0),
        InitialLaw::centered_delta(),
    ]
}

#[test]
fn h0_examples() {
    for (a, b) in [(0.0, 0.0), (0.6, 0.2), (-1.0, 0.4)] {
        let h = InitialLaw::free(a, b).unwrap().h0_eval(C::new(0.0, 0.0)).unwrap();
        assert!((h - 1.0).norm() < 1e-15);
    }
    let h = InitialLaw::classical(0.0, 0.0).unwrap().h0_eval(C::new(0.0, 0.5)).unwrap();
    assert!((h - 0.6).norm() < 1e-15);
    let h = InitialLaw::BooleanSymmetric.h0_eval(C::new(0.5, 0.0)).unwrap();
    assert!((h - 9.0 / 7.0).norm() < 1e-15);
    let h = InitialLaw::MonotoneSymmetric.h0_eval(C::new(0.5, 0.0)).unwrap();
    assert!((h - 17.0 / 15.0).norm() < 1e-15);
    assert!(matches!(InitialLaw::BooleanSymmetric.h0_eval(C::new(1.0, 0.0)), Err(Error::Domain(_))));
    let m = InitialLaw::moments(0.0, 0.0, vec![0.5]).unwrap();
    assert!(m.h0_eval(C::new(0.1, 0.0)).is_err());
}

#[test]
fn free_h0_matches_square_root_formula() {
    let law = InitialLaw::free(0.6, 0.2).unwrap();
    let (a, b) = (0.2, 0.4);
    let one = C::new(1.0, 0.0);
    for z in [C::new(0.3, 0.1), C::new(-0.5, 0.4), C::new(0.0, -0.9)] {
        let sq = one + z * 4.0 * (b * b / ((one - z) * (one - z)) - a * a / ((one + z) * (one + z)));
        let h = law.h0_eval(z).unwrap();
        assert!((h * h - sq).norm() < 1e-12);
        assert!(h.re > 0.0);
    }
}

#[test]
fn boolean_convolution_examples() {
    assert!(same(&boolean_convolve_f(&z_pow(1), &z_pow(1)), &z_pow(2)));
    let one = TransformSeries::constant(1.0, N);
    let f1 = TransformSeries::from_real(&[0.3, -0.2, 0.1, 0.05]).truncate(N);
    assert!(same(&boolean_convolve_f(&f1, &one), &f1));
    assert!(same(&boolean_convolve_f(&z_pow(1), &one), &z_pow(1)));
}

#[test]
fn monotone_composition_examples() {
    assert!(same(&monotone_convolve_chi(&z_pow(2), &z_pow(2)).unwrap(), &z_pow(4)));
    let chi = TransformSeries::from_real(&[0.0, 0.5, 0.25, -0.1]).truncate(N);
    assert!(same(&monotone_convolve_chi(&chi, &z_pow(1)).unwrap(), &chi));
    assert!(same(&monotone_convolve_chi(&z_pow(1), &chi).unwrap(), &chi));
    let bad = TransformSeries::constant(0.5, N);
    assert!(monotone_convolve_chi(&chi, &bad).is_err());
}

#[test]
fn sigma_examples() {
    for z in [C::new(0.2, 0.3), C::new(-0.7, 0.0)] {
        assert!((sigma_lambda(0.0, z).unwrap() - 1.0).norm() < 1e-15);
    }
    assert!((sigma_lambda(3.0, C::new(0.0, 0.0)).unwrap() - 1.5f64.exp()).norm() < 1e-13);
    assert!((sigma_lambda(3.0, C::new(-1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
    assert!(matches!(sigma_lambda(1.0, C::new(1.0, 0.0)), Err(Error::Pole(_))));
}

#[test]
fn initial_moment_examples() {
    let m = InitialLaw::classical(0.0, 0.0).unwrap().initial_moments(12).unwrap();
    assert_eq!(m.len(), 13);
    for (k, v) in m.iter().enumerate() {
        assert!((v - if k % 2 == 0 { 1.0 } else { 0.0 }).abs() < 1e-15);
    }
    let m = InitialLaw::BooleanSymmetric.initial_moments(12).unwrap();
    for (k, v) in m.iter().enumerate() {
        assert!((v - if k % 3 == 0 { 1.0 } else { 0.0 }).abs() < 1e-13, "k={k} {v}");
    }
    let m = InitialLaw::MonotoneSymmetric.initial_moments(12).unwrap();
    for (k, v) in m.iter().enumerate() {
        assert!((v - if k % 4 == 0 { 1.0 } else { 0.0 }).abs() < 1e-13, "k={k} {v}");
    }
    let m = InitialLaw::free(0.0, 0.0).unwrap().initial_moments(12).unwrap();
    assert_eq!(m[0], 1.0);
    assert!(m[1..].iter().all(|v| v.abs() < 1e-15));
    // τ(R^n)τ(S^n) for commuting symmetries
    let m = InitialLaw::classical(0.3, 0.7).unwrap().initial_moments(6).unwrap();
    for (k, v) in m.iter().enumerate().skip(1) {
        let e = if k % 2 == 0 { 1.0 } else { 0.3 * 0.7 };
        assert!((v - e).abs() < 1e-15);
    }
    assert!(InitialLaw::BooleanSymmetric.initial_moments(65).is_err());
}

#[test]
fn moments_match_taylor_coefficients() {
    for law in laws() {
        let m = law.initial_moments(12).unwrap();
        let c = cauchy_moments(&law, 12);
        for k in 1..=12 {
            assert!((m[k] - c[k - 1]).abs() < 1e-10, "{} k={k}: {} vs {}", law.tag(), m[k], c[k - 1]);
        }
    }
}

#[test]
fn closed_form_psi_series() {
    let n = 24;
    let b = InitialLaw::BooleanSymmetric.initial_moments(n).unwrap();
    let m = InitialLaw::MonotoneSymmetric.initial_moments(n).unwrap();
    // z^p/(1 − z^p) has coefficient 1 at multiples of p.
    for k in 1..=n {
        assert_eq!(b[k].round(), if k % 3 == 0 { 1.0 } else { 0.0 });
        assert!((b[k] - b[k].round()).abs() < 1e-13);
        assert!((m[k] - if k % 4 == 0 { 1.0 } else { 0.0 }).abs() < 1e-13);
    }
}

#[test]
fn herglotz_normalization_and_positivity() {
    for law in laws() {
        assert!((law.h0_eval(C::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-12, "{}", law.tag());
        for i in 0..64 {
            let r = 0.98 * i as f64 / 64.0;
            for j in 0..64 {
                let z = C::from_polar(r, 2.0 * PI * j as f64 / 64.0);
                assert!(law.h0_eval(z).unwrap().re >= -1e-9, "{} at {z}", law.tag());
            }
        }
    }
}

#[test]
fn spec_json() {
    let l = InitialLawSpec::parse(r#"{"tag":"free","alpha":0.6,"beta":0.2}"#, 0.0, 0.0).unwrap();
    assert_eq!(l, InitialLaw::Free { alpha: 0.6, beta: 0.2 });
    let l = InitialLawSpec::parse(r#"{"tag":"moments","moments":[0.5,0.25]}"#, 0.1, 0.2).unwrap();
    assert_eq!(l.traces(), (0.1, 0.2));
    assert!(InitialLawSpec::parse(r#"{"tag":"centered"}"#, 0.2, 0.0).is_err());
    assert_eq!(InitialLawSpec::parse(r#"{"tag":"centered"}"#, 0.0, 0.0).unwrap(), InitialLaw::centered_delta());
    assert!(InitialLawSpec::parse(r#"{"tag":"moments"}"#, 0.0, 0.0).is_err());
    assert!(InitialLawSpec::parse(r#"{"tag":"free","alpha":1.5}"#, 0.0, 0.0).is_err());
    assert!(InitialLawSpec::parse("not json", 0.0, 0.0).is_err());
}

proptest! {
    #[test]
    fn psi_chi_round_trip(c in prop::collection::vec(-0.5f64..0.5, 1..N)) {
        let mut v = vec![0.0];
        v.extend(c);
        let psi = TransformSeries::from_real(&v).truncate(N);
        let back = TransformSeries::chi_to_psi(&TransformSeries::psi_to_chi(&psi).unwrap()).unwrap();
        for k in 0..=N {
            prop_assert!((back.coeff(k) - psi.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn free_law_is_positive_on_the_disc(a in -1.0f64..1.0, b in -1.0f64..1.0, r in 0.0f64..0.99, th in -PI..PI) {
        let law = InitialLaw::free(a, b).unwrap();
        let z = C::from_polar(r, th);
        prop_assert!(law.h0_eval(z).unwrap().re >= -1e-9);
    }
}
