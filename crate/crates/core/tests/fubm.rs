use freejacobi_core::fubm::{biane_h, biane_residual, fubm_density, fubm_moment, support_edge};
use freejacobi_core::measures::atom_mass;
use freejacobi_core::Error;
use std::f64::consts::PI;

/// Independent real-axis oracle: bisection on (x−1)/(x+1)·e^{x/2} − 1.
fn real_root_t1() -> f64 {
    let f = |x: f64| (x - 1.0) / (x + 1.0) * (x / 2.0).exp() - 1.0;
    let (mut lo, mut hi) = (2.0, 2.2);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if f(m) < 0.0 {
            lo = m
        } else {
            hi = m
        }
    }
    lo
}

#[test]
fn moment_examples() {
    assert_eq!(fubm_moment(3.0, 0).unwrap(), 1.0);
    for &t in &[0.1, 1.0, 5.0] {
        assert!((fubm_moment(t, 1).unwrap() - (-t / 2.0).exp()).abs() < 1e-15);
    }
    // k = 2, t = 1: e^{-1}(1 − 1) = 0
    assert!(fubm_moment(1.0, 2).unwrap().abs() < 1e-16);
}

#[test]
fn moment_two_closed_form() {
    // τ(U_t²) = e^{−t}(1 − t)
    for &t in &[0.25, 0.5, 2.0, 3.0] {
        let v = fubm_moment(t, 2).unwrap();
        assert!((v - (-t).exp() * (1.0 - t)).abs() < 1e-15);
    }
}

#[test]
fn support_edge_examples() {
    assert_eq!(support_edge(0.0).unwrap(), 0.0);
    assert!((support_edge(4.0).unwrap() - PI).abs() < 1e-15);
    assert!((support_edge(2.0).unwrap() - (1.0 + PI / 2.0)).abs() < 1e-14);
    assert!((support_edge(1.0).unwrap() - 1.913222954981).abs() < 1e-9);
    let mut prev = 0.0;
    for i in 1..=40 {
        let g = support_edge(0.1 * i as f64).unwrap();
        assert!(g > prev);
        prev = g;
    }
}

#[test]
fn biane_examples() {
    let z = biane_h(1.0, 0.0).unwrap();
    assert!((z.re - real_root_t1()).abs() < 1e-12);
    assert!(z.im.abs() < 1e-14);

    let z = biane_h(50.0, PI / 2.0).unwrap();
    assert!((z.re - 1.0).abs() < 1e-2, "{z}");

    let g = support_edge(1.0).unwrap();
    let mut last = f64::INFINITY;
    for &eps in &[1e-2, 1e-4, 1e-6, 1e-8] {
        let z = biane_h(1.0, g - eps).unwrap();
        assert!(z.re < last);
        last = z.re;
    }
    assert!(last < 1e-3);
    assert!(matches!(biane_h(1.0, g + 1e-6), Err(Error::NoSolution { .. })));
}

#[test]
fn biane_residual_and_symmetry() {
    for &t in &[0.3, 1.0, 3.9, 4.0, 4.1, 8.0] {
        let g = support_edge(t).unwrap();
        for i in 0..25 {
            let th = -g + (2.0 * g) * (i as f64 + 0.5) / 25.0;
            let z = biane_h(t, th).unwrap();
            let zm = biane_h(t, -th).unwrap();
            assert!(z.re > 0.0);
            assert!(biane_residual(t, th, z) < 1e-12);
            assert!((z - zm.conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn density_moments_and_mass() {
    for &t in &[0.25, 1.0, 2.0, 3.9, 4.0, 4.1, 8.0] {
        let m = fubm_density(t, 4096).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-6, "t={t} mass {}", m.total_mass());
        for k in 0..=10u32 {
            let q = m.circle_moment(k as i64);
            let e = fubm_moment(t, k).unwrap();
            assert!((q.re - e).abs() < 1e-6, "t={t} k={k}: {} vs {e}", q.re);
            assert!(q.im.abs() < 1e-8);
        }
    }
}

#[test]
fn density_examples() {
    let m = fubm_density(1.0, 2048).unwrap();
    assert_eq!(m.density_at(3.0), 0.0);
    let m2 = fubm_density(2.0, 2048).unwrap();
    assert!((m2.circle_moment(1).re - (-1f64).exp()).abs() < 1e-6);
    for &t in &[0.5, 1.0, 2.0] {
        let m = fubm_density(t, 2048).unwrap();
        let g = support_edge(t).unwrap();
        assert!(m.density_at(g) < 1e-3 && m.density_at(-g) < 1e-3);
    }
}

#[test]
fn large_time_flattening() {
    let m = fubm_density(50.0, 1024).unwrap();
    let sup = m.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    assert!(sup < 0.01);
}

#[test]
fn no_atoms_in_fubm_law() {
    let m = fubm_density(1.0, 2048).unwrap();
    let e = atom_mass(&m, 0.0).unwrap();
    assert!(e.mass < 1e-4, "{e:?}");
}
