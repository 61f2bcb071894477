//! Gauss–Legendre panels with pole-aware subdivision.

use num_complex::Complex64;

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss–Legendre rule on `[a, b]`.
pub fn gl8<F: FnMut(f64) -> Complex64>(a: f64, b: f64, mut f: F) -> Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        let dx = h * GL8_X[i];
        s += (f(c - dx) + f(c + dx)) * GL8_W[i];
    }
    s * h
}

/// Real-valued variant of [`gl8`].
pub fn gl8_real<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..4 {
        let dx = h * GL8_X[i];
        s += (f(c - dx) + f(c + dx)) * GL8_W[i];
    }
    s * h
}

/// Distance from the real segment `[a, b]` to the complex point `p`.
fn seg_dist(a: f64, b: f64, p: Complex64) -> f64 {
    let x = p.re.clamp(a, b);
    ((p.re - x).powi(2) + p.im * p.im).sqrt()
}

/// Integrates `f` over `[a, b]`, splitting panels until each panel is no
/// longer than its distance to the nearest of `poles` (points in the complex
/// plane where `f` is singular). `max_depth` bounds the recursion.
pub fn integrate_near_poles<F: FnMut(f64) -> Complex64>(
    a: f64,
    b: f64,
    poles: &[Complex64],
    max_depth: u32,
    f: &mut F,
) -> Complex64 {
    let d = poles
        .iter()
        .map(|&p| seg_dist(a, b, p))
        .fold(f64::INFINITY, f64::min);
    if b - a <= 0.5 * d || max_depth == 0 {
        return gl8(a, b, &mut *f);
    }
    // Split at the projection of the closest pole so that panels shrink
    // geometrically towards it.
    let near = poles
        .iter()
        .copied()
        .min_by(|p, q| seg_dist(a, b, *p).total_cmp(&seg_dist(a, b, *q)))
        .unwrap();
    let mut m = near.re.clamp(a, b);
    if (m - a).min(b - m) < 1e-3 * (b - a) {
        m = 0.5 * (a + b);
    }
    integrate_near_poles(a, m, poles, max_depth - 1, f)
        + integrate_near_poles(m, b, poles, max_depth - 1, f)
}
