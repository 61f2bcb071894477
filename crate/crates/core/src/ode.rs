//! Dormand–Prince 5(4) for small complex systems, and a classical RK4 step.

use num_complex::Complex64;

type C = Complex64;

const NODE2: f64 = 1.0 / 5.0;
const NODE3: f64 = 3.0 / 10.0;
const NODE4: f64 = 4.0 / 5.0;
const NODE5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-14,
            max_steps: 200_000,
        }
    }
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<const N: usize> {
    /// Reached the final time.
    Reached([C; N]),
    /// The event function crossed zero at time `s`.
    Event { s: f64, y: [C; N] },
    /// The right-hand side failed or the step size underflowed at time `s`.
    Singular { s: f64, y: [C; N] },
}

fn axpy<const N: usize>(y: &[C; N], h: f64, terms: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += k[i] * (h * c);
            }
        }
    }
    out
}

struct Step<const N: usize> {
    y: [C; N],
    k7: [C; N],
    err: f64,
}

fn dp_step<const N: usize, F>(f: &mut F, s: f64, y: &[C; N], k1: &[C; N], h: f64, tol: &Tolerances) -> Option<Step<N>>
where
    F: FnMut(f64, &[C; N]) -> Option<[C; N]>,
{
    let k2 = f(s + NODE2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(s + NODE3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(s + NODE4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(s + NODE5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(
        s + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    )?;
    let y1 = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(s + h, &y1)?;
    let mut acc = 0.0;
    for i in 0..N {
        let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        let sc = tol.atol + tol.rtol * y[i].norm().max(y1[i].norm());
        acc += (e.norm() / sc).powi(2);
    }
    let err = (acc / N as f64).sqrt();
    if !err.is_finite() || y1.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    Some(Step { y: y1, k7, err })
}

/// Integrates `y' = f(s, y)` from `s = 0` to `s = t_end`.
///
/// `event` (if given) must be negative at the initial state; integration
/// stops at the first zero crossing, located to about `1e-14` in time.
/// `observe` is called on every accepted state, including the initial one.
pub fn dopri5<const N: usize, F, G, O>(
    mut f: F,
    y0: [C; N],
    t_end: f64,
    tol: &Tolerances,
    mut event: Option<G>,
    mut observe: O,
) -> Outcome<N>
where
    F: FnMut(f64, &[C; N]) -> Option<[C; N]>,
    G: FnMut(&[C; N]) -> f64,
    O: FnMut(f64, &[C; N]),
{
    let mut s = 0.0;
    let mut y = y0;
    observe(s, &y);
    if t_end <= 0.0 {
        return Outcome::Reached(y);
    }
    let mut k1 = match f(s, &y) {
        Some(k) => k,
        None => return Outcome::Singular { s, y },
    };
    let scale = k1.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut h = (0.01 / scale.max(1e-3)).min(t_end).min(0.05);
    let mut g_prev = event.as_mut().map(|g| g(&y));
    for _ in 0..tol.max_steps {
        let last = s + h >= t_end;
        let hh = if last { t_end - s } else { h };
        match dp_step(&mut f, s, &y, &k1, hh, tol) {
            Some(step) if step.err <= 1.0 => {
                if let (Some(g), Some(gp)) = (event.as_mut(), g_prev) {
                    let g1 = g(&step.y);
                    if g1 >= 0.0 && gp < 0.0 {
                        return locate_event(&mut f, g, s, &y, &k1, hh, gp, g1, tol);
                    }
                    g_prev = Some(g1);
                }
                s = if last { t_end } else { s + hh };
                y = step.y;
                k1 = step.k7;
                observe(s, &y);
                if last {
                    return Outcome::Reached(y);
                }
                let fac = if step.err == 0.0 { 5.0 } else { (0.9 * step.err.powf(-0.2)).clamp(0.2, 5.0) };
                h = hh * fac;
            }
            Some(step) => {
                h = hh * (0.9 * step.err.powf(-0.2)).clamp(0.1, 0.9);
            }
            None => {
                h = hh * 0.25;
            }
        }
        if h < tol.h_min {
            return Outcome::Singular { s, y };
        }
    }
    Outcome::Singular { s, y }
}

#[allow(clippy::too_many_arguments)]
fn locate_event<const N: usize, F, G>(
    f: &mut F,
    g: &mut G,
    s: f64,
    y: &[C; N],
    k1: &[C; N],
    h: f64,
    g0: f64,
    g1: f64,
    tol: &Tolerances,
) -> Outcome<N>
where
    F: FnMut(f64, &[C; N]) -> Option<[C; N]>,
    G: FnMut(&[C; N]) -> f64,
{
    // Illinois regula falsi over the step length.
    let (mut lo, mut hi) = (0.0, h);
    let (mut glo, mut ghi) = (g0, g1);
    let mut side = 0i32;
    let mut best = None;
    for _ in 0..100 {
        if hi - lo <= 1e-15 * (1.0 + s) {
            break;
        }
        let mut m = lo - glo * (hi - lo) / (ghi - glo);
        if !(m > lo && m < hi) {
            m = 0.5 * (lo + hi);
        }
        let st = match dp_step(f, s, y, k1, m, tol) {
            Some(st) => st,
            None => return Outcome::Singular { s, y: *y },
        };
        let gm = g(&st.y);
        if gm >= 0.0 {
            hi = m;
            ghi = gm;
            best = Some(st.y);
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        } else {
            lo = m;
            glo = gm;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        }
        if gm.abs() < 1e-15 {
            best = Some(st.y);
            hi = m;
            break;
        }
    }
    let y_hi = match best {
        Some(v) => v,
        None => match dp_step(f, s, y, k1, hi, tol) {
            Some(st) => st.y,
            None => return Outcome::Singular { s, y: *y },
        },
    };
    Outcome::Event { s: s + hi, y: y_hi }
}

/// One classical fourth-order Runge–Kutta step for a real system.
pub fn rk4_step<F>(f: &mut F, s: f64, y: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let n = y.len();
    let k1 = f(s, y);
    let tmp: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k1[i]).collect();
    let k2 = f(s + 0.5 * h, &tmp);
    let tmp: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k2[i]).collect();
    let k3 = f(s + 0.5 * h, &tmp);
    let tmp: Vec<f64> = (0..n).map(|i| y[i] + h * k3[i]).collect();
    let k4 = f(s + h, &tmp);
    (0..n)
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let lam = C::new(0.3, 2.0);
        let out = dopri5(
            |_, y: &[C; 1]| Some([lam * y[0]]),
            [C::new(1.0, 0.0)],
            3.0,
            &Tolerances::default(),
            None::<fn(&[C; 1]) -> f64>,
            |_, _| {},
        );
        match out {
            Outcome::Reached(y) => assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-8),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn event_time_located() {
        // y' = 1, event y = 0.7.
        let out = dopri5(
            |_, _y: &[C; 1]| Some([C::new(1.0, 0.0)]),
            [C::new(0.0, 0.0)],
            2.0,
            &Tolerances::default(),
            Some(|y: &[C; 1]| y[0].re - 0.7),
            |_, _| {},
        );
        match out {
            Outcome::Event { s, .. } => assert!((s - 0.7).abs() < 1e-12, "{s}"),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn rk4_matches_exponential() {
        let mut y = vec![1.0];
        let mut f = |_: f64, y: &[f64]| vec![-y[0]];
        for i in 0..1000 {
            y = rk4_step(&mut f, i as f64 * 1e-3, &y, 1e-3);
        }
        assert!((y[0] - (-1f64).exp()).abs() < 1e-12);
    }
}
