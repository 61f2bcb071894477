//! Spectral distributions of `R U_t S U_t*` for two symmetries liberated by a
//! free unitary Brownian motion, and of the free Jacobi process `P U_t Q U_t* P`.
//!
//! The crate is organised bottom-up:
//!
//! * [`measures`] – probability measures on the circle and on `[0, 1]`,
//!   Herglotz transforms, atom and density recovery.
//! * [`fubm`] – the law `λ_t` of the free unitary Brownian motion.
//! * [`series`] and [`initlaws`] – truncated power series and the initial
//!   conditions `H(0, ·)` of the liberation PDE.
//! * [`liberation`] – the characteristic flow, the boundary density `κ_t`,
//!   the measure `ν_t` and its stationary limit.
//! * [`momentflow`] – an independent moment-hierarchy integrator.
//! * [`jacobi`] – the change of variables producing `μ_t` on `[0, 1]`.

pub mod error;
pub mod fubm;
pub mod initlaws;
pub mod io;
pub mod jacobi;
pub mod liberation;
pub mod measures;
pub mod momentflow;
pub mod ode;
pub mod quad;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = theta % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}
