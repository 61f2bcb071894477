//! Exit charts: where characteristics started on rays from 0 leave the disc.

use super::flow::{k0_eval, Flow};
use super::params::LiberationParams;
use crate::error::{Error, Result};
use crate::initlaws::InitialLaw;
use crate::wrap_angle;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

/// Start radii of the sampled chart rows on each ray.
pub const CHART_RADII: [f64; 12] = [0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995, 0.999, 1.0];

/// One start point of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartRow {
    pub z0: C,
    pub k0: C,
    pub exit_time: Option<f64>,
    pub exit_angle: Option<f64>,
}

/// The point `R_t(φ) e^{iφ}` of a ray whose characteristic reaches the circle
/// exactly at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayEntry {
    pub ray_angle: f64,
    /// `R_t(φ)`; equal to 1 when the ray lies outside `I_t`.
    pub radius: f64,
    pub z0: C,
    pub exit_angle: f64,
    /// `R_t(φ) < 1`.
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitChart {
    pub t: f64,
    pub rays: Vec<f64>,
    /// `rows[i]` holds the samples of ray `i` at [`CHART_RADII`].
    pub rows: Vec<Vec<ChartRow>>,
    pub entries: Vec<RayEntry>,
}

/// `Re log w(t)` for a start at `e^{ρ + iφ}`, with `+1` standing in for a
/// characteristic stopped at a pole of `V` (it has reached the circle).
fn exit_residual(flow: &Flow, rho: f64, phi: f64, t: f64) -> Result<(f64, f64, f64)> {
    let z0 = C::from_polar(rho.exp(), phi);
    match flow.propagate(z0, t) {
        Ok(pr) => Ok((pr.u.re, (pr.du * z0).re, pr.u.im)),
        Err(Error::SingularApproach { .. }) => Ok((1.0, f64::NAN, f64::NAN)),
        Err(e) => Err(e),
    }
}

/// Locates `R_t(φ)` by a safeguarded Newton iteration on `ρ = log r`.
pub fn ray_entry(flow: &Flow, phi: f64, t: f64) -> Result<RayEntry> {
    let rho_hi = (-1e-10f64).ln_1p();
    let (f_hi, _, ang_hi) = exit_residual(flow, rho_hi, phi, t)?;
    if f_hi < 0.0 {
        return Ok(RayEntry {
            ray_angle: phi,
            radius: 1.0,
            z0: C::from_polar(1.0, phi),
            exit_angle: wrap_angle(ang_hi),
            interior: false,
        });
    }
    let mut lo = -(2.0 * t + 2.0);
    let mut f_lo = exit_residual(flow, lo, phi, t)?.0;
    let mut tries = 0;
    while f_lo >= 0.0 {
        lo *= 2.0;
        f_lo = exit_residual(flow, lo, phi, t)?.0;
        tries += 1;
        if tries > 8 {
            return Err(Error::Numeric(format!("cannot bracket the exit radius on ray {phi}")));
        }
    }
    let mut hi = rho_hi;
    let mut x = 0.5 * (lo + hi);
    let mut ang = 0.0;
    for _ in 0..200 {
        let (f, df, a) = exit_residual(flow, x, phi, t)?;
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        ang = a;
        if f.abs() < 1e-13 || hi - lo < 1e-14 {
            break;
        }
        let newton = x - f / df;
        x = if df.is_finite() && df > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    let r = x.exp();
    if !ang.is_finite() {
        let (_, _, a) = exit_residual(flow, lo, phi, t)?;
        ang = a;
    }
    Ok(RayEntry { ray_angle: phi, radius: r, z0: C::from_polar(r, phi), exit_angle: wrap_angle(ang), interior: true })
}

/// Ray angles `π(2k+1)/n − π`, symmetric under `φ ↦ −φ`.
pub fn fan_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * (2.0 * k as f64 + 1.0) / n as f64 - PI).collect()
}

/// Builds the exit chart for a fan of `fan_size` rays: sampled rows with
/// exit data up to time `t`, and the entry point `R_t(φ)e^{iφ}` of each ray.
pub fn exit_chart(t: f64, law: &InitialLaw, p: &LiberationParams, fan_size: usize) -> Result<ExitChart> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} is negative")));
    }
    let flow = Flow::new(law, p)?;
    let rays = fan_angles(fan_size.max(2));
    let per_ray: Vec<Result<(Vec<ChartRow>, Option<RayEntry>)>> = rays
        .par_iter()
        .map(|&phi| {
            let mut rows = Vec::with_capacity(CHART_RADII.len());
            for &r in &CHART_RADII {
                let z0 = C::from_polar(r, phi);
                if r >= 1.0 {
                    rows.push(ChartRow { z0, k0: C::new(f64::NAN, f64::NAN), exit_time: Some(0.0), exit_angle: Some(phi) });
                    continue;
                }
                let k0 = k0_eval(law, p, z0).unwrap_or(C::new(f64::NAN, f64::NAN));
                let ex = flow.exit(z0, t)?;
                rows.push(ChartRow { z0, k0, exit_time: ex.map(|e| e.0), exit_angle: ex.map(|e| e.1) });
            }
            // Exit times must not increase with the start radius.
            let mut prev = f64::INFINITY;
            for row in &rows {
                let e = row.exit_time.unwrap_or(f64::INFINITY);
                if e > prev + 1e-8 {
                    return Err(Error::ChartFold { angle: phi });
                }
                prev = e;
            }
            let entry = if t > 0.0 { Some(ray_entry(&flow, phi, t)?) } else { None };
            Ok((rows, entry))
        })
        .collect();
    let mut rows = Vec::with_capacity(rays.len());
    let mut entries = Vec::with_capacity(rays.len());
    for r in per_ray {
        let (rw, en) = r?;
        rows.push(rw);
        if let Some(e) = en {
            entries.push(e);
        }
    }
    Ok(ExitChart { t, rays, rows, entries })
}

impl ExitChart {
    /// CSV dump `z0_re,z0_im,K0_re,K0_im,exit_time,exit_angle` of all rows;
    /// unset exits are left empty.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z0_re,z0_im,K0_re,K0_im,exit_time,exit_angle\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        for ray in &self.rows {
            for r in ray {
                s.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
                    r.z0.re,
                    r.z0.im,
                    r.k0.re,
                    r.k0.im,
                    opt(r.exit_time),
                    opt(r.exit_angle)
                ));
            }
        }
        s
    }

    /// Exit angles of the interior entries, i.e. sampled points of the
    /// support of `ν_t`.
    pub fn support_samples(&self) -> Vec<f64> {
        self.entries.iter().filter(|e| e.interior).map(|e| e.exit_angle).collect()
    }
}
