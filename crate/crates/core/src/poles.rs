//! Poles of the continued boundary transforms and their constants.

use num_complex::Complex64 as C64;

use crate::batch::Batched;
use crate::error::{Error, Result};
use crate::kernel::{self, Branch, KernelGeometry};
use crate::model::QuadrantParams;
use crate::saddle::saddle_xy;

/// Pole of `phi2` (first axis) and of `phi1` (second axis), where present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleReport {
    pub exists_x: bool,
    pub exists_y: bool,
    pub x_star: Option<f64>,
    /// `Y+(x*)`.
    pub y_star: Option<f64>,
    pub y_2star: Option<f64>,
    /// `X+(y**)`.
    pub x_2star: Option<f64>,
    pub alpha_star: Option<f64>,
    pub alpha_2star: Option<f64>,
    /// `theta - 2 delta`, possibly outside `[0, beta]`.
    pub omega_star: f64,
    /// `theta + 2 epsilon`.
    pub omega_2star: f64,
}

impl PoleReport {
    /// `alpha*` with the convention `-inf` when there is no pole.
    pub fn alpha_star_or_sentinel(&self) -> f64 {
        self.alpha_star.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn alpha_2star_or_sentinel(&self) -> f64 {
        self.alpha_2star.unwrap_or(f64::INFINITY)
    }
}

/// Closed-form candidate `x*`, the non-zero root of `gamma = gamma2 = 0`.
pub fn x_star_candidate(p: &QuadrantParams) -> f64 {
    let q = p.r12 / p.r22;
    2.0 * (p.mu2 * q - p.mu1) / (p.s11 - 2.0 * p.s12 * q + p.s22 * q * q)
}

/// First-axis half of the report: `(exists, x*, y*, alpha*)`.
fn first_axis(p: &QuadrantParams) -> Result<(bool, Option<f64>, Option<f64>, Option<f64>)> {
    let g = KernelGeometry::new(p);
    let y_at_max = kernel::y_branch(p, C64::new(g.x_max, 0.0), Branch::Plus).re;
    let exists = g.x_max * p.r12 + y_at_max * p.r22 > 0.0;
    if !exists {
        return Ok((false, None, None, None));
    }
    let xs = x_star_candidate(p);
    if (xs - g.x_max).abs() < 1e-9 * g.x_max.abs().max(1.0) {
        return Err(Error::domain("pole coincides with the branch point x_max"));
    }
    if !(xs > 0.0 && xs < g.x_max) {
        return Err(Error::numeric(format!("pole x* = {xs} outside (0, x_max)")));
    }
    let xc = C64::new(xs, 0.0);
    let ym = kernel::y_branch(p, xc, Branch::Minus);
    let scale = 1.0 + xs.abs() + ym.norm();
    let res_gamma = kernel::gamma(p, xc, ym).norm();
    let res_gamma2 = kernel::gamma2(p, xc, ym).norm();
    if res_gamma > 1e-10 * scale * scale || res_gamma2 > 1e-10 * scale {
        return Err(Error::numeric(format!(
            "x* fails the kernel cross-check (|gamma| = {res_gamma:.2e}, |gamma2| = {res_gamma2:.2e})"
        )));
    }
    let ys = kernel::y_branch(p, xc, Branch::Plus).re;
    Ok((true, Some(xs), Some(ys), Some(alpha_of_saddle_x(p, xs))))
}

/// Solve `x(alpha) = target` on `[0, alpha_mu]`, where `x(alpha)` decreases
/// from `x_max` to `0`.
pub fn alpha_of_saddle_x(p: &QuadrantParams, target: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = p.drift_angle();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if saddle_xy(p, mid).0 > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn pole_locations(p: &QuadrantParams) -> Result<PoleReport> {
    let (exists_x, x_star, y_star, alpha_star) = first_axis(p)?;
    let (exists_y, y_2star, x_2star_swapped, alpha_sw) = first_axis(&p.swapped())?;
    let (cone, _) = p.to_cone();
    Ok(PoleReport {
        exists_x,
        exists_y,
        x_star,
        y_star,
        y_2star,
        x_2star: x_2star_swapped,
        alpha_star,
        alpha_2star: alpha_sw.map(|a| std::f64::consts::FRAC_PI_2 - a),
        omega_star: cone.theta - 2.0 * cone.delta,
        omega_2star: cone.theta + 2.0 * cone.epsilon,
    })
}

/// `d/dx gamma2(x, Y-(x))` at `x`.
pub fn residue_denominator(p: &QuadrantParams, x: f64) -> f64 {
    p.r12 + p.r22 * kernel::y_branch_dx(p, C64::new(x, 0.0), Branch::Minus).re
}

/// Residue of the continued `phi2` at `x*`, given `phi1(Y-(x*))`.
pub fn residue_phi2(p: &QuadrantParams, x_star: f64, phi1_at_ym: Batched) -> Result<Batched> {
    let xc = C64::new(x_star, 0.0);
    let ym = kernel::y_branch(p, xc, Branch::Minus);
    let den = residue_denominator(p, x_star);
    if den.abs() < 1e-12 {
        return Err(Error::numeric("vanishing residue denominator"));
    }
    let g1 = kernel::gamma1(p, xc, ym);
    let e = (p.a0 * xc + p.b0 * ym).exp();
    Ok((phi1_at_ym * g1 + Batched::splat(e)) * (-1.0 / den))
}

/// Residue of the continued `phi1` at `y**`, given `phi2(X-(y**))`.
pub fn residue_phi1(p: &QuadrantParams, y_2star: f64, phi2_at_xm: Batched) -> Result<Batched> {
    residue_phi2(&p.swapped(), y_2star, phi2_at_xm)
}

/// `c* = (-res) gamma2(x*, y*) / gamma'_y(x*, y*)`.
pub fn pole_constant_cstar(p: &QuadrantParams, x_star: f64, residue: Batched) -> Batched {
    let xc = C64::new(x_star, 0.0);
    let ys = kernel::y_branch(p, xc, Branch::Plus);
    let factor = kernel::gamma2(p, xc, ys) / kernel::dgamma_y_on_branch(p, xc);
    -residue * factor
}

/// `c** = (-res) gamma1(x**, y**) / gamma'_x(x**, y**)`.
pub fn pole_constant_c2star(p: &QuadrantParams, y_2star: f64, residue: Batched) -> Batched {
    pole_constant_cstar(&p.swapped(), y_2star, residue)
}
