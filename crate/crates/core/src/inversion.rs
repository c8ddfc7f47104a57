//! Green's density as a sum of three simple contour integrals.
//!
//! ```text
//! I1(a, b) = 1/(2 pi i) int phi2(x) gamma2(x, Y+) / gamma'_y(x, Y+) exp(-a x - b Y+) dx
//! I2(a, b) = I1 of the swapped model at (b, a)
//! I3(a, b) = 1/(2 pi i) int exp((a0 - a) x + (b0 - b) Y+) / gamma'_y(x, Y+) dx      (b > b0)
//! ```
//!
//! The vertical form integrates over `Re x = -eps` with the direct transforms.
//! The shifted form runs up a vertical ray to the lower end of the steepest
//! descent path through the saddle, along the path, and up again; it uses the
//! continued transforms and picks up the pole residue when the pole lies
//! between the two contours.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::batch::Batched;
use crate::error::{Error, Result};
use crate::kernel::{self, Branch, KernelGeometry};
use crate::laplace::{BoundaryTransforms, ContinuedTransform, Swapped};
use crate::model::QuadrantParams;
use crate::poles::{self, PoleReport};
use crate::quad::{self, QuadOptions, QuadOutput};
use crate::saddle;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    /// Offset of the vertical contour.
    pub eps: f64,
    /// Relative tolerance of the adaptive quadrature.
    pub rel_tol: f64,
    /// Certified relative size of the neglected tail.
    pub tail_tol: f64,
    /// Largest truncation height.
    pub max_height: f64,
    /// Descent path half-length as a multiple of `R(alpha)` (before clamping).
    pub gamma_scale: f64,
    /// Pole-on-path window as a multiple of `R(alpha) eps_gamma`.
    pub pole_window: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            eps: 0.05,
            rel_tol: 1e-9,
            tail_tol: 1e-8,
            max_height: 1e3,
            gamma_scale: 0.1,
            pole_window: 3.0,
        }
    }
}

/// One integral (or their sum) with error accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    pub value: C64,
    pub batched: Batched,
    /// Quadrature plus truncation error estimate.
    pub abs_error_est: f64,
    /// Standard error carried over from the Monte Carlo inputs.
    pub se_propagated: f64,
    pub contour: String,
}

impl QuadratureResult {
    fn new(batched: Batched, abs_error_est: f64, contour: String) -> Self {
        QuadratureResult {
            value: batched.mean(),
            se_propagated: batched.se_abs(),
            batched,
            abs_error_est,
            contour,
        }
    }

    pub fn combined_error(&self) -> f64 {
        self.abs_error_est + self.se_propagated
    }
}

/// `I1 + I2 + I3` with each part kept.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenOracle {
    pub parts: [QuadratureResult; 3],
    pub total: QuadratureResult,
}

const TWO_PI: f64 = 2.0 * PI;

fn check_eps(p: &QuadrantParams, eps: f64) -> Result<()> {
    let g = kernel::gamma(p, C64::new(-eps, 0.0), C64::new(-eps, 0.0)).re;
    if !(eps > 0.0 && g < 0.0) {
        return Err(Error::domain(format!("contour offset {eps} is not inside the negative region of the kernel")));
    }
    Ok(())
}

/// `exp(-b Y+)` decays like `exp(-kappa |v|)` along vertical lines.
fn vertical_decay(p: &QuadrantParams, b: f64) -> f64 {
    b * p.det_sigma().sqrt() / p.s22
}

/// `int_0^inf h(v) dv` with a certified tail, where `h` decays like `exp(-decay v)`.
fn integrate_ray<F>(mut h: F, decay: f64, cfg: &InversionConfig) -> Result<(Batched, f64, f64)>
where
    F: FnMut(f64) -> Result<Batched>,
{
    let mut failure: Option<Error> = None;
    let mut wrapped = |v: f64| match h(v) {
        Ok(x) => x,
        Err(e) => {
            failure.get_or_insert(e);
            Batched::real(0.0)
        }
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: cfg.rel_tol, max_panels: 4000 };
    let first = (2.0 / decay).min(5.0);
    let (out, end) = quad::integrate_semi_infinite(&mut wrapped, 0.0, first, cfg.max_height, 0.1 * cfg.tail_tol, opts);
    let at_end = wrapped(end);
    if let Some(e) = failure {
        return Err(e);
    }
    let tail = at_end.0.iter().map(|z| z.norm()).fold(0.0, f64::max) / decay;
    let scale = out.value.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !out.converged || tail > cfg.tail_tol * scale.max(1e-300) {
        return Err(Error::Truncation(format!(
            "tail bound {tail:.3e} not certified below {:.1e} relative within height {end:.1}",
            cfg.tail_tol
        )));
    }
    Ok((out.value, out.error + tail, end))
}

fn quad_interval<F>(mut f: F, a: f64, b: f64, cfg: &InversionConfig) -> Result<QuadOutput<Batched>>
where
    F: FnMut(f64) -> Result<Batched>,
{
    let mut failure: Option<Error> = None;
    let wrapped = |t: f64| match f(t) {
        Ok(x) => x,
        Err(e) => {
            failure.get_or_insert(e);
            Batched::real(0.0)
        }
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: cfg.rel_tol, max_panels: 4000 };
    let out = quad::integrate(wrapped, a, b, opts);
    if let Some(e) = failure {
        return Err(e);
    }
    if !out.converged {
        return Err(Error::numeric(format!("quadrature on [{a}, {b}] did not converge")));
    }
    Ok(out)
}

/// The integrand of `I1` (without the `1/(2 pi i)`), given `phi2(x)`.
fn i1_kernel(p: &QuadrantParams, a: f64, b: f64, x: C64) -> C64 {
    let yp = kernel::y_branch(p, x, Branch::Plus);
    kernel::gamma2(p, x, yp) / kernel::sqrt_disc(p, x) * (-a * x - b * yp).exp()
}

fn i3_kernel(p: &QuadrantParams, a: f64, b: f64, x: C64) -> C64 {
    let yp = kernel::y_branch(p, x, Branch::Plus);
    ((p.a0 - a) * x + (p.b0 - b) * yp).exp() / kernel::sqrt_disc(p, x)
}

/// Vertical-contour `I1` of model `p`.
fn i1_vertical(p: &QuadrantParams, t: &dyn BoundaryTransforms, a: f64, b: f64, cfg: &InversionConfig) -> Result<QuadratureResult> {
    check_eps(p, cfg.eps)?;
    if !(b > 0.0) {
        return Err(Error::domain("I1 needs b > 0"));
    }
    let h = |v: f64| -> Result<Batched> {
        let xu = C64::new(-cfg.eps, v);
        let xd = C64::new(-cfg.eps, -v);
        let up = t.phi2(xu)? * i1_kernel(p, a, b, xu);
        let down = t.phi2(xd)? * i1_kernel(p, a, b, xd);
        Ok((up + down) * (1.0 / TWO_PI))
    };
    let (v, err, end) = integrate_ray(h, vertical_decay(p, b), cfg)?;
    Ok(QuadratureResult::new(v, err, format!("vertical(eps={},height={end:.3})", cfg.eps)))
}

fn i3_vertical(p: &QuadrantParams, a: f64, b: f64, cfg: &InversionConfig) -> Result<QuadratureResult> {
    check_eps(p, cfg.eps)?;
    let h = |v: f64| -> Result<Batched> {
        let xu = C64::new(-cfg.eps, v);
        let xd = C64::new(-cfg.eps, -v);
        Ok(Batched::splat((i3_kernel(p, a, b, xu) + i3_kernel(p, a, b, xd)) / TWO_PI))
    };
    let (v, err, end) = integrate_ray(h, vertical_decay(p, b - p.b0), cfg)?;
    Ok(QuadratureResult::new(v, err, format!("vertical(eps={},height={end:.3})", cfg.eps)))
}

/// Shifted contour through the saddle of direction `alpha` for an integrand
/// `phi(x) * kern(x)`; `pole` is `(x*, residue of phi * kern)` when present.
struct ShiftedSpec<'a> {
    p: &'a QuadrantParams,
    alpha: f64,
    decay: f64,
    pole: Option<(f64, Batched)>,
}

fn shifted_integral<F>(spec: &ShiftedSpec, f: F, cfg: &InversionConfig) -> Result<(Batched, f64, String)>
where
    F: Fn(C64) -> Result<Batched>,
{
    let p = spec.p;
    let alpha = spec.alpha;
    let (_, r_alpha) = saddle::curvature(p, alpha)?;
    let geo = KernelGeometry::new(p);
    let (xa, _) = saddle::saddle_xy(p, alpha);
    let eps_g = {
        let dist = (geo.x_max - xa).min(xa - geo.x_min);
        (cfg.gamma_scale * r_alpha).min(((dist - 1e-3) / r_alpha).max(0.0))
    };
    if !(eps_g > 0.0) {
        return Err(Error::numeric(format!("saddle at alpha={alpha} too close to a branch point")));
    }
    let path = saddle::trace_descent(p, alpha, eps_g, 64)?;
    let x_on = |t: f64| -> Result<C64> { saddle::solve_on_path(p, alpha, t, path.guess(t)) };

    // Pole handling: replace the part of the path inside a small disc around
    // the pole by an arc passing to its right.
    let mut include_residue = false;
    let mut t_cut = 0.0;
    let mut arc: Option<(f64, f64, f64)> = None; // (x*, radius, half-angle)
    let mut descriptor = String::new();
    if let Some((xs, _)) = spec.pole {
        let window = cfg.pole_window * r_alpha * eps_g;
        let rho = (0.5 * (geo.x_max - xs)).min(0.5 * xs).min(0.5 * r_alpha * eps_g);
        if (xa - xs).abs() < window && (xa - xs).abs() < rho {
            let mut lo = 0.0;
            let mut hi = eps_g;
            if (x_on(hi)? - xs).norm() <= rho {
                return Err(Error::numeric("pole detour does not fit on the descent path"));
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (x_on(mid)? - xs).norm() < rho {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            t_cut = hi;
            let xc = x_on(t_cut)?;
            arc = Some((xs, rho, (xc - xs).arg()));
            include_residue = true;
            descriptor = format!(",detour(radius={rho:.3e})");
        } else {
            include_residue = xs < xa;
            if (xa - xs).abs() < window {
                descriptor = ",pole-window".to_string();
            }
        }
    }

    // Descent path part, t in [t_cut, eps_g] together with its mirror image.
    let i = C64::new(0.0, 1.0);
    let gamma_part = quad_interval(
        |t: f64| -> Result<Batched> {
            let x = x_on(t)?;
            let dx = if t.abs() < 1e-7 {
                i * r_alpha
            } else {
                -2.0 * t / saddle::phase_f_dx(p, x, alpha)
            };
            let xm = x.conj();
            let dxm = -dx.conj();
            Ok((f(x)? * dx + f(xm)? * dxm) / (TWO_PI * i))
        },
        t_cut,
        eps_g,
        cfg,
    )?;

    let mut total = gamma_part.value;
    let mut err = gamma_part.error;

    if let Some((xs, rho, theta_c)) = arc {
        let arc_part = quad_interval(
            |th: f64| -> Result<Batched> {
                let up = C64::from_polar(rho, th);
                let down = up.conj();
                let xu = xs + up;
                let xd = xs + down;
                // Both halves oriented upward: d x = i rho e^{i th} d th.
                Ok((f(xu)? * (i * up) + f(xd)? * (i * down)) / (TWO_PI * i))
            },
            0.0,
            theta_c,
            cfg,
        )?;
        total += arc_part.value;
        err += arc_part.error;
    }

    // Vertical rays from the path ends.
    let xp = path.x_plus;
    let xm = path.x_minus;
    let (rays, rerr, end) = integrate_ray(
        |v: f64| -> Result<Batched> { Ok((f(xp + i * v)? + f(xm - i * v)?) * (1.0 / TWO_PI)) },
        spec.decay,
        cfg,
    )?;
    total += rays;
    err += rerr;

    if include_residue {
        let (_, res) = spec.pole.expect("pole present");
        total += -res;
    }
    let desc = format!("shifted(alpha={alpha:.6},eps_gamma={eps_g:.4e},height={end:.3}{descriptor})");
    Ok((total, err, desc))
}

fn i1_shifted(
    p: &QuadrantParams,
    t: &dyn BoundaryTransforms,
    a: f64,
    b: f64,
    pole: Option<f64>,
    cfg: &InversionConfig,
) -> Result<QuadratureResult> {
    if !(b > 0.0) {
        return Err(Error::domain("I1 needs b > 0"));
    }
    let cont = ContinuedTransform::new(p, t);
    let alpha = b.atan2(a);
    let pole = match pole {
        Some(xs) => {
            let xc = C64::new(xs, 0.0);
            let ym = kernel::y_branch(p, xc, Branch::Minus);
            let res_phi = poles::residue_phi2(p, xs, t.phi1(ym)?)?;
            Some((xs, res_phi * i1_kernel(p, a, b, xc)))
        }
        None => None,
    };
    let spec = ShiftedSpec { p, alpha, decay: vertical_decay(p, b), pole };
    let (v, err, desc) = shifted_integral(&spec, |x| Ok(cont.phi2(x)? * i1_kernel(p, a, b, x)), cfg)?;
    Ok(QuadratureResult::new(v, err, desc))
}

fn i3_shifted(p: &QuadrantParams, a: f64, b: f64, cfg: &InversionConfig) -> Result<QuadratureResult> {
    let alpha = (b - p.b0).atan2(a - p.a0);
    let spec = ShiftedSpec { p, alpha, decay: vertical_decay(p, b - p.b0), pole: None };
    let (v, err, desc) = shifted_integral(&spec, |x| Ok(Batched::splat(i3_kernel(p, a, b, x))), cfg)?;
    Ok(QuadratureResult::new(v, err, desc))
}

fn check_point(p: &QuadrantParams, a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("({a}, {b}) is not an interior point")));
    }
    if !(a > p.a0 || b > p.b0) {
        return Err(Error::domain(format!("({a}, {b}) needs a > a0 or b > b0")));
    }
    Ok(())
}

/// `I_which(a, b)` on the vertical contour.
pub fn eval_i_vertical(
    which: usize,
    a: f64,
    b: f64,
    p: &QuadrantParams,
    t: &dyn BoundaryTransforms,
    cfg: &InversionConfig,
) -> Result<QuadratureResult> {
    check_point(p, a, b)?;
    match which {
        1 => i1_vertical(p, t, a, b, cfg),
        2 => i1_vertical(&p.swapped(), &Swapped(t), b, a, cfg),
        3 if b > p.b0 => i3_vertical(p, a, b, cfg),
        3 => i3_vertical(&p.swapped(), b, a, cfg),
        _ => Err(Error::domain("integral index must be 1, 2 or 3")),
    }
}

/// `I_which(a, b)` on the shifted contour.
pub fn eval_i_shifted(
    which: usize,
    a: f64,
    b: f64,
    p: &QuadrantParams,
    t: &dyn BoundaryTransforms,
    poles: &PoleReport,
    cfg: &InversionConfig,
) -> Result<QuadratureResult> {
    check_point(p, a, b)?;
    match which {
        1 => i1_shifted(p, t, a, b, poles.x_star, cfg),
        2 => i1_shifted(&p.swapped(), &Swapped(t), b, a, poles.y_2star, cfg),
        3 if b > p.b0 => i3_shifted(p, a, b, cfg),
        3 => i3_shifted(&p.swapped(), b, a, cfg),
        _ => Err(Error::domain("integral index must be 1, 2 or 3")),
    }
}

fn assemble(parts: [QuadratureResult; 3]) -> GreenOracle {
    let batched = parts[0].batched + parts[1].batched + parts[2].batched;
    let err = parts.iter().map(|q| q.abs_error_est).sum();
    let contour = parts.iter().map(|q| q.contour.as_str()).collect::<Vec<_>>().join(";");
    GreenOracle {
        total: QuadratureResult::new(batched, err, contour),
        parts,
    }
}

pub fn eval_vertical(a: f64, b: f64, p: &QuadrantParams, t: &dyn BoundaryTransforms, cfg: &InversionConfig) -> Result<GreenOracle> {
    Ok(assemble([
        eval_i_vertical(1, a, b, p, t, cfg)?,
        eval_i_vertical(2, a, b, p, t, cfg)?,
        eval_i_vertical(3, a, b, p, t, cfg)?,
    ]))
}

pub fn eval_shifted(
    a: f64,
    b: f64,
    p: &QuadrantParams,
    t: &dyn BoundaryTransforms,
    poles: &PoleReport,
    cfg: &InversionConfig,
) -> Result<GreenOracle> {
    Ok(assemble([
        eval_i_shifted(1, a, b, p, t, poles, cfg)?,
        eval_i_shifted(2, a, b, p, t, poles, cfg)?,
        eval_i_shifted(3, a, b, p, t, poles, cfg)?,
    ]))
}

/// `g(a, b)` on the vertical or shifted contour.
pub fn green_oracle(
    a: f64,
    b: f64,
    p: &QuadrantParams,
    t: &dyn BoundaryTransforms,
    shifted: bool,
    cfg: &InversionConfig,
) -> Result<GreenOracle> {
    if shifted {
        let poles = poles::pole_locations(p)?;
        eval_shifted(a, b, p, t, &poles, cfg)
    } else {
        eval_vertical(a, b, p, t, cfg)
    }
}
