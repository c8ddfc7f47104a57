//! Saddle point of the inversion exponent and steepest-descent paths.
//!
//! For a direction `alpha` the exponent of the `x`-integrals is
//! `r (F(x, alpha) - cos(alpha) x(alpha) - sin(alpha) y(alpha))` with
//! `F(x, alpha) = -cos(alpha) x - sin(alpha) Y+(x) + cos(alpha) x(alpha) + sin(alpha) y(alpha)`.
//! The descent path solves `F(x, alpha) = -t^2`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kernel::{self, Branch, KernelGeometry};
use crate::model::QuadrantParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub alpha: f64,
    pub x: f64,
    pub y: f64,
    /// `F''_x` at the saddle; infinite at `alpha = 0`.
    pub fxx: f64,
    /// `sqrt(2 / F''_x)`.
    pub r_alpha: f64,
    /// `cos(alpha) x(alpha) + sin(alpha) y(alpha)`.
    pub exponent_rate: f64,
}

/// `sigma11 sin^2 - 2 sigma12 sin cos + sigma22 cos^2`.
pub fn quad_form(p: &QuadrantParams, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    p.s11 * s * s - 2.0 * p.s12 * s * c + p.s22 * c * c
}

/// Maximiser of `cos(alpha) x + sin(alpha) y` on the ellipse `gamma = 0`.
/// Valid for any direction; `alpha` in `[0, pi/2]` covers the quadrant.
pub fn saddle_xy(p: &QuadrantParams, alpha: f64) -> (f64, f64) {
    let det = p.det_sigma();
    let (s, c) = alpha.sin_cos();
    let n = p.mu2 * p.mu2 * p.s11 - 2.0 * p.mu1 * p.mu2 * p.s12 + p.mu1 * p.mu1 * p.s22;
    let k = (n / quad_form(p, alpha)).sqrt();
    let x = (p.mu2 * p.s12 - p.mu1 * p.s22) / det + (p.s22 * c - p.s12 * s) * k / det;
    let y = (p.mu1 * p.s12 - p.mu2 * p.s11) / det + (p.s11 * s - p.s12 * c) * k / det;
    (x, y)
}

pub fn saddle_point(p: &QuadrantParams, alpha: f64) -> SaddleData {
    let (x, y) = saddle_xy(p, alpha);
    let (s, c) = alpha.sin_cos();
    let fxx = curvature_f(p, alpha).unwrap_or(f64::INFINITY);
    SaddleData {
        alpha,
        x,
        y,
        fxx,
        r_alpha: (2.0 / fxx).sqrt(),
        exponent_rate: c * x + s * y,
    }
}

/// `F''_x(x(alpha), alpha)`; unbounded at `alpha = 0`.
pub fn curvature_f(p: &QuadrantParams, alpha: f64) -> Result<f64> {
    let (x, _) = saddle_xy(p, alpha);
    let gy = kernel::dgamma_y_on_branch(p, C64::new(x, 0.0)).re;
    let denom = gy * alpha.sin();
    if !(denom > 0.0) {
        return Err(Error::numeric(format!("F'' is unbounded at alpha = {alpha}")));
    }
    Ok(quad_form(p, alpha) / denom)
}

/// `G''_y(y(alpha), alpha)`; unbounded at `alpha = pi/2`.
pub fn curvature_g(p: &QuadrantParams, alpha: f64) -> Result<f64> {
    curvature_f(&p.swapped(), std::f64::consts::FRAC_PI_2 - alpha)
        .map_err(|_| Error::numeric(format!("G'' is unbounded at alpha = {alpha}")))
}

/// `(F'', R(alpha))`.
pub fn curvature(p: &QuadrantParams, alpha: f64) -> Result<(f64, f64)> {
    let f = curvature_f(p, alpha)?;
    Ok((f, (2.0 / f).sqrt()))
}

pub fn phase_f(p: &QuadrantParams, x: C64, alpha: f64) -> C64 {
    let (s, c) = alpha.sin_cos();
    let (xa, ya) = saddle_xy(p, alpha);
    -c * x - s * kernel::y_branch(p, x, Branch::Plus) + c * xa + s * ya
}

pub fn phase_f_dx(p: &QuadrantParams, x: C64, alpha: f64) -> C64 {
    let (s, c) = alpha.sin_cos();
    -c - s * kernel::y_branch_dx(p, x, Branch::Plus)
}

/// `G(y, alpha) = -cos(alpha) X+(y) - sin(alpha) y + cos(alpha) x(alpha) + sin(alpha) y(alpha)`.
pub fn phase_g(p: &QuadrantParams, y: C64, alpha: f64) -> C64 {
    phase_f(&p.swapped(), y, std::f64::consts::FRAC_PI_2 - alpha)
}

/// A traced steepest-descent path `t -> x(it, alpha)`, `F = -t^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentPath {
    pub alpha: f64,
    pub epsilon_cap: f64,
    /// Ordered from `t = -epsilon_cap` to `t = +epsilon_cap`.
    pub samples: Vec<(f64, C64)>,
    pub x_plus: C64,
    pub x_minus: C64,
}

impl DescentPath {
    /// Largest `|F(x(it)) + t^2|` over the samples.
    pub fn max_residual(&self, p: &QuadrantParams) -> f64 {
        if self.alpha == 0.0 {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|&(t, x)| (phase_f(p, x, self.alpha) + t * t).norm())
            .fold(0.0, f64::max)
    }

    /// Initial guess for the path point at parameter `t` from the samples.
    pub fn guess(&self, t: f64) -> C64 {
        let s = &self.samples;
        let n = s.len();
        if n < 2 {
            return s[0].1;
        }
        let t0 = s[0].0;
        let t1 = s[n - 1].0;
        let h = (t1 - t0) / (n - 1) as f64;
        let k = (((t - t0) / h).floor() as isize).clamp(0, n as isize - 2) as usize;
        let w = (t - s[k].0) / h;
        s[k].1 * (1.0 - w) + s[k + 1].1 * w
    }
}

/// Default half-length of the path in `t`: `0.1 R(alpha)`, reduced so that the
/// path keeps a distance of at least `1e-3` from the branch points.
pub fn default_epsilon(p: &QuadrantParams, alpha: f64) -> Result<f64> {
    let (_, r) = curvature(p, alpha)?;
    let g = KernelGeometry::new(p);
    let (x, _) = saddle_xy(p, alpha);
    let dist = (g.x_max - x).min(x - g.x_min);
    Ok((0.1 * r).min(((dist - 1e-3) / r).max(0.0)))
}

/// Solve `F(x, alpha) = -t^2` by Newton iteration from `guess`.
pub fn solve_on_path(p: &QuadrantParams, alpha: f64, t: f64, guess: C64) -> Result<C64> {
    let (s, c) = alpha.sin_cos();
    let (xa, ya) = saddle_xy(p, alpha);
    let shift = c * xa + s * ya;
    let target = -t * t;
    let mut x = guess;
    let scale = 1.0 + t * t;
    for _ in 0..40 {
        let f = -c * x - s * kernel::y_branch(p, x, Branch::Plus) + shift - target;
        if f.norm() <= 1e-14 * scale {
            return Ok(x);
        }
        let df = -c - s * kernel::y_branch_dx(p, x, Branch::Plus);
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        x -= step;
        if step.norm() <= 1e-15 * (1.0 + x.norm()) {
            let f = -c * x - s * kernel::y_branch(p, x, Branch::Plus) + shift - target;
            if f.norm() <= 1e-11 * scale {
                return Ok(x);
            }
        }
    }
    let f = phase_f(p, x, alpha) - target;
    if f.norm() <= 1e-11 * scale {
        return Ok(x);
    }
    Err(Error::numeric(format!(
        "descent-path Newton failed at alpha={alpha}, t={t} (residual {:.3e})",
        f.norm()
    )))
}

/// Trace the descent path by continuation in `t` with a quadratic predictor
/// and Newton corrector. Requires `alpha` in `(0, pi)`.
pub fn trace_descent(p: &QuadrantParams, alpha: f64, epsilon_cap: f64, n_samples: usize) -> Result<DescentPath> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(Error::domain(format!("x-path needs alpha in (0, pi), got {alpha}")));
    }
    let n = n_samples.max(2);
    let (xa, _) = saddle_xy(p, alpha);
    let (_, r) = curvature(p, alpha)?;
    let i = C64::new(0.0, 1.0);
    let x0 = C64::new(xa, 0.0);
    let h = epsilon_cap / n as f64;
    let mut pos: Vec<C64> = vec![x0];
    let mut t_prev = 0.0;
    for k in 1..=n {
        let t_target = k as f64 * h;
        // Sub-step when Newton struggles.
        let mut sub = 1;
        loop {
            let mut ok = true;
            let mut local = pos.clone();
            let hs = (t_target - t_prev) / sub as f64;
            for j in 1..=sub {
                let t = t_prev + j as f64 * hs;
                let m = local.len();
                let guess = if m == 1 {
                    x0 + i * r * t
                } else if m == 2 {
                    local[1] * 2.0 - local[0]
                } else {
                    local[m - 1] * 3.0 - local[m - 2] * 3.0 + local[m - 3]
                };
                // The predictor assumes equal spacing; only exact when sub = 1.
                match solve_on_path(p, alpha, t, guess) {
                    Ok(x) if sub == 1 || j == sub => local.push(x),
                    Ok(_) => {}
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                pos.push(*local.last().unwrap());
                break;
            }
            sub *= 2;
            if sub > 64 {
                return Err(Error::numeric(format!(
                    "descent path lost at alpha={alpha}, t={t_target}"
                )));
            }
        }
        t_prev = t_target;
    }
    let mut samples = Vec::with_capacity(2 * n + 1);
    for k in (1..=n).rev() {
        samples.push((-(k as f64) * h, pos[k].conj()));
    }
    for (k, x) in pos.iter().enumerate() {
        samples.push((k as f64 * h, *x));
    }
    let path = DescentPath {
        alpha,
        epsilon_cap,
        x_plus: pos[n],
        x_minus: pos[n].conj(),
        samples,
    };
    Ok(path)
}

/// The `alpha = 0` path: the image of the `y`-descent path under `X+`, which
/// runs the real segment `[x_max, x_max + eps^2]` out and back.
pub fn descent_path_alpha0(p: &QuadrantParams, epsilon_cap: f64, n_samples: usize) -> DescentPath {
    let g = KernelGeometry::new(p);
    let n = n_samples.max(1);
    let h = epsilon_cap / n as f64;
    let samples: Vec<(f64, C64)> = (-(n as isize)..=n as isize)
        .map(|k| {
            let t = k as f64 * h;
            (t, C64::new(g.x_max + t * t, 0.0))
        })
        .collect();
    let end = C64::new(g.x_max + epsilon_cap * epsilon_cap, 0.0);
    DescentPath {
        alpha: 0.0,
        epsilon_cap,
        samples,
        x_plus: end,
        x_minus: end,
    }
}
