//! Boundary transforms, their meromorphic continuation, the functional
//! equation and log-log exponent fits.

use num_complex::Complex64 as C64;

use crate::batch::Batched;
use crate::error::{Error, Result};
use crate::kernel::{self, Branch, KernelGeometry};
use crate::model::QuadrantParams;
use crate::simulate::SimRun;

/// Boundary transforms on their convergence half-planes `Re < 0`.
pub trait BoundaryTransforms: Sync {
    /// `phi1(y) = E int exp(y Z2) dL1`.
    fn phi1(&self, y: C64) -> Result<Batched>;
    /// `phi2(x) = E int exp(x Z1) dL2`.
    fn phi2(&self, x: C64) -> Result<Batched>;
}

impl BoundaryTransforms for SimRun {
    fn phi1(&self, y: C64) -> Result<Batched> {
        SimRun::phi1(self, y)
    }
    fn phi2(&self, x: C64) -> Result<Batched> {
        SimRun::phi2(self, x)
    }
}

/// View of a set of transforms through the coordinate swap.
pub struct Swapped<'a, T: ?Sized>(pub &'a T);

impl<T: BoundaryTransforms + ?Sized> BoundaryTransforms for Swapped<'_, T> {
    fn phi1(&self, y: C64) -> Result<Batched> {
        self.0.phi2(y)
    }
    fn phi2(&self, x: C64) -> Result<Batched> {
        self.0.phi1(x)
    }
}

/// Below this `|gamma2(x, Y-(x))|` the continuation is treated as sitting on a pole.
pub const NEAR_POLE_FLOOR: f64 = 1e-6;

/// Continued boundary transforms of one model.
pub struct ContinuedTransform<'a, T: ?Sized> {
    pub params: QuadrantParams,
    pub geometry: KernelGeometry,
    pub delta_hat: f64,
    pub transforms: &'a T,
}

impl<'a, T: BoundaryTransforms + ?Sized> ContinuedTransform<'a, T> {
    pub fn new(params: &QuadrantParams, transforms: &'a T) -> Self {
        let geometry = KernelGeometry::new(params);
        ContinuedTransform {
            params: *params,
            geometry,
            delta_hat: geometry.delta_hat(params),
            transforms,
        }
    }

    /// `phi2(x) = -(gamma1(x, Y-) phi1(Y-) + exp(a0 x + b0 Y-)) / gamma2(x, Y-)`.
    pub fn phi2(&self, x: C64) -> Result<Batched> {
        let g = &self.geometry;
        let p = &self.params;
        if !(x.re < g.x_max + self.delta_hat) {
            return Err(Error::domain(format!("{x} beyond the continuation strip")));
        }
        if x.im == 0.0 && x.re >= g.x_max {
            return Err(Error::domain(format!("{x} lies on the cut")));
        }
        let ym = kernel::y_branch(p, x, Branch::Minus);
        let g2 = kernel::gamma2(p, x, ym);
        if g2.norm() < NEAR_POLE_FLOOR {
            return Err(Error::numeric(format!("{x} is within the near-pole floor")));
        }
        let phi1 = self.transforms.phi1(ym)?;
        let num = phi1 * kernel::gamma1(p, x, ym) + Batched::splat((p.a0 * x + p.b0 * ym).exp());
        Ok(num * (-1.0 / g2))
    }

    /// Symmetric continuation of `phi1` through `X-` and the direct `phi2`.
    pub fn phi1(&self, y: C64) -> Result<Batched> {
        let sw = Swapped(self.transforms);
        ContinuedTransform::new(&self.params.swapped(), &sw).phi2(y)
    }

    /// Direct value where it converges, continued value elsewhere.
    pub fn phi2_any(&self, x: C64) -> Result<Batched> {
        if x.re < 0.0 {
            self.transforms.phi2(x)
        } else {
            self.phi2(x)
        }
    }

    pub fn phi1_any(&self, y: C64) -> Result<Batched> {
        if y.re < 0.0 {
            self.transforms.phi1(y)
        } else {
            self.phi1(y)
        }
    }
}

/// `gamma phi + gamma1 phi1 + gamma2 phi2 + exp((x, y).z0)`.
pub fn functional_eq_residual(
    p: &QuadrantParams,
    x: C64,
    y: C64,
    phi: Batched,
    phi1: Batched,
    phi2: Batched,
) -> Result<Batched> {
    if !(x.re < 0.0 && y.re < 0.0) {
        return Err(Error::domain("functional equation is checked on Re x, Re y < 0"));
    }
    let e = (p.a0 * x + p.b0 * y).exp();
    Ok(phi * kernel::gamma(p, x, y) + phi1 * kernel::gamma1(p, x, y) + phi2 * kernel::gamma2(p, x, y) + Batched::splat(e))
}

/// Least-squares slope of `log y` against `log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    /// Batch-means standard error of the slope.
    pub se: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Fit `log v` against `t` (`log_x = false`) or `log t` (`log_x = true`), using
/// the pooled values for the slope and per-batch fits for its error.
pub fn fit_log(ts: &[f64], values: &[Batched], log_x: bool) -> Result<LogLogFit> {
    let xs: Vec<f64> = ts.iter().map(|t| if log_x { t.ln() } else { *t }).collect();
    let pooled: Vec<f64> = values.iter().map(|v| v.mean().re).collect();
    if pooled.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::numeric("log fit needs positive values"));
    }
    let ys: Vec<f64> = pooled.iter().map(|v| v.ln()).collect();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    // Delta-method slopes per batch: linear in the batch deviations.
    let n = crate::batch::BATCHES;
    let mut per = Vec::with_capacity(n);
    for b in 0..n {
        let yb: Vec<f64> = values
            .iter()
            .zip(&pooled)
            .map(|(v, m)| m.ln() + (v.0[b].re - m) / m)
            .collect();
        per.push(linear_fit(&xs, &yb).0);
    }
    let m = per.iter().sum::<f64>() / n as f64;
    let var = per.iter().map(|s| (s - m).powi(2)).sum::<f64>() / ((n - 1) as f64 * n as f64);
    Ok(LogLogFit { slope, se: var.sqrt(), r_squared: r2 })
}

/// Slope of `log phi2(-s)` against `log s` on `[s_lo, s_hi]`.
pub fn transform_tail_slope<T: BoundaryTransforms + ?Sized>(
    transforms: &T,
    s_lo: f64,
    s_hi: f64,
    n: usize,
) -> Result<LogLogFit> {
    let ss = log_grid(s_lo, s_hi, n);
    let vals: Result<Vec<Batched>> = ss.iter().map(|s| transforms.phi2(C64::new(-s, 0.0))).collect();
    fit_log(&ss, &vals?, true)
}

/// Slope of `log h2(u)` against `log u` on `[u_lo, u_hi]`, from cells of
/// relative width matching the grid spacing, each placed at the centre of the
/// histogram cells it covers.
pub fn boundary_corner_slope(run: &SimRun, axis: usize, u_lo: f64, u_hi: f64, n: usize) -> Result<LogLogFit> {
    let ratio = (u_hi / u_lo).powf(1.0 / (n - 1) as f64);
    let cells: Result<Vec<(f64, Batched)>> = log_grid(u_lo, u_hi, n)
        .iter()
        .map(|u| run.boundary_cells(axis, u / ratio.sqrt(), u * ratio.sqrt()))
        .collect();
    let (us, vals): (Vec<f64>, Vec<Batched>) = cells?.into_iter().unzip();
    fit_log(&us, &vals, true)
}

/// Slope of `log h(u)` against `u` on `[u_lo, u_hi]`.
pub fn boundary_decay_slope(run: &SimRun, axis: usize, u_lo: f64, u_hi: f64, width: f64) -> Result<LogLogFit> {
    let n = ((u_hi - u_lo) / width).round() as usize;
    let us: Vec<f64> = (0..n).map(|k| u_lo + (k as f64 + 0.5) * width).collect();
    let vals: Result<Vec<Batched>> = us.iter().map(|u| run.boundary_density_width(axis, *u, width)).collect();
    fit_log(&us, &vals?, false)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}
