//! Independent semi-analytic oracle for the model with identity covariance and
//! reflection: the coordinates are then independent one-dimensional reflected
//! Brownian motions with unit variance, so every quantity is a time integral of
//! closed-form one-dimensional expressions.

#![allow(dead_code)]

use std::f64::consts::PI;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64 as C64;
use rbm_green::batch::Batched;
use rbm_green::laplace::BoundaryTransforms;
use rbm_green::Result;

fn erfcx(z: C64) -> C64 {
    z.erfcx()
}

fn normal_sf(x: f64) -> f64 {
    0.5 * erfcx(C64::new(x / 2f64.sqrt(), 0.0)).re * (-(x * x) / 2.0).exp()
}

fn gauss(x: f64, t: f64) -> f64 {
    (-(x * x) / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Transition density of a reflected Brownian motion with drift `mu` from `z`.
pub fn density_1d(t: f64, z: f64, u: f64, mu: f64) -> f64 {
    let m = z + mu * t;
    let st = t.sqrt();
    gauss(u - m, t) + (2.0 * mu * u).exp() * gauss(u + m, t) - 2.0 * mu * (2.0 * mu * u).exp() * normal_sf((u + m) / st)
}

/// Expected local-time rate at the origin, `p(t, z, 0) / 2`.
pub fn local_time_rate(t: f64, z: f64, mu: f64) -> f64 {
    0.5 * density_1d(t, z, 0.0, mu)
}

/// `E exp(y Z_t)` for the one-dimensional reflected process.
pub fn mgf_1d(t: f64, z: f64, y: C64, mu: f64) -> C64 {
    let m = z + mu * t;
    let k = y + 2.0 * mu;
    let s = (2.0 * t).sqrt();
    let e = (-(m * m) / (2.0 * t)).exp();
    0.5 * e * (erfcx(-(m + y * t) / s) + y / k * erfcx((m - k * t) / s)) + 2.0 * mu / k * normal_sf(m / t.sqrt())
}

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    fn rec<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, fa: C64, fm: C64, fb: C64, whole: C64, tol: f64, depth: u32) -> C64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.norm() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `int_a^b f` by double-exponential quadrature, real and imaginary parts separately.
pub fn de_integral<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    let re = quadrature::double_exponential::integrate(|t| f(t).re, a, b, tol).integral;
    let im = quadrature::double_exponential::integrate(|t| f(t).im, a, b, tol).integral;
    C64::new(re, im)
}

/// `int_0^inf f(t) dt` split into pieces of growing length. The integrand is
/// first scaled by its peak on a log grid so that `tol` is relative.
pub fn time_integral<F: Fn(f64) -> C64>(f: F, tol: f64) -> C64 {
    let (mut peak, mut t_peak) = (0.0f64, 0.0);
    for k in 0..=600 {
        let t = 1e-3 * (4e6f64).powf(k as f64 / 600.0);
        let v = f(t).norm();
        if v > peak {
            peak = v;
            t_peak = t;
        }
    }
    if peak == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let g = |t: f64| f(t) / peak;
    let mut acc = C64::new(0.0, 0.0);
    let mut lo = 0.0;
    let mut h = 1.0;
    let mut quiet = 0;
    while lo < 4000.0 {
        let piece = de_integral(&g, lo, lo + h, tol);
        acc += piece;
        quiet = if lo > t_peak && piece.norm() < tol * acc.norm().max(1e-300) { quiet + 1 } else { 0 };
        if quiet >= 2 {
            break;
        }
        lo += h;
        h = (h * 2.0).min(if lo < t_peak { 100.0 } else { 25.0 });
    }
    acc * peak
}

/// Oracle for the model with `Sigma = I`, `R = I`, drift `mu`, start `z0`.
#[derive(Debug, Clone, Copy)]
pub struct IndependentOracle {
    pub mu: [f64; 2],
    pub z0: [f64; 2],
}

impl IndependentOracle {
    pub fn p1() -> Self {
        IndependentOracle { mu: [1.0, 1.0], z0: [1.0, 1.0] }
    }

    /// `E int exp(y Z2) dL1`.
    pub fn phi1(&self, y: C64) -> C64 {
        time_integral(|t| local_time_rate(t, self.z0[0], self.mu[0]) * mgf_1d(t, self.z0[1], y, self.mu[1]), 1e-13)
    }

    pub fn phi2(&self, x: C64) -> C64 {
        time_integral(|t| local_time_rate(t, self.z0[1], self.mu[1]) * mgf_1d(t, self.z0[0], x, self.mu[0]), 1e-13)
    }

    pub fn phi(&self, x: C64, y: C64) -> C64 {
        time_integral(|t| mgf_1d(t, self.z0[0], x, self.mu[0]) * mgf_1d(t, self.z0[1], y, self.mu[1]), 1e-12)
    }

    pub fn green(&self, a: f64, b: f64) -> f64 {
        time_integral(
            |t| C64::new(density_1d(t, self.z0[0], a, self.mu[0]) * density_1d(t, self.z0[1], b, self.mu[1]), 0.0),
            1e-15,
        )
        .re
    }

    /// `h2(u)`: density of `L2` along the first axis.
    pub fn boundary_density2(&self, u: f64) -> f64 {
        time_integral(
            |t| C64::new(local_time_rate(t, self.z0[1], self.mu[1]) * density_1d(t, self.z0[0], u, self.mu[0]), 0.0),
            1e-15,
        )
        .re
    }
}

impl BoundaryTransforms for IndependentOracle {
    fn phi1(&self, y: C64) -> Result<Batched> {
        Ok(Batched::splat(IndependentOracle::phi1(self, y)))
    }
    fn phi2(&self, x: C64) -> Result<Batched> {
        Ok(Batched::splat(IndependentOracle::phi2(self, x)))
    }
}

/// Valid quadrant models: correlation in `(-0.8, 0.8)`, positive drift,
/// completely-S reflection with positive diagonal.
pub fn model_strategy() -> impl proptest::strategy::Strategy<Value = rbm_green::model::QuadrantParams> {
    use proptest::prelude::*;
    (
        0.5f64..2.0,
        0.5f64..2.0,
        -0.8f64..0.8,
        0.2f64..2.0,
        0.2f64..2.0,
        -0.5f64..2.0,
        -0.5f64..2.0,
        0.0f64..2.0,
        0.0f64..2.0,
    )
        .prop_map(|(s11, s22, rho, mu1, mu2, r12, r21, a0, b0)| rbm_green::model::QuadrantParams {
            s11,
            s12: rho * (s11 * s22).sqrt(),
            s22,
            mu1,
            mu2,
            r11: 1.0,
            r12,
            r21,
            r22: 1.0,
            a0,
            b0,
        })
        .prop_filter("completely-S", |p| p.validate().is_ok())
}
