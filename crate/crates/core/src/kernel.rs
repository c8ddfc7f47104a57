//! Kernel polynomial, its algebraic branches and branch points.
//!
//! `sqrt_disc` uses the principal square root of the discriminant, which is
//! holomorphic on the plane cut along `(-inf, x_min] U [x_max, inf)`. On those
//! real half-lines the value is the limit from the upper half-plane.

use num_complex::Complex64 as C64;

use crate::model::{ConeParams, QuadrantParams};

/// Branch points and discriminants of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGeometry {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

pub fn gamma(p: &QuadrantParams, x: C64, y: C64) -> C64 {
    0.5 * (p.s11 * x * x + 2.0 * p.s12 * x * y + p.s22 * y * y) + p.mu1 * x + p.mu2 * y
}

pub fn gamma1(p: &QuadrantParams, x: C64, y: C64) -> C64 {
    p.r11 * x + p.r21 * y
}

pub fn gamma2(p: &QuadrantParams, x: C64, y: C64) -> C64 {
    p.r12 * x + p.r22 * y
}

/// Partial derivatives of the kernel.
pub fn gamma_dx(p: &QuadrantParams, x: C64, y: C64) -> C64 {
    p.s11 * x + p.s12 * y + p.mu1
}

pub fn gamma_dy(p: &QuadrantParams, x: C64, y: C64) -> C64 {
    p.s12 * x + p.s22 * y + p.mu2
}

impl KernelGeometry {
    pub fn new(p: &QuadrantParams) -> Self {
        let det = p.det_sigma();
        let cx = p.mu2 * p.s12 - p.mu1 * p.s22;
        let cy = p.mu1 * p.s12 - p.mu2 * p.s11;
        let d1 = cx * cx + p.mu2 * p.mu2 * det;
        let d2 = cy * cy + p.mu1 * p.mu1 * det;
        KernelGeometry {
            x_min: (cx - d1.sqrt()) / det,
            x_max: (cx + d1.sqrt()) / det,
            y_min: (cy - d2.sqrt()) / det,
            y_max: (cy + d2.sqrt()) / det,
            d1,
            d2,
        }
    }

    /// Length of the real interval beyond `x_max` on which `Re Y^-` stays negative.
    pub fn delta_hat(&self, p: &QuadrantParams) -> f64 {
        if p.s12 >= 0.0 {
            f64::INFINITY
        } else {
            -p.mu2 / p.s12 - self.x_max
        }
    }
}

/// Coefficients of `gamma(x, .) = a y^2 + b(x) y + c(x)`.
pub fn coeffs_in_y(p: &QuadrantParams, x: C64) -> (C64, C64, C64) {
    (
        C64::new(0.5 * p.s22, 0.0),
        p.s12 * x + p.mu2,
        0.5 * p.s11 * x * x + p.mu1 * x,
    )
}

/// Discriminant `b(x)^2 - 4 a c(x)` as a polynomial in `x`.
pub fn disc(p: &QuadrantParams, x: C64) -> C64 {
    (p.s12 * p.s12 - p.s11 * p.s22) * x * x + 2.0 * (p.mu2 * p.s12 - p.mu1 * p.s22) * x + p.mu2 * p.mu2
}

pub fn disc_dx(p: &QuadrantParams, x: C64) -> C64 {
    2.0 * (p.s12 * p.s12 - p.s11 * p.s22) * x + 2.0 * (p.mu2 * p.s12 - p.mu1 * p.s22)
}

/// Branch of `sqrt(disc(x))` equal to `gamma'_y(x, Y^+(x))`.
pub fn sqrt_disc(p: &QuadrantParams, x: C64) -> C64 {
    let d = disc(p, x);
    if x.im == 0.0 && d.re < 0.0 {
        let s = (-d.re).sqrt();
        let centre = (p.mu2 * p.s12 - p.mu1 * p.s22) / p.det_sigma();
        return if x.re > centre { C64::new(0.0, -s) } else { C64::new(0.0, s) };
    }
    d.sqrt()
}

pub fn y_branch(p: &QuadrantParams, x: C64, b: Branch) -> C64 {
    (-p.s12 * x - p.mu2 + b.sign() * sqrt_disc(p, x)) / p.s22
}

pub fn y_branch_dx(p: &QuadrantParams, x: C64, b: Branch) -> C64 {
    (-p.s12 + b.sign() * disc_dx(p, x) / (2.0 * sqrt_disc(p, x))) / p.s22
}

/// `X^{+/-}(y)`, the branches of `gamma(., y) = 0`.
pub fn x_branch(p: &QuadrantParams, y: C64, b: Branch) -> C64 {
    y_branch(&p.swapped(), y, b)
}

/// `gamma'_y(x, Y^+(x))`.
pub fn dgamma_y_on_branch(p: &QuadrantParams, x: C64) -> C64 {
    sqrt_disc(p, x)
}

/// `gamma'_x(X^+(y), y)`.
pub fn dgamma_x_on_branch(p: &QuadrantParams, y: C64) -> C64 {
    sqrt_disc(&p.swapped(), y)
}

/// Real part of `Y^{+/-}(u + iv)` from the modulus identity for the square
/// root, independent of the complex evaluation.
pub fn re_y_branch_closed_form(p: &QuadrantParams, g: &KernelGeometry, u: f64, v: f64, b: Branch) -> f64 {
    let x = C64::new(u, v);
    let prod = (x - g.x_min) * (g.x_max - x);
    let inner = (u - g.x_min) * (g.x_max - u) + v * v + prod.norm();
    (-p.s12 * u - p.mu2 + b.sign() * (p.det_sigma() * inner / 2.0).max(0.0).sqrt()) / p.s22
}

/// Trigonometric parametrisation of the ellipse `gamma = 0`.
pub fn ellipse_param(p: &QuadrantParams, cone: &ConeParams, t: f64) -> (f64, f64) {
    let k = cone.mu_norm / cone.beta.sin();
    let x = k / p.s11.sqrt() * (t.cos() - cone.theta.cos());
    let y = k / p.s22.sqrt() * ((t - cone.beta).cos() - (cone.theta - cone.beta).cos());
    (x, y)
}
