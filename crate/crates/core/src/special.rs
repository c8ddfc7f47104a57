//! Error function `Phi(z) = 2/sqrt(pi) int_0^z exp(-t^2) dt` and the integral
//! `Pi(w) = int_R exp(-s^2) / (s + i w) ds`.

use std::f64::consts::PI;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// `Phi(z)`, the (unnormalised-at-infinity) error function, for complex `z`.
pub fn phi(z: C64) -> C64 {
    z.erf()
}

pub fn phi_real(x: f64) -> f64 {
    phi(C64::new(x, 0.0)).re
}

/// `exp(z^2) (1 - Phi(z))`, evaluated without overflow.
pub fn erfcx(z: C64) -> C64 {
    z.erfcx()
}

/// Closed form of `Pi(w)`; rejects `Re w = 0` where the integral is singular.
pub fn pi_closed(w: C64) -> Result<C64> {
    if w.re == 0.0 || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::domain(format!("Pi(w) needs Re w != 0, got {w}")));
    }
    let i = C64::new(0.0, 1.0);
    if w.re > 0.0 {
        Ok(-PI * i * erfcx(w))
    } else {
        Ok(PI * i * erfcx(-w))
    }
}

/// Standard normal upper tail `P(N > x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfcx(C64::new(x / std::f64::consts::SQRT_2, 0.0)).re * (-(x * x) / 2.0).exp()
}
