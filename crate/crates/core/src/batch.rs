//! Values carried as one entry per independent Monte Carlo batch.
//!
//! Every Monte Carlo input enters the downstream formulas affinely, so pushing
//! the whole batch vector through quadratures and continuations yields the
//! batch-wise values of the final quantity; their spread gives its standard
//! error. Deterministic quantities have all entries equal.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::quad::Vector;

/// Number of independent batches used for batch-means standard errors.
pub const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Batched(pub [C64; BATCHES]);

impl Batched {
    pub fn splat(v: C64) -> Self {
        Batched([v; BATCHES])
    }

    pub fn real(v: f64) -> Self {
        Batched::splat(C64::new(v, 0.0))
    }

    pub fn from_fn(f: impl FnMut(usize) -> C64) -> Self {
        Batched(std::array::from_fn(f))
    }

    pub fn map(&self, mut f: impl FnMut(C64) -> C64) -> Self {
        Batched(std::array::from_fn(|i| f(self.0[i])))
    }

    pub fn mean(&self) -> C64 {
        self.0.iter().sum::<C64>() / BATCHES as f64
    }

    /// Batch-means standard error of the real and imaginary parts.
    pub fn se(&self) -> (f64, f64) {
        let m = self.mean();
        let n = BATCHES as f64;
        let (mut vr, mut vi) = (0.0, 0.0);
        for v in &self.0 {
            vr += (v.re - m.re).powi(2);
            vi += (v.im - m.im).powi(2);
        }
        ((vr / (n - 1.0) / n).sqrt(), (vi / (n - 1.0) / n).sqrt())
    }

    pub fn se_re(&self) -> f64 {
        self.se().0
    }

    /// Standard error of the complex mean, `sqrt(se_re^2 + se_im^2)`.
    pub fn se_abs(&self) -> f64 {
        let (a, b) = self.se();
        a.hypot(b)
    }

    pub fn estimate(&self) -> Estimate {
        let (se_re, se_im) = self.se();
        Estimate { value: self.mean(), se_re, se_im }
    }

    pub fn re(&self) -> [f64; BATCHES] {
        std::array::from_fn(|i| self.0[i].re)
    }
}

/// Summary of a batched quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: C64,
    pub se_re: f64,
    pub se_im: f64,
}

impl Estimate {
    pub fn exact(v: C64) -> Self {
        Estimate { value: v, se_re: 0.0, se_im: 0.0 }
    }
}

impl Add for Batched {
    type Output = Batched;
    fn add(self, o: Batched) -> Batched {
        Batched(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Batched {
    fn add_assign(&mut self, o: Batched) {
        for i in 0..BATCHES {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for Batched {
    type Output = Batched;
    fn sub(self, o: Batched) -> Batched {
        Batched(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Batched {
    type Output = Batched;
    fn neg(self) -> Batched {
        self.map(|v| -v)
    }
}

impl Mul<f64> for Batched {
    type Output = Batched;
    fn mul(self, s: f64) -> Batched {
        self.map(|v| v * s)
    }
}

impl Mul<C64> for Batched {
    type Output = Batched;
    fn mul(self, s: C64) -> Batched {
        self.map(|v| v * s)
    }
}

impl Mul<Batched> for Batched {
    type Output = Batched;
    fn mul(self, o: Batched) -> Batched {
        Batched(std::array::from_fn(|i| self.0[i] * o.0[i]))
    }
}

impl Div<C64> for Batched {
    type Output = Batched;
    fn div(self, s: C64) -> Batched {
        let inv = 1.0 / s;
        self.map(|v| v * inv)
    }
}

impl Div<Batched> for Batched {
    type Output = Batched;
    fn div(self, o: Batched) -> Batched {
        Batched(std::array::from_fn(|i| self.0[i] / o.0[i]))
    }
}

impl Vector for Batched {
    fn zero() -> Self {
        Batched::splat(C64::new(0.0, 0.0))
    }
    fn size(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
