//! Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

/// Minimal vector-space interface needed by the integrator.
pub trait Vector: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Size used for error control.
    fn size(&self) -> f64;
}

impl Vector for f64 {
    fn zero() -> Self {
        0.0
    }
    fn size(&self) -> f64 {
        self.abs()
    }
}

impl Vector for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn size(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_panels: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOutput<V> {
    pub value: V,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
pub fn gk15<V: Vector, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).size())
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate meets `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<V: Vector, F: FnMut(f64) -> V>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> QuadOutput<V> {
    integrate_breaks(&mut f, &[a, b], opts)
}

/// Same as [`integrate`] with the interval pre-split at `breaks` (sorted).
pub fn integrate_breaks<V: Vector, F: FnMut(f64) -> V>(f: &mut F, breaks: &[f64], opts: QuadOptions) -> QuadOutput<V> {
    let mut heap = BinaryHeap::new();
    let mut total = V::zero();
    let mut err = 0.0;
    let mut evals = 0;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        evals += 15;
        total = total + v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut converged = true;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.size());
        if err <= tol {
            break;
        }
        if heap.len() >= opts.max_panels {
            converged = false;
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            converged = false;
            break;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evals += 30;
        total = total - worst.value + v1 + v2;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let mut value = V::zero();
    let mut error = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        error += p.error;
    }
    QuadOutput { value, error, evals, converged }
}

/// Integrate over `[a, inf)` by panels of geometrically growing length,
/// stopping once `stop_after` consecutive panels each contribute less than
/// `tail_tol` relative to the running total, or once the cut-off `limit` is hit.
/// The returned `converged` flag is false when `limit` was reached first.
pub fn integrate_semi_infinite<V: Vector, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    first: f64,
    limit: f64,
    tail_tol: f64,
    opts: QuadOptions,
) -> (QuadOutput<V>, f64) {
    let mut total = V::zero();
    let mut error = 0.0;
    let mut evals = 0;
    let mut lo = a;
    let mut h = first;
    let mut quiet = 0;
    let mut converged = true;
    loop {
        let hi = (lo + h).min(limit);
        let out = integrate(&mut f, lo, hi, opts);
        total = total + out.value;
        error += out.error;
        evals += out.evals;
        converged &= out.converged;
        let small = out.value.size() <= tail_tol * total.size().max(opts.abs_tol);
        quiet = if small { quiet + 1 } else { 0 };
        lo = hi;
        if quiet >= 2 {
            break;
        }
        if lo >= limit {
            converged = false;
            break;
        }
        h *= 1.6;
    }
    (QuadOutput { value: total, error, evals, converged }, lo)
}
