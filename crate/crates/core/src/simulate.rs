//! Monte Carlo engine: constrained Euler paths with local times, occupation
//! densities in the interior and on the axes, and direct transform estimates.
//!
//! Each step draws the free increment, samples the per-coordinate minimum of
//! the Brownian bridge between the two endpoints, and pushes the step back
//! along the reflection columns so that the bridge minimum is lifted to the
//! axis. With `R = I` and `Sigma` diagonal this is exact in law.
//!
//! A path stops once both coordinates exceed a far cut-off beyond which a
//! return to the tracked region has probability below `return_tol`; the rest
//! of the bulk transform is then added in closed form from the stop point.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::batch::{Batched, BATCHES};
use crate::error::{Error, Result};
use crate::kernel;
use crate::model::QuadrantParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon_radius: f64,
    pub max_time: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Cell size for interior and boundary density estimates.
    pub bin_width: f64,
    /// Interior points whose occupation density is tracked.
    pub green_points: Vec<[f64; 2]>,
    /// Keep the two-dimensional moment histogram needed for the bulk transform.
    pub track_bulk: bool,
    /// Largest boundary abscissa tracked by the fine boundary histograms.
    pub boundary_extent: f64,
    /// Tolerated probability of returning to the tracked region after stopping.
    pub return_tol: f64,
    /// Sample the bridge minimum within each step (otherwise plain projection).
    pub bridge_correction: bool,
    /// Side of the corner square `[0, corner_box)^2` stepped with `corner_dt`;
    /// `0` disables refinement.
    pub corner_box: f64,
    pub corner_dt: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 1e-3,
            horizon_radius: 60.0,
            max_time: 400.0,
            n_paths: 100_000,
            seed: 42,
            bin_width: 0.1,
            green_points: Vec::new(),
            track_bulk: false,
            boundary_extent: 64.0,
            return_tol: 1e-6,
            bridge_correction: true,
            corner_box: 0.0,
            corner_dt: 1e-5,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, p: &QuadrantParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("dt must be positive"));
        }
        if self.n_paths == 0 {
            return Err(Error::domain("n_paths must be at least 1"));
        }
        if !(self.horizon_radius > p.a0.hypot(p.b0)) {
            return Err(Error::domain("horizon radius must exceed |z0|"));
        }
        if !(self.bin_width > 0.0 && self.max_time > 0.0 && self.boundary_extent > 0.0) {
            return Err(Error::domain("bin width, max time and boundary extent must be positive"));
        }
        if !(self.return_tol > 0.0 && self.return_tol < 1.0) {
            return Err(Error::domain("return_tol must lie in (0, 1)"));
        }
        if !(self.corner_box >= 0.0 && self.corner_dt > 0.0 && self.corner_dt <= self.dt) {
            return Err(Error::domain("corner refinement needs corner_box >= 0 and 0 < corner_dt <= dt"));
        }
        for g in &self.green_points {
            if !(g[0] > 0.0 && g[1] > 0.0) {
                return Err(Error::domain("green probe points must be interior"));
            }
        }
        Ok(())
    }

    /// Far cut-off per coordinate.
    pub fn far_cutoff(&self, p: &QuadrantParams) -> [f64; 2] {
        let ln = -self.return_tol.ln();
        let mut c = [
            ln * p.s11 / (2.0 * p.mu1),
            ln * p.s22 / (2.0 * p.mu2),
        ];
        let half = 0.5 * self.bin_width;
        let mut reach = [p.a0, p.b0];
        for g in &self.green_points {
            reach[0] = reach[0].max(g[0] + half);
            reach[1] = reach[1].max(g[1] + half);
        }
        c[0] += reach[0];
        c[1] += reach[1];
        c
    }
}

/// Why a path stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    FarField,
    Horizon,
    MaxTime,
}

/// Smallest nonnegative `dl` (by total) with `w + R dl >= 0` and
/// complementarity `dl_i > 0 => (w + R dl)_i = 0`.
pub fn pushback(w: [f64; 2], p: &QuadrantParams) -> Result<[f64; 2]> {
    if w[0] >= 0.0 && w[1] >= 0.0 {
        return Ok([0.0, 0.0]);
    }
    let tol = 1e-12 * (1.0 + w[0].abs() + w[1].abs());
    let mut best: Option<[f64; 2]> = None;
    let mut consider = |dl: [f64; 2]| {
        if best.is_none_or(|b| dl[0] + dl[1] < b[0] + b[1]) {
            best = Some(dl);
        }
    };
    if w[0] < 0.0 {
        let l1 = -w[0] / p.r11;
        if w[1] + p.r21 * l1 >= -tol {
            consider([l1, 0.0]);
        }
    }
    if w[1] < 0.0 {
        let l2 = -w[1] / p.r22;
        if w[0] + p.r12 * l2 >= -tol {
            consider([0.0, l2]);
        }
    }
    let det = p.det_r();
    if det != 0.0 {
        let l1 = (-w[0] * p.r22 + w[1] * p.r12) / det;
        let l2 = (-w[1] * p.r11 + w[0] * p.r21) / det;
        if l1 >= -tol && l2 >= -tol {
            consider([l1.max(0.0), l2.max(0.0)]);
        }
    }
    best.ok_or_else(|| Error::numeric(format!("no feasible pushback for w = {w:?}")))
}

/// One step of the scheme.
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    p: QuadrantParams,
    dt: f64,
    chol: [f64; 3],
    sqdt: f64,
    bridge: bool,
}

impl Stepper {
    pub fn new(p: &QuadrantParams, dt: f64, bridge: bool) -> Self {
        let l11 = p.s11.sqrt();
        let l21 = p.s12 / l11;
        let l22 = (p.s22 - l21 * l21).sqrt();
        Stepper {
            p: *p,
            dt,
            chol: [l11, l21, l22],
            sqdt: dt.sqrt(),
            bridge,
        }
    }

    /// Advance `z` by one step; returns the new point and the local-time increments.
    #[inline]
    pub fn step<R: Rng>(&self, z: [f64; 2], rng: &mut R) -> Result<([f64; 2], [f64; 2])> {
        let p = &self.p;
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        let zf = [
            z[0] + p.mu1 * self.dt + self.sqdt * self.chol[0] * g1,
            z[1] + p.mu2 * self.dt + self.sqdt * (self.chol[1] * g1 + self.chol[2] * g2),
        ];
        let mut w = zf;
        if self.bridge {
            let var = [p.s11 * self.dt, p.s22 * self.dt];
            for i in 0..2 {
                // Crossing probability exp(-2 z z' / var) below 1e-13 is ignored.
                if z[i] > 0.0 && zf[i] > 0.0 && 2.0 * z[i] * zf[i] > 30.0 * var[i] {
                    continue;
                }
                let u: f64 = rng.gen::<f64>();
                let d = zf[i] - z[i];
                let m = 0.5 * (z[i] + zf[i] - (d * d - 2.0 * var[i] * (1.0 - u).ln()).sqrt());
                w[i] = m.min(zf[i]);
            }
        }
        let dl = pushback(w, p)?;
        if dl == [0.0, 0.0] {
            return Ok((zf, dl));
        }
        let zn = [
            (zf[0] + p.r11 * dl[0] + p.r12 * dl[1]).max(0.0),
            (zf[1] + p.r21 * dl[0] + p.r22 * dl[1]).max(0.0),
        ];
        Ok((zn, dl))
    }
}

/// Coarse stepper plus the optional corner refinement.
#[derive(Debug, Clone, Copy)]
struct Steppers {
    coarse: Stepper,
    fine: Stepper,
    corner_box: f64,
}

impl Steppers {
    fn new(p: &QuadrantParams, config: &SimConfig) -> Self {
        Steppers {
            coarse: Stepper::new(p, config.dt, config.bridge_correction),
            fine: Stepper::new(p, config.corner_dt, config.bridge_correction),
            corner_box: config.corner_box,
        }
    }

    #[inline]
    fn at(&self, z: [f64; 2]) -> &Stepper {
        if z[0] < self.corner_box && z[1] < self.corner_box {
            &self.fine
        } else {
            &self.coarse
        }
    }
}

/// A single recorded path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub positions: Vec<[f64; 2]>,
    pub local_time: Vec<[f64; 2]>,
    pub stop: StopReason,
}

/// Random stream of replica `index` under the master `seed`. The state is
/// expanded from an injective mix of the pair by SplitMix64.
pub fn replica_rng(seed: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Simulate one full path until it stops, recording every step.
pub fn simulate_path(p: &QuadrantParams, config: &SimConfig, rng: &mut Xoshiro256PlusPlus) -> Result<PathRecord> {
    let steppers = Steppers::new(p, config);
    let far = config.far_cutoff(p);
    let mut z = [p.a0, p.b0];
    let mut positions = vec![z];
    let mut local_time = Vec::new();
    let mut t = 0.0;
    let stop = loop {
        let stepper = steppers.at(z);
        let (zn, dl) = stepper.step(z, rng)?;
        positions.push(zn);
        local_time.push(dl);
        z = zn;
        t += stepper.dt;
        if let Some(s) = stop_reason(z, t, far, config) {
            break s;
        }
    };
    Ok(PathRecord { positions, local_time, stop })
}

#[inline]
fn stop_reason(z: [f64; 2], t: f64, far: [f64; 2], config: &SimConfig) -> Option<StopReason> {
    if z[0] > far[0] && z[1] > far[1] {
        Some(StopReason::FarField)
    } else if z[0] * z[0] + z[1] * z[1] > config.horizon_radius * config.horizon_radius {
        Some(StopReason::Horizon)
    } else if t >= config.max_time {
        Some(StopReason::MaxTime)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Accumulators

/// Fine histogram along one axis with zeroth, first and second moments of the
/// position relative to the cell centre.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryHist {
    pub width: f64,
    pub mass: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub overflow: f64,
}

pub const BOUNDARY_CELL: f64 = 0.005;

impl BoundaryHist {
    fn new(extent: f64) -> Self {
        let n = (extent / BOUNDARY_CELL).ceil() as usize;
        BoundaryHist {
            width: BOUNDARY_CELL,
            mass: vec![0.0; n],
            m1: vec![0.0; n],
            m2: vec![0.0; n],
            overflow: 0.0,
        }
    }

    #[inline]
    fn add(&mut self, u: f64, w: f64) {
        let k = (u / self.width) as usize;
        if k >= self.mass.len() {
            self.overflow += w;
            return;
        }
        let d = u - (k as f64 + 0.5) * self.width;
        self.mass[k] += w;
        self.m1[k] += w * d;
        self.m2[k] += w * d * d;
    }

    fn merge(&mut self, o: &BoundaryHist) {
        for k in 0..self.mass.len() {
            self.mass[k] += o.mass[k];
            self.m1[k] += o.m1[k];
            self.m2[k] += o.m2[k];
        }
        self.overflow += o.overflow;
    }

    /// `sum_k exp(x u) w_k` with the second-order expansion around each centre.
    pub fn transform(&self, x: C64) -> C64 {
        let step = (x * self.width).exp();
        let mut e = (x * 0.5 * self.width).exp();
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.mass.len() {
            let m = self.mass[k];
            if m != 0.0 {
                acc += e * (m + x * self.m1[k] + 0.5 * x * x * self.m2[k]);
            }
            e *= step;
            if k % 256 == 255 {
                // Re-anchor the recurrence to keep rounding drift bounded.
                e = (x * ((k as f64 + 1.5) * self.width)).exp();
            }
        }
        acc
    }

    /// Cells `a..b` covering `[lo, hi)` with both ends rounded to the grid.
    pub fn cell_range(&self, lo: f64, hi: f64) -> (usize, usize) {
        let b = ((hi / self.width).round().max(0.0) as usize).min(self.mass.len());
        let a = (((lo / self.width).round().max(0.0)) as usize).min(b);
        (a, b)
    }

    /// Mass on `[lo, hi)`, both rounded to the cell grid.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = self.cell_range(lo, hi);
        self.mass[a..b].iter().sum()
    }
}

/// Non-uniform grid of the bulk histogram: `0.1` cells on `[0, 16)`, `0.5` on `[16, 64)`.
pub const BULK_FINE: (f64, usize) = (0.1, 160);
pub const BULK_COARSE: (f64, usize) = (0.5, 96);
const BULK_N: usize = BULK_FINE.1 + BULK_COARSE.1;

#[inline]
fn bulk_index(v: f64) -> (usize, f64) {
    let split = BULK_FINE.0 * BULK_FINE.1 as f64;
    if v < split {
        let k = ((v / BULK_FINE.0) as usize).min(BULK_FINE.1 - 1);
        (k, (k as f64 + 0.5) * BULK_FINE.0)
    } else {
        let k = (((v - split) / BULK_COARSE.0) as usize).min(BULK_COARSE.1 - 1);
        (BULK_FINE.1 + k, split + (k as f64 + 0.5) * BULK_COARSE.0)
    }
}

fn bulk_centres() -> Vec<f64> {
    let split = BULK_FINE.0 * BULK_FINE.1 as f64;
    (0..BULK_N)
        .map(|k| {
            if k < BULK_FINE.1 {
                (k as f64 + 0.5) * BULK_FINE.0
            } else {
                split + ((k - BULK_FINE.1) as f64 + 0.5) * BULK_COARSE.0
            }
        })
        .collect()
}

/// Occupation moments `(W, Mx, My, Mxx, Mxy, Myy)` per cell plus the stop points.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkHist {
    pub cells: Vec<[f64; 6]>,
    pub stops: Vec<[f64; 2]>,
}

impl BulkHist {
    fn new() -> Self {
        BulkHist {
            cells: vec![[0.0; 6]; BULK_N * BULK_N],
            stops: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, z: [f64; 2], w: f64) {
        let (i, cx) = bulk_index(z[0]);
        let (j, cy) = bulk_index(z[1]);
        let dx = z[0] - cx;
        let dy = z[1] - cy;
        let c = &mut self.cells[i * BULK_N + j];
        c[0] += w;
        c[1] += w * dx;
        c[2] += w * dy;
        c[3] += w * dx * dx;
        c[4] += w * dx * dy;
        c[5] += w * dy * dy;
    }

    fn merge(&mut self, o: &BulkHist) {
        for (a, b) in self.cells.iter_mut().zip(&o.cells) {
            for k in 0..6 {
                a[k] += b[k];
            }
        }
        self.stops.extend_from_slice(&o.stops);
    }

    /// Histogram part plus the closed-form remainder after each stop point.
    fn transform(&self, p: &QuadrantParams, x: C64, y: C64) -> C64 {
        let centres = bulk_centres();
        let ex: Vec<C64> = centres.iter().map(|&c| (x * c).exp()).collect();
        let ey: Vec<C64> = centres.iter().map(|&c| (y * c).exp()).collect();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..BULK_N {
            let row = &self.cells[i * BULK_N..(i + 1) * BULK_N];
            let mut racc = C64::new(0.0, 0.0);
            for j in 0..BULK_N {
                let c = &row[j];
                if c[0] == 0.0 {
                    continue;
                }
                let poly = c[0] + x * c[1] + y * c[2] + 0.5 * (x * x * c[3] + 2.0 * x * y * c[4] + y * y * c[5]);
                racc += ey[j] * poly;
            }
            acc += ex[i] * racc;
        }
        let rate = tail_rate(p, x, y);
        for s in &self.stops {
            acc += (x * s[0] + y * s[1]).exp() * rate;
        }
        acc
    }
}

/// `int_0^inf E exp((x, y).(z + mu t + B_t)) dt / exp((x, y).z)` for the free
/// process, `-1 / gamma(x, y)`; where the real part of `gamma` at the real
/// parts is not negative the drift-only value `-1 / (mu . (x, y))` is used.
pub fn tail_rate(p: &QuadrantParams, x: C64, y: C64) -> C64 {
    let gr = kernel::gamma(p, C64::new(x.re, 0.0), C64::new(y.re, 0.0)).re;
    if gr < 0.0 {
        -1.0 / kernel::gamma(p, x, y)
    } else {
        -1.0 / (p.mu1 * x + p.mu2 * y)
    }
}

/// Everything accumulated by one batch of replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchAccum {
    pub n_paths: usize,
    pub green: Vec<f64>,
    /// `[0]`: local time `L1` along the second axis; `[1]`: `L2` along the first.
    pub boundary: [BoundaryHist; 2],
    pub bulk: Option<BulkHist>,
    pub total_local_time: [f64; 2],
    pub touched: usize,
    pub stops: [usize; 3],
    pub steps: u64,
}

impl BatchAccum {
    fn new(config: &SimConfig) -> Self {
        BatchAccum {
            n_paths: 0,
            green: vec![0.0; config.green_points.len()],
            boundary: [BoundaryHist::new(config.boundary_extent), BoundaryHist::new(config.boundary_extent)],
            bulk: config.track_bulk.then(BulkHist::new),
            total_local_time: [0.0; 2],
            touched: 0,
            stops: [0; 3],
            steps: 0,
        }
    }
}

struct PathRunner<'a> {
    p: &'a QuadrantParams,
    config: &'a SimConfig,
    steppers: Steppers,
    far: [f64; 2],
    half: f64,
}

impl<'a> PathRunner<'a> {
    #[inline]
    fn occupy(&self, acc: &mut BatchAccum, z: [f64; 2], w: f64) {
        for (k, g) in self.config.green_points.iter().enumerate() {
            if (z[0] - g[0]).abs() < self.half && (z[1] - g[1]).abs() < self.half {
                acc.green[k] += w;
            }
        }
        if let Some(b) = acc.bulk.as_mut() {
            b.add(z, w);
        }
    }

    fn run(&self, acc: &mut BatchAccum, rng: &mut Xoshiro256PlusPlus) -> Result<()> {
        let mut z = [self.p.a0, self.p.b0];
        let mut t = 0.0;
        let mut touched = false;
        let mut steps = 0u64;
        // Trapezoid weights: each point carries half of each adjacent step.
        let mut dt = self.steppers.at(z).dt;
        self.occupy(acc, z, 0.5 * dt);
        let stop = loop {
            let stepper = self.steppers.at(z);
            if stepper.dt != dt {
                self.occupy(acc, z, 0.5 * (stepper.dt - dt));
                dt = stepper.dt;
            }
            let (zn, dl) = stepper.step(z, rng)?;
            steps += 1;
            if dl[0] > 0.0 {
                acc.boundary[0].add(0.5 * (z[1] + zn[1]), dl[0]);
                acc.total_local_time[0] += dl[0];
                touched = true;
            }
            if dl[1] > 0.0 {
                acc.boundary[1].add(0.5 * (z[0] + zn[0]), dl[1]);
                acc.total_local_time[1] += dl[1];
                touched = true;
            }
            z = zn;
            t += dt;
            self.occupy(acc, z, dt);
            if let Some(s) = stop_reason(z, t, self.far, self.config) {
                break s;
            }
        };
        self.occupy(acc, z, -0.5 * dt);
        if let Some(b) = acc.bulk.as_mut() {
            b.stops.push(z);
        }
        acc.n_paths += 1;
        acc.touched += touched as usize;
        acc.steps += steps;
        acc.stops[match stop {
            StopReason::FarField => 0,
            StopReason::Horizon => 1,
            StopReason::MaxTime => 2,
        }] += 1;
        Ok(())
    }
}

/// Result of a simulation run: one accumulator per batch.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub params: QuadrantParams,
    pub config: SimConfig,
    pub batches: Vec<BatchAccum>,
}

/// Run `config.n_paths` replicas; replica `i` uses stream `i` and feeds batch
/// `i mod BATCHES`, so results do not depend on scheduling.
pub fn run(p: &QuadrantParams, config: &SimConfig) -> Result<SimRun> {
    p.validate()?;
    config.validate(p)?;
    if config.n_paths < BATCHES {
        return Err(Error::domain(format!("n_paths must be at least {BATCHES}")));
    }
    let runner = PathRunner {
        p,
        config,
        steppers: Steppers::new(p, config),
        far: config.far_cutoff(p),
        half: 0.5 * config.bin_width,
    };
    let batches: Result<Vec<BatchAccum>> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut acc = BatchAccum::new(config);
            let mut i = b;
            while i < config.n_paths {
                let mut rng = replica_rng(config.seed, i as u64);
                runner.run(&mut acc, &mut rng)?;
                i += BATCHES;
            }
            Ok(acc)
        })
        .collect();
    Ok(SimRun {
        params: *p,
        config: config.clone(),
        batches: batches?,
    })
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationEstimate {
    pub value: C64,
    pub std_error: f64,
    pub n_paths: usize,
    /// Fraction of paths stopped by `max_time`.
    pub truncated_fraction: f64,
}

impl SimRun {
    fn per_batch(&self, f: impl Fn(&BatchAccum) -> C64) -> Batched {
        Batched::from_fn(|b| {
            let acc = &self.batches[b];
            f(acc) / acc.n_paths as f64
        })
    }

    pub fn n_paths(&self) -> usize {
        self.batches.iter().map(|b| b.n_paths).sum()
    }

    pub fn truncated_fraction(&self) -> f64 {
        self.batches.iter().map(|b| b.stops[2]).sum::<usize>() as f64 / self.n_paths() as f64
    }

    pub fn touched_fraction(&self) -> f64 {
        self.batches.iter().map(|b| b.touched).sum::<usize>() as f64 / self.n_paths() as f64
    }

    /// Fraction of paths stopped by the far cut-off or the horizon radius.
    pub fn escaped_fraction(&self) -> f64 {
        self.batches.iter().map(|b| b.stops[0] + b.stops[1]).sum::<usize>() as f64 / self.n_paths() as f64
    }

    pub fn mean_steps(&self) -> f64 {
        self.batches.iter().map(|b| b.steps).sum::<u64>() as f64 / self.n_paths() as f64
    }

    fn summarize(&self, v: Batched) -> OccupationEstimate {
        OccupationEstimate {
            value: v.mean(),
            std_error: v.se_abs(),
            n_paths: self.n_paths(),
            truncated_fraction: self.truncated_fraction(),
        }
    }

    /// Batched occupation density at a tracked probe point.
    pub fn green(&self, point: [f64; 2]) -> Result<Batched> {
        let k = self
            .config
            .green_points
            .iter()
            .position(|g| (g[0] - point[0]).abs() < 1e-12 && (g[1] - point[1]).abs() < 1e-12)
            .ok_or_else(|| Error::domain(format!("point {point:?} was not tracked")))?;
        let area = self.config.bin_width * self.config.bin_width;
        Ok(self.per_batch(|a| C64::new(a.green[k] / area, 0.0)))
    }

    pub fn estimate_green(&self, point: [f64; 2]) -> Result<OccupationEstimate> {
        Ok(self.summarize(self.green(point)?))
    }

    /// Density of `L^axis` along the other axis, over a cell of width `width` centred at `u`.
    pub fn boundary_density_width(&self, axis: usize, u: f64, width: f64) -> Result<Batched> {
        if !(axis == 1 || axis == 2) {
            return Err(Error::domain("axis must be 1 or 2"));
        }
        if !(u >= 0.0) {
            return Err(Error::domain("boundary abscissa must be nonnegative"));
        }
        Ok(self.boundary_cells(axis, (u - 0.5 * width).max(0.0), u + 0.5 * width)?.1)
    }

    /// Mean density over the histogram cells covering `[lo, hi)`, with the
    /// centre of the covered span.
    pub fn boundary_cells(&self, axis: usize, lo: f64, hi: f64) -> Result<(f64, Batched)> {
        if !(axis == 1 || axis == 2) {
            return Err(Error::domain("axis must be 1 or 2"));
        }
        let hist = &self.batches[0].boundary[axis - 1];
        let (a, b) = hist.cell_range(lo, hi);
        if b == a {
            return Err(Error::domain(format!(
                "[{lo}, {hi}) covers no boundary cell (cell width {}, extent {})",
                hist.width,
                hist.width * hist.mass.len() as f64
            )));
        }
        let (lo, hi) = (a as f64 * hist.width, b as f64 * hist.width);
        let v = self.per_batch(|acc| C64::new(acc.boundary[axis - 1].mass_between(lo, hi) / (hi - lo), 0.0));
        Ok((0.5 * (lo + hi), v))
    }

    pub fn boundary_density(&self, axis: usize, u: f64) -> Result<Batched> {
        self.boundary_density_width(axis, u, self.config.bin_width)
    }

    pub fn estimate_boundary(&self, axis: usize, u: f64) -> Result<OccupationEstimate> {
        Ok(self.summarize(self.boundary_density(axis, u)?))
    }

    /// `E[L^axis_inf]`, `axis` in `{1, 2}`.
    pub fn total_local_time(&self, axis: usize) -> Batched {
        self.per_batch(|a| C64::new(a.total_local_time[axis - 1], 0.0))
    }

    /// `phi1(y)`: local time on the first axis' boundary weighted by `exp(y Z2)`.
    pub fn phi1(&self, y: C64) -> Result<Batched> {
        if !(y.re < 0.0) {
            return Err(Error::domain(format!("phi1 needs Re y < 0, got {y}")));
        }
        Ok(self.per_batch(|a| a.boundary[0].transform(y)))
    }

    pub fn phi2(&self, x: C64) -> Result<Batched> {
        if !(x.re < 0.0) {
            return Err(Error::domain(format!("phi2 needs Re x < 0, got {x}")));
        }
        Ok(self.per_batch(|a| a.boundary[1].transform(x)))
    }

    /// Bulk transform `phi(x, y)`; needs `track_bulk`.
    pub fn phi(&self, x: C64, y: C64) -> Result<Batched> {
        if !(x.re < 0.0 && y.re < 0.0) {
            return Err(Error::domain(format!("phi needs Re x, Re y < 0, got ({x}, {y})")));
        }
        if !self.config.track_bulk {
            return Err(Error::domain("bulk histogram was not tracked"));
        }
        let p = self.params;
        let per: Vec<C64> = self
            .batches
            .par_iter()
            .map(|a| a.bulk.as_ref().expect("tracked").transform(&p, x, y) / a.n_paths as f64)
            .collect();
        Ok(Batched::from_fn(|b| per[b]))
    }

    pub fn estimate_phi(&self, x: C64, y: C64) -> Result<OccupationEstimate> {
        Ok(self.summarize(self.phi(x, y)?))
    }

    pub fn estimate_phi1(&self, y: C64) -> Result<OccupationEstimate> {
        Ok(self.summarize(self.phi1(y)?))
    }

    pub fn estimate_phi2(&self, x: C64) -> Result<OccupationEstimate> {
        Ok(self.summarize(self.phi2(x)?))
    }

    /// Merge all batches into a single accumulator.
    pub fn merged(&self) -> BatchAccum {
        let mut out = BatchAccum::new(&self.config);
        for a in &self.batches {
            out.n_paths += a.n_paths;
            for (g, v) in out.green.iter_mut().zip(&a.green) {
                *g += v;
            }
            out.boundary[0].merge(&a.boundary[0]);
            out.boundary[1].merge(&a.boundary[1]);
            if let (Some(o), Some(b)) = (out.bulk.as_mut(), a.bulk.as_ref()) {
                o.merge(b);
            }
            out.total_local_time[0] += a.total_local_time[0];
            out.total_local_time[1] += a.total_local_time[1];
            out.touched += a.touched;
            for k in 0..3 {
                out.stops[k] += a.stops[k];
            }
            out.steps += a.steps;
        }
        out
    }
}
