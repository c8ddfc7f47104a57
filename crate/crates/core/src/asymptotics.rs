//! Regimes and leading terms of the Green's density as `r -> infinity`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::batch::{Batched, Estimate};
use crate::error::{Error, Result};
use crate::kernel::{self, Branch};
use crate::laplace::{BoundaryTransforms, ContinuedTransform, Swapped};
use crate::model::{ConeParams, PolarPoint, QuadrantParams};
use crate::poles::{self, PoleReport};
use crate::saddle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Interior,
    PoleX,
    PoleY,
    Edge0,
    EdgeBeta,
    TransitionX,
    TransitionY,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::PoleX => "pole_x",
            Regime::PoleY => "pole_y",
            Regime::Edge0 => "edge_0",
            Regime::EdgeBeta => "edge_beta",
            Regime::TransitionX => "transition_x",
            Regime::TransitionY => "transition_y",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

const EQ_TOL: f64 = 1e-9;

/// Regime of the limit direction `alpha0`.
pub fn classify(alpha0: f64, poles: &PoleReport) -> Regime {
    classify_with_window(alpha0, poles, EQ_TOL)
}

/// Regime at a finite point: the transition window is `5 / sqrt(r)`.
pub fn classify_at(r: f64, alpha: f64, poles: &PoleReport) -> Regime {
    classify_with_window(alpha, poles, 5.0 / r.sqrt())
}

fn classify_with_window(alpha: f64, poles: &PoleReport, window: f64) -> Regime {
    let a1 = poles.alpha_star_or_sentinel();
    let a2 = poles.alpha_2star_or_sentinel();
    if (alpha - a1).abs() <= window {
        return Regime::TransitionX;
    }
    if (alpha - a2).abs() <= window {
        return Regime::TransitionY;
    }
    if alpha < a1 {
        return Regime::PoleX;
    }
    if alpha > a2 {
        return Regime::PoleY;
    }
    if alpha.abs() <= EQ_TOL {
        return Regime::Edge0;
    }
    if (alpha - FRAC_PI_2).abs() <= EQ_TOL {
        return Regime::EdgeBeta;
    }
    Regime::Interior
}

/// `sigma11 sin^2 - 2 sigma12 sin cos + sigma22 cos^2`.
fn quad_form(p: &QuadrantParams, alpha: f64) -> f64 {
    saddle::quad_form(p, alpha)
}

/// `C(alpha) = sqrt(sin(alpha) / gamma'_y)` at the saddle.
pub fn c_factor(p: &QuadrantParams, alpha: f64) -> f64 {
    let (x, _) = saddle::saddle_xy(p, alpha);
    (alpha.sin() / kernel::dgamma_y_on_branch(p, C64::new(x, 0.0)).re).sqrt()
}

/// `sqrt(cos(alpha) / gamma'_x)`, the second form of `C(alpha)`.
pub fn c_factor_y(p: &QuadrantParams, alpha: f64) -> f64 {
    let (_, y) = saddle::saddle_xy(p, alpha);
    (alpha.cos() / kernel::dgamma_x_on_branch(p, C64::new(y, 0.0)).re).sqrt()
}

/// `gamma1 phi1(y) + gamma2 phi2(x) + exp(a0 x + b0 y)` on the kernel curve,
/// with `y = Y+(x)` and continued transforms where needed.
fn numerator(p: &QuadrantParams, t: &dyn BoundaryTransforms, x: C64) -> Result<Batched> {
    let cont = ContinuedTransform::new(p, t);
    let y = kernel::y_branch(p, x, Branch::Plus);
    let phi1 = cont.phi1_any(y)?;
    let phi2 = cont.phi2_any(x)?;
    Ok(phi1 * kernel::gamma1(p, x, y) + phi2 * kernel::gamma2(p, x, y) + Batched::splat((p.a0 * x + p.b0 * y).exp()))
}

fn check_pole_window(p: &QuadrantParams, alpha: f64, poles: &PoleReport) -> Result<()> {
    let (x, y) = saddle::saddle_xy(p, alpha);
    if let Some(xs) = poles.x_star {
        if (x - xs).abs() < 1e-6 {
            return Err(Error::numeric(format!("saddle at alpha={alpha} sits on the pole x*")));
        }
    }
    if let Some(ys) = poles.y_2star {
        if (y - ys).abs() < 1e-6 {
            return Err(Error::numeric(format!("saddle at alpha={alpha} sits on the pole y**")));
        }
    }
    Ok(())
}

/// `c0(alpha)`, the constant of the saddle-point term.
pub fn c0(p: &QuadrantParams, t: &dyn BoundaryTransforms, alpha: f64) -> Result<Batched> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::domain(format!("c0 needs alpha in (0, pi/2), got {alpha}")));
    }
    let poles = poles::pole_locations(p)?;
    check_pole_window(p, alpha, &poles)?;
    let (x, _) = saddle::saddle_xy(p, alpha);
    let n = numerator(p, t, C64::new(x, 0.0))?;
    Ok(n * (c_factor(p, alpha) / (2.0 * PI * quad_form(p, alpha)).sqrt()))
}

/// Integrand `f(t)` of the Laplace-type integral `g ~ e^{-r rate} / (2 pi) int f(t) e^{-r t^2} dt`
/// along the descent path.
fn path_integrand(p: &QuadrantParams, t: &dyn BoundaryTransforms, alpha: f64, tt: f64, guess: C64) -> Result<(Batched, C64)> {
    let x = saddle::solve_on_path(p, alpha, tt, guess)?;
    let (_, r_alpha) = saddle::curvature(p, alpha)?;
    let i = C64::new(0.0, 1.0);
    let dx = if tt.abs() < 1e-9 {
        i * r_alpha
    } else {
        -2.0 * tt / saddle::phase_f_dx(p, x, alpha)
    };
    let n = numerator(p, t, x)?;
    Ok((n * (dx / (i * kernel::sqrt_disc(p, x))), x))
}

/// `c1(alpha) = f''(0) / (8 sqrt(pi))`, the `1/r` correction to `c0`, from
/// Richardson-extrapolated central differences along the descent path.
pub fn c1(p: &QuadrantParams, t: &dyn BoundaryTransforms, alpha: f64) -> Result<Batched> {
    let (_, r_alpha) = saddle::curvature(p, alpha)?;
    let (xa, _) = saddle::saddle_xy(p, alpha);
    let x0 = C64::new(xa, 0.0);
    let i = C64::new(0.0, 1.0);
    let (f0, _) = path_integrand(p, t, alpha, 0.0, x0)?;
    let second = |h: f64| -> Result<Batched> {
        let (fp, _) = path_integrand(p, t, alpha, h, x0 + i * r_alpha * h)?;
        let (fm, _) = path_integrand(p, t, alpha, -h, x0 - i * r_alpha * h)?;
        Ok((fp + fm - f0 * 2.0) * (1.0 / (h * h)))
    };
    let h = 0.05 * r_alpha;
    let d1 = second(h)?;
    let d2 = second(0.5 * h)?;
    let d = (d2 * 4.0 - d1) * (1.0 / 3.0);
    Ok(d * (1.0 / (8.0 * PI.sqrt())))
}

/// `cos(alpha) x(alpha) + sin(alpha) y(alpha)`.
pub fn saddle_rate(p: &QuadrantParams, alpha: f64) -> f64 {
    let (x, y) = saddle::saddle_xy(p, alpha);
    alpha.cos() * x + alpha.sin() * y
}

pub fn c_star(p: &QuadrantParams, t: &dyn BoundaryTransforms, poles: &PoleReport) -> Result<Option<Batched>> {
    let Some(xs) = poles.x_star else { return Ok(None) };
    let ym = kernel::y_branch(p, C64::new(xs, 0.0), Branch::Minus);
    let res = poles::residue_phi2(p, xs, t.phi1(ym)?)?;
    Ok(Some(poles::pole_constant_cstar(p, xs, res)))
}

pub fn c_2star(p: &QuadrantParams, t: &dyn BoundaryTransforms, poles: &PoleReport) -> Result<Option<Batched>> {
    let Some(ys) = poles.y_2star else { return Ok(None) };
    let sw = p.swapped();
    let xm = kernel::y_branch(&sw, C64::new(ys, 0.0), Branch::Minus);
    let res = poles::residue_phi1(p, ys, t.phi2(xm)?)?;
    Ok(Some(poles::pole_constant_c2star(p, ys, res)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticResult {
    pub regime: Regime,
    /// Exponential rate per unit `r` (or `rho`).
    pub decay_rate: f64,
    /// Power of `r` in the leading algebraic factor.
    pub prefactor_power: f64,
    pub c0: Option<Estimate>,
    pub c_star: Option<Estimate>,
    pub transition_factor: Option<f64>,
    /// Dominant term at the requested point.
    pub leading: Estimate,
    /// Saddle plus pole terms.
    pub two_term: Estimate,
}

impl AsymptoticResult {
    /// Standard error of the dominant term.
    pub fn se(&self) -> f64 {
        self.leading.se_re.hypot(self.leading.se_im)
    }
}

/// Leading asymptotic term of `g(r cos(alpha), r sin(alpha))`.
pub fn leading_term(p: &QuadrantParams, t: &dyn BoundaryTransforms, r: f64, alpha: f64) -> Result<AsymptoticResult> {
    let poles = poles::pole_locations(p)?;
    let regime = classify_at(r, alpha, &poles);
    match regime {
        Regime::TransitionX | Regime::TransitionY => return transition_term(p, t, r, alpha),
        Regime::Edge0 | Regime::EdgeBeta => {
            return Err(Error::domain("edge directions are handled by edge_expansion"));
        }
        _ => {}
    }
    let rate = saddle_rate(p, alpha);
    let c0v = c0(p, t, alpha)?;
    let saddle_term = c0v * ((-r * rate).exp() / r.sqrt());
    let (pole_const, pole_rate) = match regime {
        Regime::PoleX => {
            let c = c_star(p, t, &poles)?.expect("pole present");
            (Some(c), alpha.cos() * poles.x_star.unwrap() + alpha.sin() * poles.y_star.unwrap())
        }
        Regime::PoleY => {
            let c = c_2star(p, t, &poles)?.expect("pole present");
            (Some(c), alpha.cos() * poles.x_2star.unwrap() + alpha.sin() * poles.y_2star.unwrap())
        }
        _ => (None, rate),
    };
    let (leading, two_term, decay_rate, power) = match pole_const {
        Some(c) => {
            let pole_term = c * (-r * pole_rate).exp();
            (pole_term, pole_term + saddle_term, pole_rate, 0.0)
        }
        None => (saddle_term, saddle_term, rate, -0.5),
    };
    Ok(AsymptoticResult {
        regime,
        decay_rate,
        prefactor_power: power,
        c0: Some(c0v.estimate()),
        c_star: pole_const.map(|c| c.estimate()),
        transition_factor: None,
        leading: leading.estimate(),
        two_term: two_term.estimate(),
    })
}

/// `A(alpha*) = -x'(alpha*) / R(alpha*)`, with `x'` by central differences.
pub fn transition_a(p: &QuadrantParams, alpha_star: f64) -> Result<f64> {
    let h = 1e-4;
    let dx = (saddle::saddle_xy(p, alpha_star + h).0 - saddle::saddle_xy(p, alpha_star - h).0) / (2.0 * h);
    let (_, r) = saddle::curvature(p, alpha_star)?;
    Ok(-dx / r)
}

/// Factor multiplying the pole constant near `alpha*`: `1/2` on the critical
/// direction, `(1 + Phi(sqrt(c) A)) / 2` below and `(1 - Phi(sqrt(c) A)) / 2`
/// above, with `c = r (alpha - alpha*)^2`.
pub fn transition_factor(c: f64, a: f64, below: bool) -> f64 {
    let z = crate::special::phi_real(c.sqrt() * a);
    if c == 0.0 {
        0.5
    } else if below {
        0.5 * (1.0 + z)
    } else {
        0.5 * (1.0 - z)
    }
}

/// Pole term damped by the transition factor, for `alpha` near `alpha*` (or `alpha**`).
pub fn transition_term(p: &QuadrantParams, t: &dyn BoundaryTransforms, r: f64, alpha: f64) -> Result<AsymptoticResult> {
    let poles = poles::pole_locations(p)?;
    let near_x = poles.alpha_star.map(|a| (alpha - a).abs());
    let near_y = poles.alpha_2star.map(|a| (alpha - a).abs());
    let use_x = match (near_x, near_y) {
        (Some(dx), Some(dy)) => dx <= dy,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => return Err(Error::domain("no pole to meet the saddle point")),
    };
    // The second-axis case is the first-axis case of the swapped model.
    let (q, beta_alpha, swapped_t);
    let tr: &dyn BoundaryTransforms = if use_x {
        q = *p;
        beta_alpha = alpha;
        t
    } else {
        q = p.swapped();
        beta_alpha = FRAC_PI_2 - alpha;
        swapped_t = Swapped(t);
        &swapped_t
    };
    let qp = poles::pole_locations(&q)?;
    let (xs, ys, a_star) = (qp.x_star.unwrap(), qp.y_star.unwrap(), qp.alpha_star.unwrap());
    let cst = c_star(&q, tr, &qp)?.expect("pole present");
    let a = transition_a(&q, a_star)?;
    let c = r * (beta_alpha - a_star).powi(2);
    let factor = transition_factor(c, a, beta_alpha < a_star);
    let rate = beta_alpha.cos() * xs + beta_alpha.sin() * ys;
    let pole_term = cst * ((-r * rate).exp() * factor);
    Ok(AsymptoticResult {
        regime: if use_x { Regime::TransitionX } else { Regime::TransitionY },
        decay_rate: rate,
        prefactor_power: 0.0,
        c0: None,
        c_star: Some(cst.estimate()),
        transition_factor: Some(factor),
        leading: pole_term.estimate(),
        two_term: pole_term.estimate(),
    })
}

/// Which of the two edge terms dominates, from `r sin(alpha)` (or `r cos(alpha)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCompetition {
    /// `r sin(alpha) -> 0`: the `c''/r` term.
    SecondDominates,
    /// `r sin(alpha)` bounded away from `0` and infinity: both terms.
    Comparable,
    /// `r sin(alpha) -> infinity`: the `c' alpha` term.
    FirstDominates,
}

pub fn edge_competition(r: f64, angle_to_edge: f64) -> EdgeCompetition {
    let s = r * angle_to_edge.sin();
    if s < 0.1 {
        EdgeCompetition::SecondDominates
    } else if s > 10.0 {
        EdgeCompetition::FirstDominates
    } else {
        EdgeCompetition::Comparable
    }
}

/// `c' = lim c0(alpha) / alpha` at the edge `alpha -> 0` (or of the swapped
/// model at `pi/2`), by Richardson extrapolation from `alpha in {h, 2h, 4h}`.
pub fn edge_c_prime(p: &QuadrantParams, t: &dyn BoundaryTransforms, h: f64) -> Result<Batched> {
    let f = |a: f64| -> Result<Batched> { Ok(c0(p, t, a)? * (1.0 / a)) };
    let (f1, f2, f4) = (f(h)?, f(2.0 * h)?, f(4.0 * h)?);
    let r1 = f1 * 2.0 - f2;
    let r2 = f2 * 2.0 - f4;
    Ok((r1 * 4.0 - r2) * (1.0 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeResult {
    pub c_prime: Estimate,
    pub c_second: Option<f64>,
    pub competition: EdgeCompetition,
    pub rate: f64,
    pub value: Estimate,
}

/// `exp(-r rate) (c' alpha + c''/r) / sqrt(r)` near the edge `alpha = 0`
/// (`near_zero`) or `alpha = pi/2`.
pub fn edge_expansion(
    p: &QuadrantParams,
    t: &dyn BoundaryTransforms,
    r: f64,
    alpha: f64,
    c_second: Option<f64>,
) -> Result<EdgeResult> {
    let poles = poles::pole_locations(p)?;
    let near_zero = alpha < 0.25 * PI;
    if near_zero && poles.exists_x {
        return Err(Error::domain("a pole on the first axis dominates the edge alpha = 0; use leading_term"));
    }
    if !near_zero && poles.exists_y {
        return Err(Error::domain("a pole on the second axis dominates the edge alpha = pi/2; use leading_term"));
    }
    let (q, beta, swapped_t);
    let tr: &dyn BoundaryTransforms = if near_zero {
        q = *p;
        beta = alpha;
        t
    } else {
        q = p.swapped();
        beta = FRAC_PI_2 - alpha;
        swapped_t = Swapped(t);
        &swapped_t
    };
    let cp = edge_c_prime(&q, tr, 0.02)?;
    let rate = saddle_rate(&q, beta);
    let lead = cp * beta + Batched::real(c_second.unwrap_or(0.0) / r);
    let value = lead * ((-r * rate).exp() / r.sqrt());
    Ok(EdgeResult {
        c_prime: cp.estimate(),
        c_second,
        competition: edge_competition(r, beta),
        rate,
        value: value.estimate(),
    })
}

/// `c''` from an oracle value `g` at a point close to the edge.
pub fn fit_c_second(g: f64, r: f64, angle_to_edge: f64, rate: f64, c_prime: f64) -> f64 {
    r * (g * r.sqrt() * (r * rate).exp() - c_prime * angle_to_edge)
}

/// Exponential rates in wedge form.
pub fn cone_interior_rate(cone: &ConeParams, omega: f64) -> f64 {
    2.0 * cone.mu_norm * ((omega - cone.theta) / 2.0).sin().powi(2)
}

/// `|mu| (cos(omega - omega*) - cos(omega - theta))` with `omega* = theta - 2 delta`.
/// Equal to `2 |mu| sin^2(omega + delta - theta)` only at `omega = omega*`.
pub fn cone_pole_x_rate(cone: &ConeParams, omega: f64) -> f64 {
    2.0 * cone.mu_norm * cone.delta.sin() * (cone.theta - cone.delta - omega).sin()
}

/// Same with `omega** = theta + 2 epsilon`.
pub fn cone_pole_y_rate(cone: &ConeParams, omega: f64) -> f64 {
    2.0 * cone.mu_norm * cone.epsilon.sin() * (omega - cone.theta - cone.epsilon).sin()
}

/// Asymptotics at wedge point `(rho, omega)`; exponents are computed both in
/// quadrant form and in closed wedge form and must agree.
pub fn cone_asymptotics(
    cone: &ConeParams,
    t: &dyn BoundaryTransforms,
    rho: f64,
    omega: f64,
) -> Result<AsymptoticResult> {
    let cone = cone.validate()?;
    if !(omega > 0.0 && omega < cone.beta) {
        return Err(Error::domain(format!("omega must lie in (0, beta), got {omega}")));
    }
    let q = cone.to_quadrant();
    let pt = q.polar_from_cone(PolarPoint { radius: rho, angle: omega });
    let mut res = leading_term(&q, t, pt.radius, pt.angle)?;
    let quadrant_exponent = pt.radius * res.decay_rate;
    let wedge_rate = match res.regime {
        Regime::Interior => cone_interior_rate(&cone, omega),
        Regime::PoleX | Regime::TransitionX => cone_pole_x_rate(&cone, omega),
        Regime::PoleY | Regime::TransitionY => cone_pole_y_rate(&cone, omega),
        Regime::Edge0 | Regime::EdgeBeta => unreachable!("edges rejected above"),
    };
    let wedge_exponent = rho * wedge_rate;
    if (quadrant_exponent - wedge_exponent).abs() > 1e-10 * (1.0 + quadrant_exponent.abs()) {
        return Err(Error::numeric(format!(
            "exponent mismatch: quadrant {quadrant_exponent:.15e} vs wedge {wedge_exponent:.15e}"
        )));
    }
    res.decay_rate = wedge_rate;
    let s = q.green_to_cone(1.0);
    let scale = |e: Estimate| Estimate { value: e.value * s, se_re: e.se_re * s, se_im: e.se_im * s };
    res.leading = scale(res.leading);
    res.two_term = scale(res.two_term);
    Ok(res)
}
