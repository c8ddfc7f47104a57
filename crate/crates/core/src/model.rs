//! Model parameters in quadrant and wedge coordinates and the linear map
//! between them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Reflected Brownian motion in the quadrant: covariance, drift, reflection
/// matrix (columns `R1 = (r11, r21)`, `R2 = (r12, r22)`) and start point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantParams {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
    pub a0: f64,
    pub b0: f64,
}

/// The same process seen in a wedge of opening `beta` with identity covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub mu_norm: f64,
    pub z0: [f64; 2],
}

/// Polar coordinates `(r, alpha)` in the quadrant or `(rho, omega)` in the wedge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub radius: f64,
    pub angle: f64,
}

/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];

impl QuadrantParams {
    pub fn det_sigma(&self) -> f64 {
        self.s11 * self.s22 - self.s12 * self.s12
    }

    pub fn det_r(&self) -> f64 {
        self.r11 * self.r22 - self.r12 * self.r21
    }

    /// Check every invariant and return the parameters unchanged.
    pub fn validate(self) -> Result<Self, ModelError> {
        let fields = [
            ("sigma", self.s11),
            ("sigma", self.s12),
            ("sigma", self.s22),
            ("mu", self.mu1),
            ("mu", self.mu2),
            ("refl", self.r11),
            ("refl", self.r12),
            ("refl", self.r21),
            ("refl", self.r22),
            ("z0", self.a0),
            ("z0", self.b0),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if !(self.s11 > 0.0 && self.s22 > 0.0 && self.det_sigma() > 0.0) {
            return Err(ModelError::NotPositiveDefinite {
                s11: self.s11,
                s12: self.s12,
                s22: self.s22,
            });
        }
        let completely_s = self.r11 > 0.0
            && self.r22 > 0.0
            && (self.det_r() > 0.0 || (self.r12 > 0.0 && self.r21 > 0.0));
        if !completely_s {
            return Err(ModelError::NotCompletelyS {
                r11: self.r11,
                r12: self.r12,
                r21: self.r21,
                r22: self.r22,
            });
        }
        if !(self.mu1 > 0.0 && self.mu2 > 0.0) {
            return Err(ModelError::NonPositiveDrift(self.mu1, self.mu2));
        }
        if !(self.a0 >= 0.0 && self.b0 >= 0.0) {
            return Err(ModelError::StartOutsideQuadrant(self.a0, self.b0));
        }
        Ok(self)
    }

    /// Exchange the roles of the two coordinates. Every quantity attached to
    /// the first axis of the swapped model is the second-axis quantity of `self`.
    pub fn swapped(&self) -> Self {
        QuadrantParams {
            s11: self.s22,
            s12: self.s12,
            s22: self.s11,
            mu1: self.mu2,
            mu2: self.mu1,
            r11: self.r22,
            r12: self.r21,
            r21: self.r12,
            r22: self.r11,
            a0: self.b0,
            b0: self.a0,
        }
    }

    /// Angle of the drift vector in the quadrant.
    pub fn drift_angle(&self) -> f64 {
        self.mu2.atan2(self.mu1)
    }

    /// Wedge opening angle `arccos(-s12 / sqrt(s11 s22))`.
    pub fn beta(&self) -> f64 {
        (-self.s12 / (self.s11 * self.s22).sqrt()).clamp(-1.0, 1.0).acos()
    }

    /// Linear map `T` with `T Sigma T^t = Id`.
    pub fn cone_transform(&self) -> Mat2 {
        let beta = self.beta();
        let (sb, cb) = beta.sin_cos();
        let d1 = 1.0 / self.s11.sqrt();
        let d2 = 1.0 / self.s22.sqrt();
        [[d1 / sb, cb / sb * d2], [0.0, d2]]
    }

    pub fn to_cone(&self) -> (ConeParams, Mat2) {
        let beta = self.beta();
        let sb = beta.sin();
        let cb = beta.cos();
        let ratio = (self.s22 / self.s11).sqrt();
        let angle = |num_ratio: f64, scale: f64| sb.atan2(num_ratio * scale + cb);
        let delta = angle(self.r12 / self.r22, ratio);
        let epsilon = angle(self.r21 / self.r11, 1.0 / ratio);
        let theta = angle(self.mu1 / self.mu2, ratio);
        let t = self.cone_transform();
        let mt = apply(&t, [self.mu1, self.mu2]);
        let cone = ConeParams {
            beta,
            delta,
            epsilon,
            theta,
            mu_norm: mt[0].hypot(mt[1]),
            z0: apply(&t, [self.a0, self.b0]),
        };
        (cone, t)
    }

    /// Quadrant polar point to wedge polar point.
    pub fn polar_to_cone(&self, p: PolarPoint) -> PolarPoint {
        let beta = self.beta();
        let (sa, ca) = p.angle.sin_cos();
        let ratio = (self.s22 / self.s11).sqrt();
        let omega = (beta.sin() * sa).atan2(ratio * ca + beta.cos() * sa);
        let t = self.cone_transform();
        let z = apply(&t, [p.radius * ca, p.radius * sa]);
        PolarPoint {
            radius: z[0].hypot(z[1]),
            angle: omega,
        }
    }

    /// Wedge polar point back to quadrant polar point.
    pub fn polar_from_cone(&self, p: PolarPoint) -> PolarPoint {
        let t = self.cone_transform();
        let z = apply(&inverse(&t), [p.radius * p.angle.cos(), p.radius * p.angle.sin()]);
        PolarPoint {
            radius: z[0].hypot(z[1]),
            angle: z[1].atan2(z[0]),
        }
    }

    /// Wedge angle of the direction `alpha` of the quadrant.
    pub fn omega_of_alpha(&self, alpha: f64) -> f64 {
        self.polar_to_cone(PolarPoint { radius: 1.0, angle: alpha }).angle
    }

    pub fn alpha_of_omega(&self, omega: f64) -> f64 {
        self.polar_from_cone(PolarPoint { radius: 1.0, angle: omega }).angle
    }

    /// Green density of the wedge process at `Tz` from the quadrant density at `z`.
    pub fn green_to_cone(&self, g_quadrant: f64) -> f64 {
        self.det_sigma().sqrt() * g_quadrant
    }

    pub fn green_from_cone(&self, g_cone: f64) -> f64 {
        g_cone / self.det_sigma().sqrt()
    }

    /// The exponent `lambda = (delta + epsilon - pi) / beta`.
    pub fn lambda(&self) -> f64 {
        self.to_cone().0.lambda()
    }
}

impl ConeParams {
    pub fn validate(self) -> Result<Self, ModelError> {
        let all = [self.beta, self.delta, self.epsilon, self.theta, self.mu_norm, self.z0[0], self.z0[1]];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("cone"));
        }
        let bad = |m: &str| Err(ModelError::InvalidCone(m.to_string()));
        if !(self.beta > 0.0 && self.beta < PI) {
            return bad("beta must lie in (0, pi)");
        }
        if !(self.theta > 0.0 && self.theta < self.beta) {
            return bad("theta must lie in (0, beta)");
        }
        if !(self.delta > 0.0 && self.delta < PI && self.epsilon > 0.0 && self.epsilon < PI) {
            return bad("reflection angles must lie in (0, pi)");
        }
        if !(self.delta + self.epsilon < self.beta + PI) {
            return bad("delta + epsilon must be smaller than beta + pi");
        }
        if !(self.mu_norm > 0.0) {
            return bad("drift magnitude must be positive");
        }
        let (sb, cb) = self.beta.sin_cos();
        if self.z0[1] < 0.0 || self.z0[1] * cb > self.z0[0] * sb + 1e-12 * self.z0[0].hypot(self.z0[1]) {
            return bad("start point outside the wedge");
        }
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        (self.delta + self.epsilon - PI) / self.beta
    }

    /// Quadrant model with covariance `[[1, -cos beta], [-cos beta, 1]]` and
    /// unit diagonal reflection entries mapping back onto `self`.
    pub fn to_quadrant(&self) -> QuadrantParams {
        let (sb, cb) = self.beta.sin_cos();
        let t: Mat2 = [[1.0 / sb, cb / sb], [0.0, 1.0]];
        let ti = inverse(&t);
        let mu = apply(&ti, [self.mu_norm * self.theta.cos(), self.mu_norm * self.theta.sin()]);
        let z0 = apply(&ti, self.z0);
        QuadrantParams {
            s11: 1.0,
            s12: -cb,
            s22: 1.0,
            mu1: mu[0],
            mu2: mu[1],
            r11: 1.0,
            r12: sb / self.delta.tan() - cb,
            r21: sb / self.epsilon.tan() - cb,
            r22: 1.0,
            a0: z0[0].max(0.0),
            b0: z0[1].max(0.0),
        }
    }
}

pub fn apply(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn inverse(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrantDoc {
    pub sigma: [f64; 3],
    pub mu: [f64; 2],
    pub refl: [f64; 4],
    pub z0: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDoc {
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub mu_norm: f64,
    pub z0: [f64; 2],
}

impl From<&QuadrantParams> for QuadrantDoc {
    fn from(p: &QuadrantParams) -> Self {
        QuadrantDoc {
            sigma: [p.s11, p.s12, p.s22],
            mu: [p.mu1, p.mu2],
            refl: [p.r11, p.r12, p.r21, p.r22],
            z0: [p.a0, p.b0],
        }
    }
}

impl From<&QuadrantDoc> for QuadrantParams {
    fn from(d: &QuadrantDoc) -> Self {
        QuadrantParams {
            s11: d.sigma[0],
            s12: d.sigma[1],
            s22: d.sigma[2],
            mu1: d.mu[0],
            mu2: d.mu[1],
            r11: d.refl[0],
            r12: d.refl[1],
            r21: d.refl[2],
            r22: d.refl[3],
            a0: d.z0[0],
            b0: d.z0[1],
        }
    }
}

impl From<&ConeParams> for ConeDoc {
    fn from(c: &ConeParams) -> Self {
        ConeDoc {
            beta: c.beta,
            delta: c.delta,
            epsilon: c.epsilon,
            theta: c.theta,
            mu_norm: c.mu_norm,
            z0: c.z0,
        }
    }
}

/// Either form of model document.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelInput {
    Quadrant(QuadrantParams),
    Cone(ConeParams),
}

impl ModelInput {
    /// Quadrant form of the model (wedge documents are mapped through
    /// [`ConeParams::to_quadrant`]).
    pub fn quadrant(&self) -> QuadrantParams {
        match self {
            ModelInput::Quadrant(q) => *q,
            ModelInput::Cone(c) => c.to_quadrant(),
        }
    }
}

pub fn parse_quadrant(text: &str) -> Result<QuadrantParams, ModelError> {
    let doc: QuadrantDoc = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    QuadrantParams::from(&doc).validate()
}

pub fn parse_cone(text: &str) -> Result<ConeParams, ModelError> {
    let d: ConeDoc = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    ConeParams {
        beta: d.beta,
        delta: d.delta,
        epsilon: d.epsilon,
        theta: d.theta,
        mu_norm: d.mu_norm,
        z0: d.z0,
    }
    .validate()
}

/// Parse a quadrant or wedge document, chosen by its keys.
pub fn parse_model(text: &str) -> Result<ModelInput, ModelError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ModelError::Parse("expected a JSON object".into()))?;
    if obj.contains_key("sigma") {
        parse_quadrant(text).map(ModelInput::Quadrant)
    } else if obj.contains_key("beta") {
        let cone = parse_cone(text)?;
        cone.to_quadrant().validate()?;
        Ok(ModelInput::Cone(cone))
    } else {
        Err(ModelError::Parse("document has neither `sigma` nor `beta`".into()))
    }
}

pub fn to_json(p: &QuadrantParams) -> String {
    serde_json::to_string(&QuadrantDoc::from(p)).expect("plain numeric document")
}

/// Reference model P1: identity covariance and reflection, drift (1,1), start (1,1).
pub fn reference_p1() -> QuadrantParams {
    QuadrantParams {
        s11: 1.0,
        s12: 0.0,
        s22: 1.0,
        mu1: 1.0,
        mu2: 1.0,
        r11: 1.0,
        r12: 0.0,
        r21: 0.0,
        r22: 1.0,
        a0: 1.0,
        b0: 1.0,
    }
}

/// Reference model P2: P1 with `r12 = 3`, which gives `phi_2` a pole.
pub fn reference_p2() -> QuadrantParams {
    QuadrantParams { r12: 3.0, ..reference_p1() }
}
