use thiserror::Error;

/// Why a model was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("covariance is not positive definite (s11={s11}, s12={s12}, s22={s22})")]
    NotPositiveDefinite { s11: f64, s12: f64, s22: f64 },
    #[error("reflection matrix is not completely-S (r11={r11}, r12={r12}, r21={r21}, r22={r22})")]
    NotCompletelyS { r11: f64, r12: f64, r21: f64, r22: f64 },
    #[error("drift must be positive in both coordinates, got ({0}, {1})")]
    NonPositiveDrift(f64, f64),
    #[error("start point ({0}, {1}) lies outside the closed quadrant")]
    StartOutsideQuadrant(f64, f64),
    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),
    #[error("invalid wedge parameters: {0}")]
    InvalidCone(String),
    #[error("malformed model document: {0}")]
    Parse(String),
}

/// Library-wide error. The variants map onto the CLI exit-code classes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("truncation failure: {0}")]
    Truncation(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
}

impl Error {
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Model(_) | Error::Domain(_) => 2,
            Error::Numeric(_) => 3,
            Error::Truncation(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
