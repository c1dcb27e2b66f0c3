use std::fmt;

use thiserror::Error;

/// Finite-sample condition under which an estimator is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Guard {
    /// `S_xy - mu` vanished (denominator of the case-1 slope).
    SxyMinusMuZero { value: f64 },
    /// `S_yy - lambda_theta <= 0` (numerator of the case-1 slope).
    SyyMinusLambdaThetaNonpositive { value: f64 },
    /// `S_xx - theta <= 0` (denominator of the case-2 slope).
    SxxMinusThetaNonpositive { value: f64 },
    /// `S_xy = 0` in the naive ratio `S_yy / S_xy`.
    SxyZero,
    /// `S_xx <= 0` in the naive ratio `S_xy / S_xx`.
    SxxNonpositive { value: f64 },
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::SxyMinusMuZero { value } => write!(f, "S_xy - mu = {value:?} (must be nonzero)"),
            Guard::SyyMinusLambdaThetaNonpositive { value } => {
                write!(f, "S_yy - lambda_theta = {value:?} (must be positive)")
            }
            Guard::SxxMinusThetaNonpositive { value } => {
                write!(f, "S_xx - theta = {value:?} (must be positive)")
            }
            Guard::SxyZero => write!(f, "S_xy = 0 (must be nonzero)"),
            Guard::SxxNonpositive { value } => write!(f, "S_xx = {value:?} (must be positive)"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EivError {
    #[error("input series have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {required} observations, got {actual}")]
    TooFewObservations { required: usize, actual: usize },
    #[error("guard violated: {0}")]
    GuardViolation(Guard),
    #[error("normalizer is zero: {0}")]
    ZeroNormalizer(&'static str),
    #[error("intercept statistics require an unknown intercept (c = 1)")]
    InterceptKnown,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("covariance matrix is not positive definite: lambda_theta * theta - mu^2 = {det:?}")]
    NotPositiveDefinite { det: f64 },
    #[error("undefined: {0}")]
    Undefined(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl EivError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        EivError::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, EivError>;
