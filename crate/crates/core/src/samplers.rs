//! Generators for the structural model
//!
//! ```text
//! y_i = β ξ_i + α + δ_i,    x_i = ξ_i + ε_i
//! ```
//!
//! with ξ in the domain of attraction of the normal law (finite or infinite
//! variance) and `(δ, ε)` mean-zero with covariance `Γ = [[λθ, μ], [μ, θ]]`,
//! independent of ξ.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Latent};
use crate::error::{EivError, Result};
use crate::moments::InterceptFlag;
use crate::rng::{Role, StreamKey};

/// Law of the latent explanatory variable.
///
/// The two tail-exponent-2 families have infinite variance but stay in the
/// domain of attraction of the normal law; heavier tails would leave it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum XiDistribution {
    Normal {
        mean: f64,
        sd: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    /// `Exp(rate) − 1/rate`.
    CenteredExponential {
        rate: f64,
    },
    /// `shift + scale · T` with `T` Student-t on 2 degrees of freedom.
    StudentT2 {
        scale: f64,
        shift: f64,
    },
    /// `shift ± R` with `P(R > t) = (scale/t)²` for `t ≥ scale`, random sign.
    SymmetricPareto2 {
        scale: f64,
        shift: f64,
    },
}

impl XiDistribution {
    pub fn validate(&self) -> Result<()> {
        let (name, spread, others): (&str, f64, &[f64]) = match self {
            XiDistribution::Normal { mean, sd } => ("sd", *sd, std::slice::from_ref(mean)),
            XiDistribution::Uniform { a, b } => ("b - a", b - a, std::slice::from_ref(a)),
            XiDistribution::CenteredExponential { rate } => ("rate", *rate, &[]),
            XiDistribution::StudentT2 { scale, shift } | XiDistribution::SymmetricPareto2 { scale, shift } => {
                ("scale", *scale, std::slice::from_ref(shift))
            }
        };
        if !(spread > 0.0 && spread.is_finite()) || others.iter().any(|v| !v.is_finite()) {
            return Err(EivError::invalid(format!(
                "explanatory distribution must be nondegenerate with finite parameters ({name} = {spread})"
            )));
        }
        Ok(())
    }

    pub fn var_finite(&self) -> bool {
        !matches!(self, XiDistribution::StudentT2 { .. } | XiDistribution::SymmetricPareto2 { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            XiDistribution::Normal { mean, .. } => mean,
            XiDistribution::Uniform { a, b } => 0.5 * (a + b),
            XiDistribution::CenteredExponential { .. } => 0.0,
            XiDistribution::StudentT2 { shift, .. } | XiDistribution::SymmetricPareto2 { shift, .. } => shift,
        }
    }

    /// `Var ξ`, `+∞` for the heavy-tailed families.
    pub fn variance(&self) -> f64 {
        match *self {
            XiDistribution::Normal { sd, .. } => sd * sd,
            XiDistribution::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            XiDistribution::CenteredExponential { rate } => 1.0 / (rate * rate),
            _ => f64::INFINITY,
        }
    }

    /// Fourth central moment, `+∞` when it does not exist.
    pub fn fourth_central_moment(&self) -> f64 {
        match *self {
            XiDistribution::Normal { sd, .. } => 3.0 * sd.powi(4),
            XiDistribution::Uniform { a, b } => (b - a).powi(4) / 80.0,
            XiDistribution::CenteredExponential { rate } => 9.0 / rate.powi(4),
            _ => f64::INFINITY,
        }
    }

    pub fn second_moment(&self) -> f64 {
        self.variance() + self.mean() * self.mean()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            XiDistribution::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            XiDistribution::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            XiDistribution::CenteredExponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                (e - 1.0) / rate
            }
            XiDistribution::StudentT2 { scale, shift } => {
                // chi-square(2)/2 is a unit exponential
                let z: f64 = StandardNormal.sample(rng);
                let e: f64 = Exp1.sample(rng);
                shift + scale * z / e.sqrt()
            }
            XiDistribution::SymmetricPareto2 { scale, shift } => {
                let u = 1.0 - rng.random::<f64>();
                let r = scale / u.sqrt();
                if rng.random::<bool>() {
                    shift + r
                } else {
                    shift - r
                }
            }
        }
    }
}

pub fn sample_xi<R: Rng + ?Sized>(dist: &XiDistribution, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    dist.validate()?;
    if n == 0 {
        return Err(EivError::invalid("sample size must be at least 1"));
    }
    Ok((0..n).map(|_| dist.draw(rng)).collect())
}

/// Standardized base law of the error pair before the covariance factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorBase {
    Gaussian,
    ScaledUniform,
}

impl ErrorBase {
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            ErrorBase::Gaussian => StandardNormal.sample(rng),
            ErrorBase::ScaledUniform => 3f64.sqrt() * (2.0 * rng.random::<f64>() - 1.0),
        }
    }
}

/// Covariance of `(δ, ε)`: `Var δ = λθ`, `Var ε = θ`, `cov = μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub lambda_theta: f64,
    pub theta: f64,
    pub mu: f64,
    pub base: ErrorBase,
}

impl ErrorSpec {
    pub fn new(lambda_theta: f64, theta: f64, mu: f64, base: ErrorBase) -> Result<Self> {
        let spec = ErrorSpec { lambda_theta, theta, mu, base };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let det = self.lambda_theta * self.theta - self.mu * self.mu;
        if !(self.lambda_theta > 0.0 && self.theta > 0.0 && det > 0.0) || !det.is_finite() {
            return Err(EivError::NotPositiveDefinite { det });
        }
        Ok(())
    }

    /// Lower-triangular factor `L` with `L Lᵀ = Γ`, as `(l11, l21, l22)`.
    fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.lambda_theta.sqrt();
        let l21 = self.mu / l11;
        let l22 = (self.theta - l21 * l21).sqrt();
        (l11, l21, l22)
    }
}

pub fn sample_errors<R: Rng + ?Sized>(err: &ErrorSpec, n: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
    err.validate()?;
    let (l11, l21, l22) = err.cholesky();
    let mut delta = Vec::with_capacity(n);
    let mut epsilon = Vec::with_capacity(n);
    for _ in 0..n {
        let a = err.base.draw(rng);
        let b = err.base.draw(rng);
        delta.push(l11 * a);
        epsilon.push(l21 * a + l22 * b);
    }
    Ok((delta, epsilon))
}

/// Ground truth for simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub beta: f64,
    pub alpha: f64,
    pub c: InterceptFlag,
    pub xi: XiDistribution,
    pub err: ErrorSpec,
}

impl ModelSpec {
    pub fn new(beta: f64, alpha: f64, c: InterceptFlag, xi: XiDistribution, err: ErrorSpec) -> Result<Self> {
        let spec = ModelSpec { beta, alpha, c, xi, err };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.alpha.is_finite()) {
            return Err(EivError::invalid("beta and alpha must be finite"));
        }
        if !self.c.is_unknown() && self.alpha != 0.0 {
            return Err(EivError::invalid("alpha must be 0 when the intercept is known to be zero"));
        }
        self.xi.validate()?;
        self.err.validate()
    }

    /// `β = 2, α = 1`, unknown intercept, `ξ ~ N(0, 1)`, `λθ = θ = 0.25`,
    /// `μ = 0.05`, Gaussian errors.
    pub fn reference() -> Self {
        ModelSpec {
            beta: 2.0,
            alpha: 1.0,
            c: InterceptFlag::Unknown,
            xi: XiDistribution::Normal { mean: 0.0, sd: 1.0 },
            err: ErrorSpec { lambda_theta: 0.25, theta: 0.25, mu: 0.05, base: ErrorBase::Gaussian },
        }
    }

    pub fn with_xi(&self, xi: XiDistribution) -> Self {
        ModelSpec { xi, ..self.clone() }
    }
}

pub fn simulate_dataset(spec: &ModelSpec, n: usize, seed: u64) -> Result<Dataset> {
    simulate_with_key(spec, n, StreamKey::new(seed))
}

/// Simulate from an explicit stream key; ξ and the errors use disjoint streams.
pub fn simulate_with_key(spec: &ModelSpec, n: usize, key: StreamKey) -> Result<Dataset> {
    spec.validate()?;
    let xi = sample_xi(&spec.xi, n, &mut key.rng(Role::Xi))?;
    let (delta, epsilon) = sample_errors(&spec.err, n, &mut key.rng(Role::Errors))?;
    let y = xi.iter().zip(&delta).map(|(xi, d)| spec.beta * xi + spec.alpha + d).collect();
    let x = xi.iter().zip(&epsilon).map(|(xi, e)| xi + e).collect();
    Dataset::with_latent(y, x, Latent { xi, delta, epsilon })
}
