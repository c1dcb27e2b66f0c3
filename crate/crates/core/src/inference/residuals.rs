//! Per-observation residual terms behind the pivots.
//!
//! Slope terms for hypothesized (or estimated) `b`:
//!
//! ```text
//! case 1: u_i = (s_{i,yy} − λθ) − b (s_{i,xy} − μ),   U = S_xy − μ
//! case 2: u_i = (s_{i,xy} − μ)  − b (s_{i,xx} − θ),   U = S_xx − θ
//! ```
//!
//! Intercept terms: `v_i = (y_i − a) − b x_i − (x̄/U) u_i`.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{EivError, Result};
use crate::estimators::{estimate_from_moments, Case, Identification, PointEstimate, SideInfo};
use crate::moments::{mean, SampleMoments};

/// True parameters versus the estimator's own plug-in value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ResidualKind {
    KnownBeta(f64),
    PlugIn,
}

/// Parameters for the intercept terms: true `(β, α)` or plug-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InterceptKind {
    Known { beta: f64, alpha: f64 },
    PlugIn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeResiduals {
    pub case: Case,
    pub kind: ResidualKind,
    pub beta_used: f64,
    /// `U(j, n)`.
    pub u: f64,
    pub terms: Vec<f64>,
    pub term_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterceptResiduals {
    pub case: Case,
    pub kind: InterceptKind,
    pub terms: Vec<f64>,
    pub term_mean: f64,
}

/// `U(j, n)` for the case in `side`.
pub(crate) fn big_u(m: &SampleMoments, side: &SideInfo) -> f64 {
    match side.ident {
        Identification::Case1 { mu, .. } => m.sxy - mu,
        Identification::Case2 { theta, .. } => m.sxx - theta,
    }
}

/// `(a_i, b_i)` pairs such that `u_i = a_i − β b_i`.
pub(crate) fn slope_parts(m: &SampleMoments, side: &SideInfo) -> (Vec<f64>, Vec<f64>) {
    match side.ident {
        Identification::Case1 { lambda_theta, mu } => {
            (m.s_yy.iter().map(|s| s - lambda_theta).collect(), m.s_xy.iter().map(|s| s - mu).collect())
        }
        Identification::Case2 { theta, mu } => {
            (m.s_xy.iter().map(|s| s - mu).collect(), m.s_xx.iter().map(|s| s - theta).collect())
        }
    }
}

pub(crate) fn slope_terms(m: &SampleMoments, side: &SideInfo, beta: f64) -> Vec<f64> {
    let (a, b) = slope_parts(m, side);
    a.iter().zip(&b).map(|(a, b)| a - beta * b).collect()
}

pub fn slope_residuals(data: &Dataset, side: &SideInfo, kind: ResidualKind) -> Result<SlopeResiduals> {
    let m = SampleMoments::new(data, side.c)?;
    slope_residuals_from(&m, side, kind)
}

pub(crate) fn slope_residuals_from(m: &SampleMoments, side: &SideInfo, kind: ResidualKind) -> Result<SlopeResiduals> {
    m.require(2)?;
    let beta_used = match kind {
        ResidualKind::KnownBeta(beta) => beta,
        ResidualKind::PlugIn => estimate_from_moments(m, side)?.beta_hat,
    };
    let terms = slope_terms(m, side, beta_used);
    let term_mean = mean(&terms);
    Ok(SlopeResiduals { case: side.case(), kind, beta_used, u: big_u(m, side), terms, term_mean })
}

pub fn intercept_residuals(data: &Dataset, side: &SideInfo, kind: InterceptKind) -> Result<InterceptResiduals> {
    let m = SampleMoments::new(data, side.c)?;
    let est = estimate_from_moments(&m, side)?;
    intercept_residuals_from(&m, data, side, &est, kind)
}

pub(crate) fn intercept_residuals_from(
    m: &SampleMoments,
    data: &Dataset,
    side: &SideInfo,
    est: &PointEstimate,
    kind: InterceptKind,
) -> Result<InterceptResiduals> {
    if !side.c.is_unknown() {
        return Err(EivError::InterceptKnown);
    }
    // The plug-in terms drop α: only their centered sums are ever used.
    let (beta, alpha) = match kind {
        InterceptKind::Known { beta, alpha } => (beta, alpha),
        InterceptKind::PlugIn => (est.beta_hat, 0.0),
    };
    let u = big_u(m, side);
    let ratio = m.x_bar / u;
    let slope = slope_terms(m, side, beta);
    let terms: Vec<f64> =
        data.y().iter().zip(data.x()).zip(&slope).map(|((y, x), r)| (y - alpha) - beta * x - ratio * r).collect();
    let term_mean = mean(&terms);
    Ok(InterceptResiduals { case: side.case(), kind, terms, term_mean })
}
