//! Sample means and the cross-product terms every estimator is built from.
//!
//! For series `u`, `v` and intercept flag `c`:
//!
//! ```text
//! s_{i,uv} = (u_i - c*mean(u)) * (v_i - c*mean(v)),    S_uv = mean(s_{i,uv})
//! ```
//!
//! All sums run left to right with Neumaier compensation so repeated runs are
//! bit-identical and heavy-tailed magnitudes do not swamp small terms.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{EivError, Result};

/// Whether the intercept is known to be zero (`c = 0`) or unknown (`c = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InterceptFlag {
    KnownZero,
    Unknown,
}

impl InterceptFlag {
    pub fn from_c(c: u8) -> Result<Self> {
        match c {
            0 => Ok(InterceptFlag::KnownZero),
            1 => Ok(InterceptFlag::Unknown),
            other => Err(EivError::invalid(format!("intercept flag must be 0 or 1, got {other}"))),
        }
    }

    pub fn from_unknown(unknown: bool) -> Self {
        if unknown {
            InterceptFlag::Unknown
        } else {
            InterceptFlag::KnownZero
        }
    }

    /// The numeric `c` used in the centering.
    pub fn c(self) -> f64 {
        match self {
            InterceptFlag::KnownZero => 0.0,
            InterceptFlag::Unknown => 1.0,
        }
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, InterceptFlag::Unknown)
    }
}

/// Running sum with Neumaier's compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated left-to-right sum.
pub fn sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Compensated arithmetic mean. `NaN` for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    sum(values.iter().copied()) / values.len() as f64
}

/// Compensated sum of squares.
pub fn sum_sq(values: &[f64]) -> f64 {
    sum(values.iter().map(|v| v * v))
}

/// Compensated sum of squared deviations from the mean.
pub fn centered_sum_sq(values: &[f64]) -> f64 {
    let m = mean(values);
    sum(values.iter().map(|v| (v - m) * (v - m)))
}

/// Means, per-observation cross products and their average for one pair of series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossMomentSummary {
    pub u_bar: f64,
    pub v_bar: f64,
    pub s_terms: Vec<f64>,
    #[serde(rename = "S")]
    pub s: f64,
}

pub fn cross_moment_summary(u: &[f64], v: &[f64], c: InterceptFlag) -> Result<CrossMomentSummary> {
    if u.len() != v.len() {
        return Err(EivError::LengthMismatch { left: u.len(), right: v.len() });
    }
    if u.is_empty() {
        return Err(EivError::TooFewObservations { required: 1, actual: 0 });
    }
    let u_bar = mean(u);
    let v_bar = mean(v);
    let s_terms = cross_terms(u, v, u_bar, v_bar, c);
    let s = mean(&s_terms);
    Ok(CrossMomentSummary { u_bar, v_bar, s_terms, s })
}

fn cross_terms(u: &[f64], v: &[f64], u_bar: f64, v_bar: f64, c: InterceptFlag) -> Vec<f64> {
    match c {
        InterceptFlag::KnownZero => u.iter().zip(v).map(|(a, b)| a * b).collect(),
        InterceptFlag::Unknown => u.iter().zip(v).map(|(a, b)| (a - u_bar) * (b - v_bar)).collect(),
    }
}

/// All second-order cross products of a dataset, computed once and shared by
/// the estimators, residual constructions and intervals.
#[derive(Debug, Clone)]
pub struct SampleMoments {
    pub n: usize,
    pub c: InterceptFlag,
    pub x_bar: f64,
    pub y_bar: f64,
    pub s_xx: Vec<f64>,
    pub s_xy: Vec<f64>,
    pub s_yy: Vec<f64>,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
}

impl SampleMoments {
    pub fn new(data: &Dataset, c: InterceptFlag) -> Result<Self> {
        let (x, y) = (data.x(), data.y());
        if x.len() != y.len() {
            return Err(EivError::LengthMismatch { left: y.len(), right: x.len() });
        }
        if x.is_empty() {
            return Err(EivError::TooFewObservations { required: 1, actual: 0 });
        }
        let x_bar = mean(x);
        let y_bar = mean(y);
        let s_xx = cross_terms(x, x, x_bar, x_bar, c);
        let s_xy = cross_terms(x, y, x_bar, y_bar, c);
        let s_yy = cross_terms(y, y, y_bar, y_bar, c);
        Ok(SampleMoments {
            n: x.len(),
            c,
            x_bar,
            y_bar,
            sxx: mean(&s_xx),
            sxy: mean(&s_xy),
            syy: mean(&s_yy),
            s_xx,
            s_xy,
            s_yy,
        })
    }

    pub fn require(&self, required: usize) -> Result<()> {
        if self.n < required {
            Err(EivError::TooFewObservations { required, actual: self.n })
        } else {
            Ok(())
        }
    }
}
