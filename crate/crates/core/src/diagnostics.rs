//! Empirical diagnostics for membership in the domain of attraction of the
//! normal law, and a distance-to-normal gauge for pivot samples.

use serde::{Deserialize, Serialize};

use crate::error::{EivError, Result};
use crate::moments::{centered_sum_sq, sum, sum_sq};
use crate::normal::normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub n: usize,
    pub obrien_ratio: f64,
    pub empirical_bn: Option<f64>,
    pub selfnorm_stat: Option<f64>,
    pub ks_distance: Option<f64>,
}

/// `max z_i² / Σ z_i²`; tends to 0 for samples in the domain of attraction.
pub fn obrien_ratio(z: &[f64]) -> Result<f64> {
    let total = sum_sq(z);
    if z.is_empty() || total == 0.0 {
        return Err(EivError::Undefined("max-over-sum ratio of an all-zero sample"));
    }
    let max = z.iter().map(|v| v * v).fold(0.0, f64::max);
    Ok(max / total)
}

/// `√(Σ(z_i − z̄)²)`, the plug-in normalizer of centered partial sums.
pub fn empirical_bn(z: &[f64]) -> Result<f64> {
    if z.len() < 2 {
        return Err(EivError::TooFewObservations { required: 2, actual: z.len() });
    }
    Ok(centered_sum_sq(z).sqrt())
}

/// `Σ(z_i − a) / √(Σ(z_i − a)²)`.
pub fn selfnorm_sum(z: &[f64], a: f64) -> Result<f64> {
    let den = sum(z.iter().map(|v| (v - a) * (v - a)));
    if den == 0.0 {
        return Err(EivError::ZeroNormalizer("every observation equals the centering constant"));
    }
    Ok(sum(z.iter().map(|v| v - a)) / den.sqrt())
}

/// Exact `sup_t |F_n(t) − Φ(t)|` over the jump points of the empirical CDF.
pub fn ks_distance_to_normal(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(EivError::TooFewObservations { required: 1, actual: 0 });
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(EivError::invalid("KS distance of a sample containing NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        // Ties: F_n jumps once, over the whole run.
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let phi = normal_cdf(sorted[i]);
        let before = i as f64 / n;
        let after = (j + 1) as f64 / n;
        d = d.max((after - phi).abs()).max((phi - before).abs());
        i = j + 1;
    }
    Ok(d)
}

pub fn diagnose(z: &[f64], center: f64) -> Result<DiagnosticReport> {
    Ok(DiagnosticReport {
        n: z.len(),
        obrien_ratio: obrien_ratio(z)?,
        empirical_bn: empirical_bn(z).ok(),
        selfnorm_stat: selfnorm_sum(z, center).ok(),
        ks_distance: ks_distance_to_normal(z).ok(),
    })
}
