//! Studentized and self-normalized pivots for slope and intercept.
//!
//! Slope numerators use `n·U·(β̂ − β) = n·ū(β)`, which holds exactly in exact
//! arithmetic and needs only the residual mean at the hypothesized `β`.

use serde::{Deserialize, Serialize};

use super::residuals::{intercept_residuals_from, slope_residuals_from, InterceptKind, ResidualKind};
use crate::data::Dataset;
use crate::error::{EivError, Result};
use crate::estimators::{estimate_from_moments, SideInfo};
use crate::moments::{centered_sum_sq, sum_sq, SampleMoments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeVariant {
    /// `√n·U(β̂−β) / √(Σ(u_i−ū)²/(n−1))`.
    Studentized,
    /// `n·U(β̂−β) / √(Σu_i²)`.
    SelfNormalized,
    /// `n·U(β̂−β) / √(Σũ_i²)`, fully data-based normalizer.
    SelfNormalizedPlugIn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterceptVariant {
    /// Normalizer from `v_i` at the true `(β, α)`.
    Known,
    /// Normalizer from the plug-in `ṽ_i`.
    PlugIn,
}

pub fn slope_statistic(data: &Dataset, side: &SideInfo, variant: SlopeVariant, beta: f64) -> Result<f64> {
    let m = SampleMoments::new(data, side.c)?;
    slope_statistic_from(&m, side, variant, beta)
}

pub(crate) fn slope_statistic_from(
    m: &SampleMoments,
    side: &SideInfo,
    variant: SlopeVariant,
    beta: f64,
) -> Result<f64> {
    m.require(2)?;
    estimate_from_moments(m, side)?;
    let n = m.n as f64;
    let known = slope_residuals_from(m, side, ResidualKind::KnownBeta(beta))?;
    let (numerator, den_sq) = match variant {
        SlopeVariant::Studentized => (n.sqrt() * known.term_mean, centered_sum_sq(&known.terms) / (n - 1.0)),
        SlopeVariant::SelfNormalized => (n * known.term_mean, sum_sq(&known.terms)),
        SlopeVariant::SelfNormalizedPlugIn => {
            let plug = slope_residuals_from(m, side, ResidualKind::PlugIn)?;
            (n * known.term_mean, sum_sq(&plug.terms))
        }
    };
    if den_sq == 0.0 {
        return Err(EivError::ZeroNormalizer("slope residual sum of squares"));
    }
    Ok(numerator / den_sq.sqrt())
}

/// Intercept pivot `√n(α̂ − α) / √(Σ(v_i − v̄)²/(n−1))`. `beta` is the true
/// slope and is required for [`InterceptVariant::Known`] only.
pub fn intercept_statistic(
    data: &Dataset,
    side: &SideInfo,
    variant: InterceptVariant,
    alpha: f64,
    beta: Option<f64>,
) -> Result<f64> {
    let m = SampleMoments::new(data, side.c)?;
    intercept_statistic_from(&m, data, side, variant, alpha, beta)
}

pub(crate) fn intercept_statistic_from(
    m: &SampleMoments,
    data: &Dataset,
    side: &SideInfo,
    variant: InterceptVariant,
    alpha: f64,
    beta: Option<f64>,
) -> Result<f64> {
    if !side.c.is_unknown() {
        return Err(EivError::InterceptKnown);
    }
    m.require(2)?;
    let est = estimate_from_moments(m, side)?;
    let kind = match variant {
        InterceptVariant::Known => {
            let beta =
                beta.ok_or_else(|| EivError::invalid("the known-parameter intercept pivot needs the true slope"))?;
            InterceptKind::Known { beta, alpha }
        }
        InterceptVariant::PlugIn => InterceptKind::PlugIn,
    };
    let v = intercept_residuals_from(m, data, side, &est, kind)?;
    let n = m.n as f64;
    let den_sq = centered_sum_sq(&v.terms) / (n - 1.0);
    if den_sq == 0.0 {
        return Err(EivError::ZeroNormalizer("intercept residual sum of squares"));
    }
    let alpha_hat = est.alpha_hat.expect("unknown intercept yields an intercept estimate");
    Ok(n.sqrt() * (alpha_hat - alpha) / den_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::InterceptFlag;

    fn bent() -> Dataset {
        Dataset::new(vec![1.0, 3.0, 6.0], vec![0.0, 1.0, 2.0]).unwrap()
    }

    fn line() -> Dataset {
        Dataset::new(vec![1.0, 3.0, 5.0], vec![0.0, 1.0, 2.0]).unwrap()
    }

    fn side2() -> SideInfo {
        SideInfo::case2(0.0, 0.0, InterceptFlag::Unknown).unwrap()
    }

    fn rel(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * b.abs()
    }

    #[test]
    fn slope_pivots_by_hand() {
        let t = slope_statistic(&bent(), &side2(), SlopeVariant::Studentized, 2.0).unwrap();
        assert!(rel(t, 3f64.sqrt()));
        let t = slope_statistic(&bent(), &side2(), SlopeVariant::SelfNormalized, 2.0).unwrap();
        assert!(rel(t, 3.0 / 5f64.sqrt()));
        // n·U(β̂−β) = 1, Σũ² = 1/18
        let t = slope_statistic(&bent(), &side2(), SlopeVariant::SelfNormalizedPlugIn, 2.0).unwrap();
        assert!(rel(t, 18f64.sqrt()));
    }

    #[test]
    fn perfect_line_has_zero_normalizer() {
        for v in [SlopeVariant::Studentized, SlopeVariant::SelfNormalized, SlopeVariant::SelfNormalizedPlugIn] {
            assert!(matches!(slope_statistic(&line(), &side2(), v, 2.0), Err(EivError::ZeroNormalizer(_))));
        }
        assert!(matches!(
            intercept_statistic(&line(), &side2(), InterceptVariant::Known, 1.0, Some(2.0)),
            Err(EivError::ZeroNormalizer(_))
        ));
    }

    #[test]
    fn guard_violation_propagates() {
        let flat = Dataset::new(vec![1.0, 2.0, 4.0], vec![1.0; 3]).unwrap();
        assert!(matches!(
            slope_statistic(&flat, &side2(), SlopeVariant::Studentized, 1.0),
            Err(EivError::GuardViolation(_))
        ));
    }

    #[test]
    fn known_intercept_pivot_needs_beta() {
        assert!(intercept_statistic(&bent(), &side2(), InterceptVariant::Known, 1.0, None).is_err());
    }

    #[test]
    fn intercept_plugin_by_hand() {
        // α̂ = 10/3 − 2.5 = 5/6; ṽ = (1.25, 0.5, 0.75), Σ(ṽ−ṽ̄)² = 7/24
        let t = intercept_statistic(&bent(), &side2(), InterceptVariant::PlugIn, 1.0, None).unwrap();
        let want = 3f64.sqrt() * (5.0 / 6.0 - 1.0) / (7.0 / 48.0f64).sqrt();
        assert!(rel(t, want), "{t} vs {want}");
    }
}
