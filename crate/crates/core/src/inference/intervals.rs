//! Large-sample confidence intervals.
//!
//! * plug-in slope interval: `β̂ ∓ z·√(Σũ_i²)/(n·U)`
//! * intercept interval: `α̂ ∓ z·√(Σ(ṽ_i − ṽ̄)²)/√(n(n−1))`
//! * quadratic slope interval (case 1): the set `{β : |pivot(β)| ≤ z}` for the
//!   Studentized (`k = 1`) or self-normalized (`k = 2`) pivot, which is the
//!   region where a quadratic in `β` is nonpositive. It is a bounded interval
//!   only when that quadratic opens upward and has real roots.

use serde::{Deserialize, Serialize};

use super::residuals::{big_u, intercept_residuals_from, slope_residuals_from, InterceptKind, ResidualKind};
use crate::data::Dataset;
use crate::error::{EivError, Result};
use crate::estimators::{estimate_from_moments, Case, Identification, SideInfo};
use crate::moments::{centered_sum_sq, sum, sum_sq, SampleMoments};
use crate::normal::{critical_value, normal_cdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalFamily {
    SlopePlugIn,
    Intercept,
    SlopeQuadratic,
}

/// Which pivot the quadratic interval inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadraticVariant {
    /// `k = 1`: Studentized pivot, `f = n(n−1)`, sample-centered terms.
    Studentized,
    /// `k = 2`: self-normalized pivot, `f = n²`, terms centered at the known moments.
    SelfNormalized,
}

impl QuadraticVariant {
    pub fn k(self) -> u8 {
        match self {
            QuadraticVariant::Studentized => 1,
            QuadraticVariant::SelfNormalized => 2,
        }
    }

    pub fn from_k(k: u8) -> Result<Self> {
        match k {
            1 => Ok(QuadraticVariant::Studentized),
            2 => Ok(QuadraticVariant::SelfNormalized),
            other => Err(EivError::invalid(format!("quadratic variant k must be 1 or 2, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    None,
    NegativeDiscriminant,
    NonpositiveLeadingCoeff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub center: f64,
    /// `None` when the interval is degenerate.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Nominal coverage `1 − γ`.
    pub level: f64,
    pub z: f64,
    pub family: IntervalFamily,
    pub k: Option<u8>,
    pub degeneracy: Degeneracy,
}

impl IntervalEstimate {
    fn symmetric(center: f64, half_width: f64, z: f64, family: IntervalFamily) -> Self {
        IntervalEstimate {
            center,
            lower: Some(center - half_width),
            upper: Some(center + half_width),
            level: level_of(z),
            z,
            family,
            k: None,
            degeneracy: Degeneracy::None,
        }
    }

    pub fn contains(&self, value: f64) -> Option<bool> {
        Some(self.lower? <= value && value <= self.upper?)
    }

    pub fn width(&self) -> Option<f64> {
        Some(self.upper? - self.lower?)
    }

    pub fn is_degenerate(&self) -> bool {
        self.degeneracy != Degeneracy::None
    }
}

fn level_of(z: f64) -> f64 {
    2.0 * normal_cdf(z) - 1.0
}

fn check_z(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(EivError::invalid(format!("critical value must be finite and >= 0, got {z}")))
    }
}

pub fn ci_slope_plugin(data: &Dataset, side: &SideInfo, gamma: f64) -> Result<IntervalEstimate> {
    ci_slope_plugin_at(data, side, critical_value(gamma)?)
}

/// Plug-in slope interval for an explicit critical value `z ≥ 0`.
pub fn ci_slope_plugin_at(data: &Dataset, side: &SideInfo, z: f64) -> Result<IntervalEstimate> {
    let m = SampleMoments::new(data, side.c)?;
    plugin_from(&m, side, z)
}

pub(crate) fn plugin_from(m: &SampleMoments, side: &SideInfo, z: f64) -> Result<IntervalEstimate> {
    check_z(z)?;
    let plug = slope_residuals_from(m, side, ResidualKind::PlugIn)?;
    let half = z * sum_sq(&plug.terms).sqrt() / (m.n as f64 * plug.u).abs();
    Ok(IntervalEstimate::symmetric(plug.beta_used, half, z, IntervalFamily::SlopePlugIn))
}

pub fn ci_intercept(data: &Dataset, side: &SideInfo, gamma: f64) -> Result<IntervalEstimate> {
    ci_intercept_at(data, side, critical_value(gamma)?)
}

pub fn ci_intercept_at(data: &Dataset, side: &SideInfo, z: f64) -> Result<IntervalEstimate> {
    let m = SampleMoments::new(data, side.c)?;
    intercept_from(&m, data, side, z)
}

pub(crate) fn intercept_from(m: &SampleMoments, data: &Dataset, side: &SideInfo, z: f64) -> Result<IntervalEstimate> {
    check_z(z)?;
    if !side.c.is_unknown() {
        return Err(EivError::InterceptKnown);
    }
    let est = estimate_from_moments(m, side)?;
    let v = intercept_residuals_from(m, data, side, &est, InterceptKind::PlugIn)?;
    let n = m.n as f64;
    let half = z * centered_sum_sq(&v.terms).sqrt() / (n * (n - 1.0)).sqrt();
    let alpha_hat = est.alpha_hat.expect("unknown intercept yields an intercept estimate");
    Ok(IntervalEstimate::symmetric(alpha_hat, half, z, IntervalFamily::Intercept))
}

/// Coefficients of the quadratic `Q(β) = A β² − 2·H β + C` whose nonpositive
/// set is the acceptance region, together with the quarter discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub f: f64,
    pub leading: f64,
    /// `H = f·U²·β̂ − z²·Σ a_i b_i`, the root midpoint times `A`.
    pub half_linear: f64,
    pub constant: f64,
    /// `D` with `D/4 = H² − A·C`.
    pub discriminant: f64,
    pub beta_hat: f64,
}

pub(crate) fn quadratic_coefficients(
    m: &SampleMoments,
    side: &SideInfo,
    variant: QuadraticVariant,
    z: f64,
) -> Result<QuadraticCoefficients> {
    let Identification::Case1 { lambda_theta, mu } = side.ident else {
        return Err(EivError::invalid("the quadratic slope interval is defined under case-1 side information"));
    };
    check_z(z)?;
    let est = estimate_from_moments(m, side)?;
    let n = m.n as f64;
    let (f, g_yy, g_xy) = match variant {
        QuadraticVariant::Studentized => (n * (n - 1.0), m.syy, m.sxy),
        QuadraticVariant::SelfNormalized => (n * n, lambda_theta, mu),
    };
    let a: Vec<f64> = m.s_yy.iter().map(|s| s - g_yy).collect();
    let b: Vec<f64> = m.s_xy.iter().map(|s| s - g_xy).collect();
    let saa = sum_sq(&a);
    let sbb = sum_sq(&b);
    let sab = sum(a.iter().zip(&b).map(|(a, b)| a * b));
    let beta_hat = est.beta_hat;
    let resid = sum(a.iter().zip(&b).map(|(a, b)| {
        let r = a - beta_hat * b;
        r * r
    }));
    let u = big_u(m, side);
    let fu2 = f * u * u;
    let z2 = z * z;
    let leading = fu2 - z2 * sbb;
    let half_linear = fu2 * beta_hat - z2 * sab;
    let constant = fu2 * beta_hat * beta_hat - z2 * saa;
    let discriminant = 4.0 * z2 * fu2 * resid - 4.0 * z2 * z2 * (saa * sbb - sab * sab);
    Ok(QuadraticCoefficients { f, leading, half_linear, constant, discriminant, beta_hat })
}

pub fn ci_slope_quadratic(
    data: &Dataset,
    side: &SideInfo,
    variant: QuadraticVariant,
    gamma: f64,
) -> Result<IntervalEstimate> {
    ci_slope_quadratic_at(data, side, variant, critical_value(gamma)?)
}

pub fn ci_slope_quadratic_at(
    data: &Dataset,
    side: &SideInfo,
    variant: QuadraticVariant,
    z: f64,
) -> Result<IntervalEstimate> {
    let m = SampleMoments::new(data, side.c)?;
    quadratic_from(&m, side, variant, z)
}

pub(crate) fn quadratic_from(
    m: &SampleMoments,
    side: &SideInfo,
    variant: QuadraticVariant,
    z: f64,
) -> Result<IntervalEstimate> {
    let q = quadratic_coefficients(m, side, variant, z)?;
    // Written negated so a NaN coefficient counts as degenerate.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let degeneracy = if !(q.leading > 0.0) {
        Degeneracy::NonpositiveLeadingCoeff
    } else if !(q.discriminant >= 0.0) {
        Degeneracy::NegativeDiscriminant
    } else {
        Degeneracy::None
    };
    let (lower, upper) = if degeneracy == Degeneracy::None {
        let root = (q.discriminant / 4.0).sqrt();
        (Some((q.half_linear - root) / q.leading), Some((q.half_linear + root) / q.leading))
    } else {
        (None, None)
    };
    debug_assert_eq!(side.case(), Case::Case1);
    Ok(IntervalEstimate {
        center: q.beta_hat,
        lower,
        upper,
        level: level_of(z),
        z,
        family: IntervalFamily::SlopeQuadratic,
        k: Some(variant.k()),
        degeneracy,
    })
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

    const U: InterceptFlag = InterceptFlag::Unknown;

    #[test]
    fn plugin_by_hand() {
        let side = SideInfo::case2(0.0, 0.0, U).unwrap();
        let ci = ci_slope_plugin(&bent(), &side, 0.05).unwrap();
        // half width z·√(1/18)/(n·U) with n·U = 3·(2/3) = 2
        let z = 1.959963984540054;
        let half = z * (1.0f64 / 18.0).sqrt() / 2.0;
        assert!((ci.center - 2.5).abs() < 1e-15);
        assert!((ci.lower.unwrap() - (2.5 - half)).abs() < 1e-12);
        assert!((ci.upper.unwrap() - (2.5 + half)).abs() < 1e-12);
        assert!((ci.lower.unwrap() - 2.269016).abs() < 1e-6);
        assert!((ci.upper.unwrap() - 2.730984).abs() < 1e-6);
        assert!((ci.level - 0.95).abs() < 1e-12);
    }

    #[test]
    fn perfect_line_zero_width() {
        let side = SideInfo::case2(0.0, 0.0, U).unwrap();
        let ci = ci_slope_plugin(&line(), &side, 0.05).unwrap();
        assert_eq!(ci.width(), Some(0.0));
        assert!((ci.center - 2.0).abs() < 1e-15);
        let ci = ci_intercept(&line(), &side, 0.05).unwrap();
        assert_eq!(ci.width(), Some(0.0));
        assert!((ci.center - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_critical_value_collapses() {
        let side = SideInfo::case2(0.0, 0.0, U).unwrap();
        let ci = ci_slope_plugin_at(&bent(), &side, 0.0).unwrap();
        assert_eq!(ci.width(), Some(0.0));
        let ci = ci_intercept_at(&bent(), &side, 0.0).unwrap();
        assert_eq!(ci.lower, Some(ci.center));
        assert_eq!(ci.upper, Some(ci.center));
    }

    #[test]
    fn intercept_by_hand() {
        let side = SideInfo::case2(0.0, 0.0, U).unwrap();
        let ci = ci_intercept_at(&bent(), &side, 2.0).unwrap();
        let half = 2.0 * (7.0f64 / 24.0).sqrt() / 6f64.sqrt();
        assert!((ci.center - 5.0 / 6.0).abs() < 1e-14);
        assert!((ci.width().unwrap() - 2.0 * half).abs() < 1e-14);
        assert!(ci_intercept(&bent(), &side.with_c(InterceptFlag::KnownZero), 0.05).is_err());
    }

    #[test]
    fn quadratic_zero_z_is_singleton() {
        let side = SideInfo::case1(0.0, 0.0, U).unwrap();
        for v in [QuadraticVariant::Studentized, QuadraticVariant::SelfNormalized] {
            let ci = ci_slope_quadratic_at(&bent(), &side, v, 0.0).unwrap();
            assert_eq!(ci.degeneracy, Degeneracy::None);
            assert!((ci.lower.unwrap() - 38.0 / 15.0).abs() < 1e-14);
            assert!((ci.upper.unwrap() - 38.0 / 15.0).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_nonpositive_leading_coefficient() {
        // A = (150 − 38 z²)/9 for this dataset: nonpositive once z² ≥ 150/38.
        let side = SideInfo::case1(0.0, 0.0, U).unwrap();
        let m = SampleMoments::new(&bent(), U).unwrap();
        let q = quadratic_coefficients(&m, &side, QuadraticVariant::Studentized, 2.5).unwrap();
        assert!((q.leading - (150.0 - 38.0 * 6.25) / 9.0).abs() < 1e-12);
        let ci = ci_slope_quadratic(&bent(), &side, QuadraticVariant::Studentized, 0.01).unwrap();
        assert_eq!(ci.degeneracy, Degeneracy::NonpositiveLeadingCoeff);
        assert!(ci.lower.is_none() && ci.upper.is_none());
        let ci = ci_slope_quadratic_at(&bent(), &side, QuadraticVariant::Studentized, 1.9).unwrap();
        assert_eq!(ci.degeneracy, Degeneracy::None);
    }

    #[test]
    fn quadratic_requires_case1() {
        let side = SideInfo::case2(0.0, 0.0, U).unwrap();
        assert!(ci_slope_quadratic(&bent(), &side, QuadraticVariant::Studentized, 0.05).is_err());
    }
}
