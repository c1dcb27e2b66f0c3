//! Modified least-squares estimators of slope and intercept, the naive ratio
//! estimators, and the population reliability ratio.
//!
//! Case 1 knows `Var δ = λθ` and `cov(δ, ε) = μ`:
//! `β̂₁ = (S_yy − λθ)/(S_xy − μ)`. Case 2 knows `Var ε = θ` and `μ`:
//! `β̂₂ = (S_xy − μ)/(S_xx − θ)`. With an unknown intercept `α̂ = ȳ − x̄·β̂`.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{EivError, Guard, Result};
use crate::moments::{InterceptFlag, SampleMoments};
use crate::samplers::ModelSpec;

/// Which identifiability assumption is in force; also selects the estimator
/// family `j` (case 1 ↔ `β̂₁`, case 2 ↔ `β̂₂`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Case1,
    Case2,
}

impl Case {
    pub fn j(self) -> u8 {
        match self {
            Case::Case1 => 1,
            Case::Case2 => 2,
        }
    }

    pub fn from_j(j: u8) -> Result<Self> {
        match j {
            1 => Ok(Case::Case1),
            2 => Ok(Case::Case2),
            other => Err(EivError::invalid(format!("case must be 1 or 2, got {other}"))),
        }
    }
}

/// Known error moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Identification {
    Case1 { lambda_theta: f64, mu: f64 },
    Case2 { theta: f64, mu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInfo {
    pub ident: Identification,
    pub c: InterceptFlag,
}

impl SideInfo {
    pub fn case1(lambda_theta: f64, mu: f64, c: InterceptFlag) -> Result<Self> {
        check_variance("lambda_theta", lambda_theta)?;
        check_finite("mu", mu)?;
        Ok(SideInfo { ident: Identification::Case1 { lambda_theta, mu }, c })
    }

    pub fn case2(theta: f64, mu: f64, c: InterceptFlag) -> Result<Self> {
        check_variance("theta", theta)?;
        check_finite("mu", mu)?;
        Ok(SideInfo { ident: Identification::Case2 { theta, mu }, c })
    }

    pub fn case(&self) -> Case {
        match self.ident {
            Identification::Case1 { .. } => Case::Case1,
            Identification::Case2 { .. } => Case::Case2,
        }
    }

    pub fn mu(&self) -> f64 {
        match self.ident {
            Identification::Case1 { mu, .. } | Identification::Case2 { mu, .. } => mu,
        }
    }

    pub fn with_c(self, c: InterceptFlag) -> Self {
        SideInfo { c, ..self }
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(EivError::invalid(format!("{name} must be finite, got {v}")))
    }
}

fn check_variance(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v < 0.0 {
        return Err(EivError::invalid(format!("{name} is a variance and must be >= 0, got {v}")));
    }
    Ok(())
}

/// Guard quantities evaluated while estimating; unused entries are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GuardValues {
    pub sxy_minus_mu: Option<f64>,
    pub syy_minus_lambda_theta: Option<f64>,
    pub sxx_minus_theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub beta_hat: f64,
    pub alpha_hat: Option<f64>,
    pub case: Case,
    pub guards: GuardValues,
}

/// Estimate with whichever family `side` selects.
pub fn estimate(data: &Dataset, side: &SideInfo) -> Result<PointEstimate> {
    let m = SampleMoments::new(data, side.c)?;
    estimate_from_moments(&m, side)
}

pub fn estimate_case1(data: &Dataset, side: &SideInfo) -> Result<PointEstimate> {
    if side.case() != Case::Case1 {
        return Err(EivError::invalid("estimate_case1 needs case-1 side information"));
    }
    estimate(data, side)
}

pub fn estimate_case2(data: &Dataset, side: &SideInfo) -> Result<PointEstimate> {
    if side.case() != Case::Case2 {
        return Err(EivError::invalid("estimate_case2 needs case-2 side information"));
    }
    estimate(data, side)
}

pub(crate) fn estimate_from_moments(m: &SampleMoments, side: &SideInfo) -> Result<PointEstimate> {
    m.require(2)?;
    let (beta_hat, guards) = match side.ident {
        Identification::Case1 { lambda_theta, mu } => {
            let den = m.sxy - mu;
            let num = m.syy - lambda_theta;
            let guards =
                GuardValues { sxy_minus_mu: Some(den), syy_minus_lambda_theta: Some(num), ..GuardValues::default() };
            if den == 0.0 {
                return Err(EivError::GuardViolation(Guard::SxyMinusMuZero { value: den }));
            }
            if num <= 0.0 || num.is_nan() {
                return Err(EivError::GuardViolation(Guard::SyyMinusLambdaThetaNonpositive { value: num }));
            }
            (num / den, guards)
        }
        Identification::Case2 { theta, mu } => {
            let den = m.sxx - theta;
            let guards = GuardValues { sxx_minus_theta: Some(den), ..GuardValues::default() };
            if den <= 0.0 || den.is_nan() {
                return Err(EivError::GuardViolation(Guard::SxxMinusThetaNonpositive { value: den }));
            }
            ((m.sxy - mu) / den, guards)
        }
    };
    let alpha_hat = side.c.is_unknown().then_some(m.y_bar - m.x_bar * beta_hat);
    Ok(PointEstimate { beta_hat, alpha_hat, case: side.case(), guards })
}

/// The identification-free ratio estimators `S_yy/S_xy` (a) and `S_xy/S_xx` (b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveEstimates {
    pub beta_a: f64,
    pub beta_b: f64,
    pub alpha_a: Option<f64>,
    pub alpha_b: Option<f64>,
}

/// Which naive ratio to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaiveRatio {
    YyOverXy,
    XyOverXx,
}

pub fn naive_ratio(data: &Dataset, c: InterceptFlag, which: NaiveRatio) -> Result<(f64, Option<f64>)> {
    let m = SampleMoments::new(data, c)?;
    naive_from_moments(&m, which)
}

fn naive_from_moments(m: &SampleMoments, which: NaiveRatio) -> Result<(f64, Option<f64>)> {
    m.require(2)?;
    let beta = match which {
        NaiveRatio::YyOverXy => {
            if m.sxy == 0.0 {
                return Err(EivError::GuardViolation(Guard::SxyZero));
            }
            m.syy / m.sxy
        }
        NaiveRatio::XyOverXx => {
            if m.sxx <= 0.0 {
                return Err(EivError::GuardViolation(Guard::SxxNonpositive { value: m.sxx }));
            }
            m.sxy / m.sxx
        }
    };
    Ok((beta, m.c.is_unknown().then_some(m.y_bar - m.x_bar * beta)))
}

/// Both naive estimators; fails if either denominator vanishes.
pub fn naive_ratio_estimates(data: &Dataset, c: InterceptFlag) -> Result<NaiveEstimates> {
    let m = SampleMoments::new(data, c)?;
    let (beta_b, alpha_b) = naive_from_moments(&m, NaiveRatio::XyOverXx)?;
    let (beta_a, alpha_a) = naive_from_moments(&m, NaiveRatio::YyOverXy)?;
    Ok(NaiveEstimates { beta_a, beta_b, alpha_a, alpha_b })
}

/// Population reliability ratio `k_ξ = (Eξ² − c(Eξ)²) / (Eξ² − c(Eξ)² + Var ε)`,
/// taken to be 1 when `Var ξ = ∞`. Assumes `E(δε) = 0`; `spec.err.mu` is not used.
pub fn reliability_ratio(spec: &ModelSpec, c: InterceptFlag) -> Result<f64> {
    let xi = &spec.xi;
    if !xi.var_finite() {
        return Ok(1.0);
    }
    let m1 = xi.mean();
    let signal = xi.second_moment() - c.c() * m1 * m1;
    if signal <= 0.0 {
        return Err(EivError::Undefined("reliability ratio of a degenerate explanatory variable"));
    }
    Ok(signal / (signal + spec.err.theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{ErrorBase, ErrorSpec, XiDistribution};
    use proptest::prelude::*;

    fn line() -> Dataset {
        Dataset::new(vec![1.0, 3.0, 5.0], vec![0.0, 1.0, 2.0]).unwrap()
    }

    fn bent() -> Dataset {
        Dataset::new(vec![1.0, 3.0, 6.0], vec![0.0, 1.0, 2.0]).unwrap()
    }

    fn rel(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * b.abs().max(1e-300)
    }

    const U: InterceptFlag = InterceptFlag::Unknown;

    #[test]
    fn case1_perfect_line() {
        let est = estimate_case1(&line(), &SideInfo::case1(0.0, 0.0, U).unwrap()).unwrap();
        assert!(rel(est.beta_hat, 2.0));
        assert!(rel(est.alpha_hat.unwrap(), 1.0));
        assert!(rel(est.guards.sxy_minus_mu.unwrap(), 4.0 / 3.0));
        assert!(rel(est.guards.syy_minus_lambda_theta.unwrap(), 8.0 / 3.0));
    }

    #[test]
    fn case1_guards() {
        let err = estimate_case1(&line(), &SideInfo::case1(0.0, 4.0 / 3.0, U).unwrap()).unwrap_err();
        assert!(matches!(err, EivError::GuardViolation(Guard::SxyMinusMuZero { .. })));

        let syy = SampleMoments::new(&line(), U).unwrap().syy;
        let err = estimate_case1(&line(), &SideInfo::case1(syy, 0.0, U).unwrap()).unwrap_err();
        assert!(matches!(err, EivError::GuardViolation(Guard::SyyMinusLambdaThetaNonpositive { .. })));

        let err = estimate_case1(&line(), &SideInfo::case1(8.0 / 3.0, 0.0, U).unwrap()).unwrap_err();
        assert!(matches!(err, EivError::GuardViolation(Guard::SyyMinusLambdaThetaNonpositive { .. })));
    }

    #[test]
    fn case2_perfect_line_and_guards() {
        let est = estimate_case2(&line(), &SideInfo::case2(0.0, 0.0, U).unwrap()).unwrap();
        assert!(rel(est.beta_hat, 2.0));
        assert!(rel(est.alpha_hat.unwrap(), 1.0));

        let flat = Dataset::new(vec![1.0, 2.0, 4.0], vec![1.0; 3]).unwrap();
        let err = estimate_case2(&flat, &SideInfo::case2(0.0, 0.0, U).unwrap()).unwrap_err();
        assert!(matches!(err, EivError::GuardViolation(Guard::SxxMinusThetaNonpositive { .. })));

        let err = estimate_case2(&line(), &SideInfo::case2(2.0 / 3.0, 0.0, U).unwrap()).unwrap_err();
        assert!(matches!(err, EivError::GuardViolation(Guard::SxxMinusThetaNonpositive { .. })));
    }

    #[test]
    fn known_intercept_has_no_alpha() {
        let est = estimate(&line(), &SideInfo::case2(0.0, 0.0, InterceptFlag::KnownZero).unwrap()).unwrap();
        assert!(est.alpha_hat.is_none());
        // uncentered: S_xy = (0 + 3 + 10)/3, S_xx = 5/3
        assert!(rel(est.beta_hat, 13.0 / 5.0));
    }

    #[test]
    fn wrong_case_rejected() {
        assert!(estimate_case1(&line(), &SideInfo::case2(0.0, 0.0, U).unwrap()).is_err());
        assert!(estimate_case2(&line(), &SideInfo::case1(0.0, 0.0, U).unwrap()).is_err());
        assert!(SideInfo::case2(-1.0, 0.0, U).is_err());
    }

    #[test]
    fn too_few_observations() {
        let one = Dataset::new(vec![1.0], vec![2.0]).unwrap();
        assert!(matches!(
            estimate(&one, &SideInfo::case2(0.0, 0.0, U).unwrap()),
            Err(EivError::TooFewObservations { .. })
        ));
    }

    #[test]
    fn naive_by_hand() {
        let e = naive_ratio_estimates(&line(), U).unwrap();
        assert!(rel(e.beta_a, 2.0) && rel(e.beta_b, 2.0));
        assert!(rel(e.alpha_a.unwrap(), 1.0) && rel(e.alpha_b.unwrap(), 1.0));
        let e = naive_ratio_estimates(&bent(), U).unwrap();
        assert!(rel(e.beta_b, 2.5));
        // S_yy = 38/9, S_xy = 5/3
        assert!(rel(e.beta_a, 38.0 / 15.0));

        let flat = Dataset::new(vec![1.0, 2.0, 4.0], vec![3.0; 3]).unwrap();
        assert!(matches!(
            naive_ratio(&flat, U, NaiveRatio::XyOverXx),
            Err(EivError::GuardViolation(Guard::SxxNonpositive { .. }))
        ));
        assert!(naive_ratio_estimates(&flat, U).is_err());
    }

    fn spec_with(xi: XiDistribution, theta: f64) -> ModelSpec {
        ModelSpec::new(2.0, 1.0, U, xi, ErrorSpec::new(0.25, theta.max(1e-12), 0.0, ErrorBase::Gaussian).unwrap())
            .unwrap()
    }

    #[test]
    fn reliability_ratio_cases() {
        let heavy = spec_with(XiDistribution::StudentT2 { scale: 1.0, shift: 0.0 }, 1.0);
        assert_eq!(reliability_ratio(&heavy, U).unwrap(), 1.0);

        // Normal(1, 1): Eξ² = 2, Eξ = 1, Var ε = 1
        let n = spec_with(XiDistribution::Normal { mean: 1.0, sd: 1.0 }, 1.0);
        assert!(rel(reliability_ratio(&n, U).unwrap(), 0.5));
        // c = 0 keeps the raw second moment: 2 / 3
        assert!(rel(reliability_ratio(&n, InterceptFlag::KnownZero).unwrap(), 2.0 / 3.0));

        let mut exact = n.clone();
        exact.err.theta = 0.0;
        assert_eq!(reliability_ratio(&exact, U).unwrap(), 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn zero_side_info_is_ols(
            x in prop::collection::vec(-100f64..100.0, 3..30),
            noise in prop::collection::vec(-10f64..10.0, 30),
        ) {
            let y: Vec<f64> = x.iter().zip(&noise).map(|(x, e)| 1.5 * x + e).collect();
            let data = Dataset::new(y, x).unwrap();
            let m = SampleMoments::new(&data, U).unwrap();
            prop_assume!(m.sxx > 0.0);
            let est = estimate(&data, &SideInfo::case2(0.0, 0.0, U).unwrap()).unwrap();
            prop_assert_eq!(est.beta_hat, m.sxy / m.sxx);
            let (ols, _) = naive_ratio(&data, U, NaiveRatio::XyOverXx).unwrap();
            prop_assert_eq!(est.beta_hat, ols);
        }

        #[test]
        fn response_shift_equivariance(
            x in prop::collection::vec(-100f64..100.0, 3..30),
            noise in prop::collection::vec(-10f64..10.0, 30),
            t in -1e3f64..1e3,
            case1 in any::<bool>(),
        ) {
            let y: Vec<f64> = x.iter().zip(&noise).map(|(x, e)| -0.7 * x + 3.0 + e).collect();
            let data = Dataset::new(y, x).unwrap();
            let side = if case1 {
                SideInfo::case1(0.1, 0.05, U).unwrap()
            } else {
                SideInfo::case2(0.1, 0.05, U).unwrap()
            };
            let (Ok(a), Ok(b)) = (estimate(&data, &side), estimate(&data.shift_y(t), &side)) else {
                return Ok(());
            };
            let scale = a.beta_hat.abs().max(1.0);
            prop_assert!((a.beta_hat - b.beta_hat).abs() <= 1e-8 * scale);
            let shift = b.alpha_hat.unwrap() - a.alpha_hat.unwrap();
            prop_assert!((shift - t).abs() <= 1e-8 * (t.abs() + 100.0 * scale));
        }
    }
}
