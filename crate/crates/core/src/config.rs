//! JSON configuration schema shared by the CLI and the browser demo.
//!
//! ```json
//! {
//!   "model": {
//!     "beta": 2, "alpha": 1, "intercept_unknown": true,
//!     "xi": {"family": "normal", "params": [0, 1]},
//!     "errors": {"lambda_theta": 0.25, "theta": 0.25, "mu": 0.05, "base": "gaussian"}
//!   },
//!   "side": {"case": 2, "theta": 0.25, "mu": 0.05},
//!   "experiment": "coverage14",
//!   "n_values": [500], "replications": 4000, "gamma": 0.05, "seed": 1
//! }
//! ```
//!
//! `xi.params` by family: `normal` `[mean, sd]`, `uniform` `[a, b]`,
//! `centered_exponential` `[rate]`, `student_t2` and `symmetric_pareto2`
//! `[scale, shift]`. Optional keys: `k` (quadratic variant, 1 or 2), `pivot`
//! (normality statistic), `naive` (`"xy_over_xx"` or `"yy_over_xy"`) and `n`
//! (rows for `simulate`).

use serde::{Deserialize, Serialize};

use crate::error::{EivError, Result};
use crate::estimators::{Case, Identification, NaiveRatio, SideInfo};
use crate::inference::QuadraticVariant;
use crate::moments::InterceptFlag;
use crate::montecarlo::{Experiment, ExperimentConfig, PivotChoice};
use crate::samplers::{ErrorBase, ErrorSpec, ModelSpec, XiDistribution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiFile {
    pub family: String,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorsFile {
    pub lambda_theta: f64,
    pub theta: f64,
    pub mu: f64,
    #[serde(default = "default_base")]
    pub base: String,
}

fn default_base() -> String {
    "gaussian".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub beta: f64,
    pub alpha: f64,
    pub intercept_unknown: bool,
    pub xi: XiFile,
    pub errors: ErrorsFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideFile {
    pub case: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_theta: Option<f64>,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: ModelFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<SideFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naive: Option<String>,
}

fn params<const N: usize>(family: &str, p: &[f64]) -> Result<[f64; N]> {
    p.try_into().map_err(|_| EivError::Config(format!("xi family {family:?} takes {N} parameter(s), got {}", p.len())))
}

impl XiFile {
    pub fn to_distribution(&self) -> Result<XiDistribution> {
        let f = self.family.as_str();
        let p = &self.params;
        let dist = match f {
            "normal" => {
                let [mean, sd] = params(f, p)?;
                XiDistribution::Normal { mean, sd }
            }
            "uniform" => {
                let [a, b] = params(f, p)?;
                XiDistribution::Uniform { a, b }
            }
            "centered_exponential" => {
                let [rate] = params(f, p)?;
                XiDistribution::CenteredExponential { rate }
            }
            "student_t2" => {
                let [scale, shift] = params(f, p)?;
                XiDistribution::StudentT2 { scale, shift }
            }
            "symmetric_pareto2" => {
                let [scale, shift] = params(f, p)?;
                XiDistribution::SymmetricPareto2 { scale, shift }
            }
            other => return Err(EivError::Config(format!("unknown xi family {other:?}"))),
        };
        dist.validate().map_err(|e| EivError::Config(e.to_string()))?;
        Ok(dist)
    }

    pub fn from_distribution(d: &XiDistribution) -> Self {
        let (family, params) = match *d {
            XiDistribution::Normal { mean, sd } => ("normal", vec![mean, sd]),
            XiDistribution::Uniform { a, b } => ("uniform", vec![a, b]),
            XiDistribution::CenteredExponential { rate } => ("centered_exponential", vec![rate]),
            XiDistribution::StudentT2 { scale, shift } => ("student_t2", vec![scale, shift]),
            XiDistribution::SymmetricPareto2 { scale, shift } => ("symmetric_pareto2", vec![scale, shift]),
        };
        XiFile { family: family.into(), params }
    }
}

impl ModelFile {
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let base = match self.errors.base.as_str() {
            "gaussian" => ErrorBase::Gaussian,
            "scaled_uniform" => ErrorBase::ScaledUniform,
            other => return Err(EivError::Config(format!("unknown error base {other:?}"))),
        };
        let as_config = |e: EivError| EivError::Config(e.to_string());
        let err =
            ErrorSpec::new(self.errors.lambda_theta, self.errors.theta, self.errors.mu, base).map_err(as_config)?;
        ModelSpec::new(
            self.beta,
            self.alpha,
            InterceptFlag::from_unknown(self.intercept_unknown),
            self.xi.to_distribution()?,
            err,
        )
        .map_err(as_config)
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        ModelFile {
            beta: spec.beta,
            alpha: spec.alpha,
            intercept_unknown: spec.c.is_unknown(),
            xi: XiFile::from_distribution(&spec.xi),
            errors: ErrorsFile {
                lambda_theta: spec.err.lambda_theta,
                theta: spec.err.theta,
                mu: spec.err.mu,
                base: match spec.err.base {
                    ErrorBase::Gaussian => "gaussian",
                    ErrorBase::ScaledUniform => "scaled_uniform",
                }
                .into(),
            },
        }
    }
}

impl SideFile {
    pub fn to_side(&self, c: InterceptFlag) -> Result<SideInfo> {
        let missing = |name: &str| EivError::Config(format!("side information for case {} needs {name}", self.case));
        let side = match Case::from_j(self.case).map_err(|e| EivError::Config(e.to_string()))? {
            Case::Case1 => SideInfo::case1(self.lambda_theta.ok_or_else(|| missing("lambda_theta"))?, self.mu, c),
            Case::Case2 => SideInfo::case2(self.theta.ok_or_else(|| missing("theta"))?, self.mu, c),
        };
        side.map_err(|e| EivError::Config(e.to_string()))
    }

    pub fn from_side(side: &SideInfo) -> Self {
        match side.ident {
            Identification::Case1 { lambda_theta, mu } => {
                SideFile { case: 1, lambda_theta: Some(lambda_theta), mu, theta: None }
            }
            Identification::Case2 { theta, mu } => SideFile { case: 2, lambda_theta: None, mu, theta: Some(theta) },
        }
    }
}

fn naive_from_name(name: &str) -> Result<NaiveRatio> {
    match name {
        "xy_over_xx" => Ok(NaiveRatio::XyOverXx),
        "yy_over_xy" => Ok(NaiveRatio::YyOverXy),
        other => Err(EivError::Config(format!("unknown naive estimator {other:?}"))),
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| EivError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        self.model.to_spec()
    }

    /// Side information from the file, or, when absent, the true error moments
    /// of the model for the requested case (default case 2).
    pub fn side_info(&self, spec: &ModelSpec) -> Result<SideInfo> {
        match &self.side {
            Some(side) => side.to_side(spec.c),
            None => SideInfo::case2(spec.err.theta, spec.err.mu, spec.c),
        }
    }

    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let spec = self.model_spec()?;
        let name = self.experiment.as_deref().ok_or_else(|| EivError::Config("missing \"experiment\"".into()))?;
        let experiment = Experiment::from_name(name)?;
        let side = match &self.side {
            Some(side) => side.to_side(spec.c)?,
            None => return Err(EivError::Config("missing \"side\"".into())),
        };
        let mut config = ExperimentConfig::new(spec, side, experiment);
        config.n_values = self.n_values.clone().ok_or_else(|| EivError::Config("missing \"n_values\"".into()))?;
        config.replications = self.replications.ok_or_else(|| EivError::Config("missing \"replications\"".into()))?;
        config.gamma = self.gamma.unwrap_or(0.05);
        config.seed = self.seed.unwrap_or(1);
        if let Some(k) = self.k {
            config.quadratic = QuadraticVariant::from_k(k).map_err(|e| EivError::Config(e.to_string()))?;
        }
        if let Some(p) = &self.pivot {
            config.pivot = PivotChoice::from_name(p)?;
        }
        if let Some(n) = &self.naive {
            config.naive = naive_from_name(n)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_experiment(config: &ExperimentConfig) -> Self {
        ConfigFile {
            model: ModelFile::from_spec(&config.spec),
            side: Some(SideFile::from_side(&config.side)),
            experiment: Some(config.experiment.name().into()),
            n_values: Some(config.n_values.clone()),
            replications: Some(config.replications),
            gamma: Some(config.gamma),
            seed: Some(config.seed),
            n: None,
            k: Some(config.quadratic.k()),
            pivot: Some(config.pivot.name().into()),
            naive: Some(
                match config.naive {
                    NaiveRatio::XyOverXx => "xy_over_xx",
                    NaiveRatio::YyOverXy => "yy_over_xy",
                }
                .into(),
            ),
        }
    }
}
