//! Deterministic Monte Carlo replication engine.
//!
//! Replication `r` at sample size `n` always draws from the stream keyed by
//! `(seed, n, r)`, so results do not depend on the number of workers, on
//! scheduling, or on which other sizes and replications are requested.
//! Outcomes are collected in replication order before any aggregation.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::diagnostics::{empirical_bn, ks_distance_to_normal};
use crate::error::{EivError, Result};
use crate::estimators::{estimate_from_moments, naive_ratio, Identification, NaiveRatio, SideInfo};
use crate::inference::{
    intercept_from, intercept_statistic_from, plugin_from, quadratic_from, slope_statistic_from, InterceptVariant,
    IntervalEstimate, QuadraticVariant, SlopeVariant,
};
use crate::moments::{CompensatedSum, SampleMoments};
use crate::normal::critical_value;
use crate::rng::replication_key;
use crate::samplers::{simulate_with_key, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Plug-in slope interval.
    Coverage14,
    /// Intercept interval.
    Coverage15,
    /// Quadratic slope interval (case 1).
    Coverage16,
    Normality,
    Rate,
    NaiveConsistency,
    Degeneracy,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Coverage14,
        Experiment::Coverage15,
        Experiment::Coverage16,
        Experiment::Normality,
        Experiment::Rate,
        Experiment::NaiveConsistency,
        Experiment::Degeneracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Coverage14 => "coverage14",
            Experiment::Coverage15 => "coverage15",
            Experiment::Coverage16 => "coverage16",
            Experiment::Normality => "normality",
            Experiment::Rate => "rate",
            Experiment::NaiveConsistency => "naive_consistency",
            Experiment::Degeneracy => "degeneracy",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| EivError::Config(format!("unknown experiment {name:?}")))
    }
}

/// Statistic collected by the normality experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotChoice {
    SlopeStudentized,
    SlopeSelfNormalized,
    SlopeSelfNormalizedPlugIn,
    InterceptKnown,
    InterceptPlugIn,
}

impl PivotChoice {
    pub const ALL: [PivotChoice; 5] = [
        PivotChoice::SlopeStudentized,
        PivotChoice::SlopeSelfNormalized,
        PivotChoice::SlopeSelfNormalizedPlugIn,
        PivotChoice::InterceptKnown,
        PivotChoice::InterceptPlugIn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PivotChoice::SlopeStudentized => "slope_studentized",
            PivotChoice::SlopeSelfNormalized => "slope_self_normalized",
            PivotChoice::SlopeSelfNormalizedPlugIn => "slope_self_normalized_plug_in",
            PivotChoice::InterceptKnown => "intercept_known",
            PivotChoice::InterceptPlugIn => "intercept_plug_in",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        PivotChoice::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| EivError::Config(format!("unknown pivot {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: ModelSpec,
    pub side: SideInfo,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub gamma: f64,
    pub seed: u64,
    pub experiment: Experiment,
    /// Quadratic interval variant for `Coverage16` and `Degeneracy`.
    pub quadratic: QuadraticVariant,
    pub pivot: PivotChoice,
    pub naive: NaiveRatio,
}

impl ExperimentConfig {
    pub fn new(spec: ModelSpec, side: SideInfo, experiment: Experiment) -> Self {
        ExperimentConfig {
            spec,
            side,
            n_values: vec![100],
            replications: 1000,
            gamma: 0.05,
            seed: 1,
            experiment,
            quadratic: QuadraticVariant::Studentized,
            pivot: PivotChoice::SlopeSelfNormalizedPlugIn,
            naive: NaiveRatio::XyOverXx,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.replications == 0 {
            return Err(EivError::Config("replications must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(EivError::Config("n_values must not be empty".into()));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(EivError::Config(format!("every sample size must be at least 2, got {n}")));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(EivError::Config(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if self.side.c != self.spec.c {
            return Err(EivError::Config("side information and model disagree on the intercept flag".into()));
        }
        let needs_case1 = matches!(self.experiment, Experiment::Coverage16 | Experiment::Degeneracy);
        if needs_case1 && !matches!(self.side.ident, Identification::Case1 { .. }) {
            return Err(EivError::Config(format!("{} needs case-1 side information", self.experiment.name())));
        }
        let intercept = matches!(self.experiment, Experiment::Coverage15)
            || (self.experiment == Experiment::Normality
                && matches!(self.pivot, PivotChoice::InterceptKnown | PivotChoice::InterceptPlugIn));
        if intercept && !self.spec.c.is_unknown() {
            return Err(EivError::Config("intercept experiments need an unknown intercept".into()));
        }
        Ok(())
    }

    /// Whether the known moments in `side` equal the generating error moments.
    /// Mismatches are allowed (they model misspecified side information) but
    /// are flagged in the report.
    pub fn side_consistent(&self) -> bool {
        let e = &self.spec.err;
        match self.side.ident {
            Identification::Case1 { lambda_theta, mu } => lambda_theta == e.lambda_theta && mu == e.mu,
            Identification::Case2 { theta, mu } => theta == e.theta && mu == e.mu,
        }
    }
}

/// Aggregates for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeRecord {
    pub n: usize,
    pub replications: usize,
    /// Replications lost to guard failures or degenerate intervals.
    pub failed: usize,
    pub failure_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covered: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub not_covered: Option<usize>,
    /// Over non-failed replications only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_abs_error_alpha: Option<f64>,
    /// Median of `√n·ℓ̂(n)·|β̂ − β|` with `√n·ℓ̂(n) = b̂_n(ξ)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled_error_median: Option<f64>,
    /// Naive experiment: median error of the modified estimator on the same data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator_median_abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate_fraction: Option<f64>,
}

impl SizeRecord {
    fn empty(n: usize, replications: usize, failed: usize) -> Self {
        SizeRecord {
            n,
            replications,
            failed,
            failure_rate: failed as f64 / replications as f64,
            covered: None,
            not_covered: None,
            coverage: None,
            mean_width: None,
            ks: None,
            median_abs_error: None,
            median_abs_error_alpha: None,
            scaled_error_median: None,
            estimator_median_abs_error: None,
            degenerate_fraction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub seed: u64,
    pub side_consistent: bool,
    pub records: Vec<SizeRecord>,
    pub config: ExperimentConfig,
}

impl ExperimentReport {
    pub fn record(&self, n: usize) -> Option<&SizeRecord> {
        self.records.iter().find(|r| r.n == n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Failed,
    Degenerate,
    Interval { covered: bool, width: f64 },
    Pivot(f64),
    Errors { beta: f64, alpha: Option<f64>, scaled: f64 },
    Naive { naive: f64, estimator: Option<f64> },
    NonDegenerate,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.experiment {
        Experiment::Coverage14 | Experiment::Coverage15 | Experiment::Coverage16 => run_coverage(config),
        Experiment::Normality => run_normality(config),
        Experiment::Rate => run_rate(config),
        Experiment::NaiveConsistency => run_naive_consistency(config),
        Experiment::Degeneracy => run_degeneracy(config),
    }
}

/// Run on a dedicated pool of `workers` threads; results are identical for
/// every worker count.
#[cfg(feature = "parallel")]
pub fn run_experiment_with_workers(config: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| EivError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

/// Raw pivot draws behind a normality record, in replication order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotSamples {
    pub n: usize,
    pub values: Vec<f64>,
    pub failed: usize,
}

/// The pivot values a normality run at sample size `n` aggregates.
pub fn pivot_samples(config: &ExperimentConfig, n: usize) -> Result<PivotSamples> {
    expect(config, &[Experiment::Normality])?;
    if n < 2 {
        return Err(EivError::Config(format!("every sample size must be at least 2, got {n}")));
    }
    let outcomes = replicate_all(config, n, critical_value(config.gamma)?)?;
    let values: Vec<f64> =
        outcomes.iter().filter_map(|o| if let Outcome::Pivot(v) = o { Some(*v) } else { None }).collect();
    Ok(PivotSamples { n, failed: outcomes.len() - values.len(), values })
}

fn expect(config: &ExperimentConfig, allowed: &[Experiment]) -> Result<()> {
    if !allowed.contains(&config.experiment) {
        return Err(EivError::Config(format!("experiment {} cannot be run by this driver", config.experiment.name())));
    }
    config.validate()
}

pub fn run_coverage(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, &[Experiment::Coverage14, Experiment::Coverage15, Experiment::Coverage16])?;
    run(config)
}

pub fn run_normality(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, &[Experiment::Normality])?;
    run(config)
}

pub fn run_rate(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, &[Experiment::Rate])?;
    run(config)
}

pub fn run_naive_consistency(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, &[Experiment::NaiveConsistency])?;
    run(config)
}

pub fn run_degeneracy(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect(config, &[Experiment::Degeneracy])?;
    run(config)
}

fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let z = critical_value(config.gamma)?;
    let mut records = Vec::with_capacity(config.n_values.len());
    for &n in &config.n_values {
        let outcomes = replicate_all(config, n, z)?;
        records.push(aggregate(config, n, &outcomes));
    }
    Ok(ExperimentReport {
        experiment: config.experiment,
        seed: config.seed,
        side_consistent: config.side_consistent(),
        records,
        config: config.clone(),
    })
}

#[cfg(feature = "parallel")]
fn replicate_all(config: &ExperimentConfig, n: usize, z: f64) -> Result<Vec<Outcome>> {
    use rayon::prelude::*;
    (0..config.replications).into_par_iter().map(|r| replicate(config, n, r, z)).collect()
}

#[cfg(not(feature = "parallel"))]
fn replicate_all(config: &ExperimentConfig, n: usize, z: f64) -> Result<Vec<Outcome>> {
    (0..config.replications).map(|r| replicate(config, n, r, z)).collect()
}

/// Statistical failures become [`Outcome::Failed`]; anything else is a
/// configuration problem and aborts the run.
fn soft<T>(result: Result<T>) -> Result<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(EivError::GuardViolation(_) | EivError::ZeroNormalizer(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn interval_outcome(ci: IntervalEstimate, truth: f64) -> Outcome {
    match (ci.contains(truth), ci.width()) {
        (Some(covered), Some(width)) => Outcome::Interval { covered, width },
        _ => Outcome::Degenerate,
    }
}

fn replicate(config: &ExperimentConfig, n: usize, rep: usize, z: f64) -> Result<Outcome> {
    let spec = &config.spec;
    let side = &config.side;
    let data = simulate_with_key(spec, n, replication_key(config.seed, n, rep))?;
    let m = SampleMoments::new(&data, side.c)?;
    let outcome = match config.experiment {
        Experiment::Coverage14 => soft(plugin_from(&m, side, z))?.map(|ci| interval_outcome(ci, spec.beta)),
        Experiment::Coverage15 => soft(intercept_from(&m, &data, side, z))?.map(|ci| interval_outcome(ci, spec.alpha)),
        Experiment::Coverage16 => {
            soft(quadratic_from(&m, side, config.quadratic, z))?.map(|ci| interval_outcome(ci, spec.beta))
        }
        Experiment::Degeneracy => soft(quadratic_from(&m, side, config.quadratic, z))?.map(|ci| {
            if ci.is_degenerate() {
                Outcome::Degenerate
            } else {
                Outcome::NonDegenerate
            }
        }),
        Experiment::Normality => soft(pivot(config, &m, &data))?.map(Outcome::Pivot),
        Experiment::Rate => soft(estimate_from_moments(&m, side))?.map(|est| {
            let beta = (est.beta_hat - spec.beta).abs();
            let xi = &data.latent().expect("simulated data carries latent values").xi;
            let bn = empirical_bn(xi).unwrap_or(f64::NAN);
            Outcome::Errors { beta, alpha: est.alpha_hat.map(|a| (a - spec.alpha).abs()), scaled: bn * beta }
        }),
        Experiment::NaiveConsistency => {
            let estimator = soft(estimate_from_moments(&m, side))?.map(|e| (e.beta_hat - spec.beta).abs());
            soft(naive_ratio(&data, side.c, config.naive))?
                .map(|(b, _)| Outcome::Naive { naive: (b - spec.beta).abs(), estimator })
        }
    };
    Ok(outcome.unwrap_or(Outcome::Failed))
}

fn pivot(config: &ExperimentConfig, m: &SampleMoments, data: &Dataset) -> Result<f64> {
    let (spec, side) = (&config.spec, &config.side);
    match config.pivot {
        PivotChoice::SlopeStudentized => slope_statistic_from(m, side, SlopeVariant::Studentized, spec.beta),
        PivotChoice::SlopeSelfNormalized => slope_statistic_from(m, side, SlopeVariant::SelfNormalized, spec.beta),
        PivotChoice::SlopeSelfNormalizedPlugIn => {
            slope_statistic_from(m, side, SlopeVariant::SelfNormalizedPlugIn, spec.beta)
        }
        PivotChoice::InterceptKnown => {
            intercept_statistic_from(m, data, side, InterceptVariant::Known, spec.alpha, Some(spec.beta))
        }
        PivotChoice::InterceptPlugIn => {
            intercept_statistic_from(m, data, side, InterceptVariant::PlugIn, spec.alpha, None)
        }
    }
}

fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len();
    Some(if k % 2 == 1 { values[k / 2] } else { 0.5 * (values[k / 2 - 1] + values[k / 2]) })
}

fn aggregate(config: &ExperimentConfig, n: usize, outcomes: &[Outcome]) -> SizeRecord {
    let m = outcomes.len();
    let failed = outcomes.iter().filter(|o| matches!(o, Outcome::Failed | Outcome::Degenerate)).count();
    let mut rec = SizeRecord::empty(n, m, failed);
    match config.experiment {
        Experiment::Coverage14 | Experiment::Coverage15 | Experiment::Coverage16 => {
            let mut covered = 0;
            let mut not_covered = 0;
            let mut width = CompensatedSum::new();
            for o in outcomes {
                if let Outcome::Interval { covered: c, width: w } = o {
                    if *c {
                        covered += 1;
                    } else {
                        not_covered += 1;
                    }
                    width.add(*w);
                }
            }
            let done = covered + not_covered;
            rec.covered = Some(covered);
            rec.not_covered = Some(not_covered);
            if done > 0 {
                rec.coverage = Some(covered as f64 / done as f64);
                rec.mean_width = Some(width.total() / done as f64);
            }
        }
        Experiment::Normality => {
            let values: Vec<f64> =
                outcomes.iter().filter_map(|o| if let Outcome::Pivot(v) = o { Some(*v) } else { None }).collect();
            rec.ks = ks_distance_to_normal(&values).ok();
        }
        Experiment::Rate => {
            let mut beta = Vec::new();
            let mut alpha = Vec::new();
            let mut scaled = Vec::new();
            for o in outcomes {
                if let Outcome::Errors { beta: b, alpha: a, scaled: s } = o {
                    beta.push(*b);
                    alpha.extend(*a);
                    scaled.push(*s);
                }
            }
            rec.median_abs_error = median(beta);
            rec.median_abs_error_alpha = median(alpha);
            rec.scaled_error_median = median(scaled);
        }
        Experiment::NaiveConsistency => {
            let mut naive = Vec::new();
            let mut est = Vec::new();
            for o in outcomes {
                if let Outcome::Naive { naive: a, estimator: b } = o {
                    naive.push(*a);
                    est.extend(*b);
                }
            }
            rec.median_abs_error = median(naive);
            rec.estimator_median_abs_error = median(est);
        }
        Experiment::Degeneracy => {
            let degenerate = outcomes.iter().filter(|o| matches!(o, Outcome::Degenerate)).count();
            rec.degenerate_fraction = Some(degenerate as f64 / m as f64);
        }
    }
    rec
}
