//! Browser bindings. Every entry point takes the JSON config schema of
//! `eiv_core::config` and returns a JSON string; the `*_json` functions are
//! the same operations callable natively.

use eiv_core::config::ConfigFile;
use eiv_core::diagnostics::ks_distance_to_normal;
use eiv_core::inference::{ci_intercept, ci_slope_plugin, ci_slope_quadratic, QuadraticVariant};
use eiv_core::montecarlo::{pivot_samples, run_experiment};
use eiv_core::{estimate, naive_ratio_estimates, simulate_dataset, EivError, Identification, SideInfo};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Upper bound on simulated observations per call (n × replications × sizes),
/// so a slider cannot freeze the tab.
const WORK_LIMIT: usize = 20_000_000;

fn attempt<T: Serialize>(r: eiv_core::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("serializable"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn parse(config: &str) -> Result<ConfigFile, String> {
    ConfigFile::from_json(config).map_err(|e| e.to_string())
}

fn check_work(total: usize) -> Result<(), String> {
    if total > WORK_LIMIT {
        Err(format!("{total} simulated observations requested; the demo allows {WORK_LIMIT}"))
    } else {
        Ok(())
    }
}

/// Simulates one dataset and returns the points, point estimates and all
/// interval families. Uses `n`, `seed` and `gamma` from the config.
pub fn fit_json(config: &str) -> Result<String, String> {
    let file = parse(config)?;
    let spec = file.model_spec().map_err(|e| e.to_string())?;
    let n = file.n.ok_or("config needs \"n\"")?;
    check_work(n)?;
    let seed = file.seed.unwrap_or(1);
    let gamma = file.gamma.unwrap_or(0.05);
    let side = file.side_info(&spec).map_err(|e| e.to_string())?;
    let data = simulate_dataset(&spec, n, seed).map_err(|e| e.to_string())?;
    // The quadratic family needs case-1 information; fall back to the true moments.
    let side1 = match side.ident {
        Identification::Case1 { .. } => Ok(side),
        Identification::Case2 { .. } => SideInfo::case1(spec.err.lambda_theta, spec.err.mu, spec.c),
    };
    let quadratic = |variant| side1.clone().and_then(|s| ci_slope_quadratic(&data, &s, variant, gamma));
    let intercept = if spec.c.is_unknown() { ci_intercept(&data, &side, gamma) } else { Err(EivError::InterceptKnown) };
    let out = json!({
        "n": n,
        "seed": seed,
        "gamma": gamma,
        "j": side.case().j(),
        "truth": { "beta": spec.beta, "alpha": spec.alpha },
        "points": { "x": data.x(), "y": data.y() },
        "estimate": attempt(estimate(&data, &side)),
        "naive": attempt(naive_ratio_estimates(&data, spec.c)),
        "intervals": {
            "plugin_slope": attempt(ci_slope_plugin(&data, &side, gamma)),
            "intercept": attempt(intercept),
            "quadratic_k1": attempt(quadratic(QuadraticVariant::Studentized)),
            "quadratic_k2": attempt(quadratic(QuadraticVariant::SelfNormalized)),
        },
    });
    Ok(out.to_string())
}

/// Runs the configured Monte Carlo experiment and returns its report.
pub fn experiment_json(config: &str) -> Result<String, String> {
    let cfg = parse(config)?.experiment_config().map_err(|e| e.to_string())?;
    check_work(cfg.n_values.iter().sum::<usize>() * cfg.replications)?;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

/// Pivot draws at the config's `n` binned into a density histogram on
/// `[-4, 4]`, with the KS distance to the standard normal.
pub fn pivot_histogram_json(config: &str, bins: usize) -> Result<String, String> {
    let mut file = parse(config)?;
    let n = file.n.ok_or("config needs \"n\"")?;
    file.experiment = Some("normality".into());
    file.n_values = Some(vec![n]);
    let cfg = file.experiment_config().map_err(|e| e.to_string())?;
    check_work(n * cfg.replications)?;
    let bins = bins.clamp(1, 400);
    let samples = pivot_samples(&cfg, n).map_err(|e| e.to_string())?;
    let (lo, hi) = (-4.0, 4.0);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut outside = 0;
    for &v in &samples.values {
        if (lo..hi).contains(&v) {
            counts[((v - lo) / width) as usize] += 1;
        } else {
            outside += 1;
        }
    }
    let total = samples.values.len().max(1) as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let out = json!({
        "n": n,
        "pivot": cfg.pivot.name(),
        "replications": cfg.replications,
        "failed": samples.failed,
        "outside": outside,
        "range": [lo, hi],
        "density": density,
        "ks": ks_distance_to_normal(&samples.values).ok(),
    });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn fit(config: &str) -> Result<String, JsValue> {
    fit_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn experiment(config: &str) -> Result<String, JsValue> {
    experiment_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn pivot_histogram(config: &str, bins: usize) -> Result<String, JsValue> {
    pivot_histogram_json(config, bins).map_err(|e| JsValue::from_str(&e))
}
