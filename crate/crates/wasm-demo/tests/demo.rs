use eiv_wasm::{experiment_json, fit_json, pivot_histogram_json};
use serde_json::Value;

fn config(extra: &str) -> String {
    format!(
        r#"{{
      "model": {{"beta": 2, "alpha": 1, "intercept_unknown": true,
                "xi": {{"family": "student_t2", "params": [1, 0]}},
                "errors": {{"lambda_theta": 0.25, "theta": 0.25, "mu": 0.05, "base": "gaussian"}}}},
      "side": {{"case": 1, "lambda_theta": 0.25, "mu": 0.05}},
      "gamma": 0.1, "seed": 11, {extra}
    }}"#
    )
}

fn value(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn fit_center_matches_every_slope_interval() {
    let v = value(fit_json(&config(r#""n": 400"#)).unwrap());
    let beta = v["estimate"]["beta_hat"].as_f64().unwrap();
    assert_eq!(v["j"], 1);
    for key in ["plugin_slope", "quadratic_k1", "quadratic_k2"] {
        let ci = &v["intervals"][key];
        assert!((ci["level"].as_f64().unwrap() - 0.9).abs() < 1e-12);
        if key == "plugin_slope" {
            assert_eq!(ci["center"].as_f64().unwrap(), beta);
        }
    }
    assert_eq!(v["points"]["y"].as_array().unwrap().len(), 400);
}

#[test]
fn heavy_tail_experiment_and_histogram() {
    let cfg = config(
        r#""experiment": "coverage16", "k": 2, "n_values": [100, 400], "replications": 300, "n": 400, "pivot": "slope_studentized""#,
    );
    let rep = value(experiment_json(&cfg).unwrap());
    for r in rep["records"].as_array().unwrap() {
        let c = r["coverage"].as_f64().unwrap();
        assert!((0.75..=1.0).contains(&c), "{r}");
    }
    let h = value(pivot_histogram_json(&cfg, 32).unwrap());
    assert_eq!(h["pivot"], "slope_studentized");
    assert_eq!(h["density"].as_array().unwrap().len(), 32);
    assert!(h["ks"].as_f64().unwrap() < 0.15);
}
