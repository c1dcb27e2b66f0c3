//! Straight-line reference formulas used as oracles. Plain loops, no
//! compensated summation, nothing shared with the library internals.
#![allow(dead_code)]

use eiv_core::{Dataset, Identification, InterceptFlag, ModelSpec, SideInfo};

pub struct Moments {
    pub n: f64,
    pub x_bar: f64,
    pub y_bar: f64,
    pub sxx: Vec<f64>,
    pub sxy: Vec<f64>,
    pub syy: Vec<f64>,
}

pub fn moments(data: &Dataset, c: InterceptFlag) -> Moments {
    let (y, x) = (data.y(), data.x());
    let n = y.len() as f64;
    let x_bar = x.iter().sum::<f64>() / n;
    let y_bar = y.iter().sum::<f64>() / n;
    let k = if c.is_unknown() { 1.0 } else { 0.0 };
    let mut m = Moments { n, x_bar, y_bar, sxx: vec![], sxy: vec![], syy: vec![] };
    for i in 0..y.len() {
        let dx = x[i] - k * x_bar;
        let dy = y[i] - k * y_bar;
        m.sxx.push(dx * dx);
        m.sxy.push(dx * dy);
        m.syy.push(dy * dy);
    }
    m
}

fn avg(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `(a_i, b_i)` with slope terms `a_i − β b_i`.
pub fn parts(m: &Moments, side: &SideInfo) -> (Vec<f64>, Vec<f64>) {
    match side.ident {
        Identification::Case1 { lambda_theta, mu } => {
            (m.syy.iter().map(|s| s - lambda_theta).collect(), m.sxy.iter().map(|s| s - mu).collect())
        }
        Identification::Case2 { theta, mu } => {
            (m.sxy.iter().map(|s| s - mu).collect(), m.sxx.iter().map(|s| s - theta).collect())
        }
    }
}

pub struct Fit {
    pub m: Moments,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub big_u: f64,
    pub beta_hat: f64,
    pub alpha_hat: f64,
}

pub fn fit(data: &Dataset, side: &SideInfo) -> Fit {
    let m = moments(data, side.c);
    let (a, b) = parts(&m, side);
    let big_u = avg(&b);
    let beta_hat = avg(&a) / big_u;
    let alpha_hat = if side.c.is_unknown() { m.y_bar - m.x_bar * beta_hat } else { 0.0 };
    Fit { m, a, b, big_u, beta_hat, alpha_hat }
}

pub fn slope_terms(f: &Fit, beta: f64) -> Vec<f64> {
    f.a.iter().zip(&f.b).map(|(a, b)| a - beta * b).collect()
}

pub fn intercept_terms(data: &Dataset, f: &Fit, beta: f64, alpha: f64) -> Vec<f64> {
    let u = slope_terms(f, beta);
    (0..data.len()).map(|i| (data.y()[i] - alpha) - beta * data.x()[i] - f.m.x_bar / f.big_u * u[i]).collect()
}

fn ss(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum()
}

fn css(v: &[f64]) -> f64 {
    let mean = avg(v);
    v.iter().map(|t| (t - mean) * (t - mean)).sum()
}

pub fn studentized(f: &Fit, beta: f64) -> f64 {
    let u = slope_terms(f, beta);
    f.m.n.sqrt() * avg(&u) / (css(&u) / (f.m.n - 1.0)).sqrt()
}

pub fn self_normalized(f: &Fit, beta: f64) -> f64 {
    let u = slope_terms(f, beta);
    f.m.n * avg(&u) / ss(&u).sqrt()
}

pub fn self_normalized_plugin(f: &Fit, beta: f64) -> f64 {
    let u = slope_terms(f, beta);
    let plug = slope_terms(f, f.beta_hat);
    f.m.n * avg(&u) / ss(&plug).sqrt()
}

pub fn intercept_stat(data: &Dataset, f: &Fit, beta: f64, alpha: f64) -> f64 {
    let v = intercept_terms(data, f, beta, alpha);
    f.m.n.sqrt() * (f.alpha_hat - alpha) / (css(&v) / (f.m.n - 1.0)).sqrt()
}

pub fn intercept_plugin_stat(data: &Dataset, f: &Fit, alpha: f64) -> f64 {
    let v = intercept_terms(data, f, f.beta_hat, 0.0);
    f.m.n.sqrt() * (f.alpha_hat - alpha) / (css(&v) / (f.m.n - 1.0)).sqrt()
}

pub fn ci_plugin(f: &Fit, z: f64) -> (f64, f64) {
    let plug = slope_terms(f, f.beta_hat);
    let h = z * ss(&plug).sqrt() / (f.m.n * f.big_u);
    (f.beta_hat - h, f.beta_hat + h)
}

pub fn ci_intercept(data: &Dataset, f: &Fit, z: f64) -> (f64, f64) {
    let v = intercept_terms(data, f, f.beta_hat, 0.0);
    let h = z * css(&v).sqrt() / (f.m.n * (f.m.n - 1.0)).sqrt();
    (f.alpha_hat - h, f.alpha_hat + h)
}

/// Solves `f·U²(β̂ − β)² = z²·Q(β)` where `Q` is the centered (k = 1) or raw
/// (k = 2) sum of squared slope terms, expanded directly in `β`.
pub fn ci_quadratic(f: &Fit, k: u8, z: f64) -> Option<(f64, f64)> {
    let n = f.m.n;
    let (fac, a, b) = if k == 1 {
        let (ma, mb) = (avg(&f.a), avg(&f.b));
        (n * (n - 1.0), f.a.iter().map(|v| v - ma).collect::<Vec<_>>(), f.b.iter().map(|v| v - mb).collect::<Vec<_>>())
    } else {
        (n * n, f.a.clone(), f.b.clone())
    };
    let saa: f64 = a.iter().map(|v| v * v).sum();
    let sbb: f64 = b.iter().map(|v| v * v).sum();
    let sab: f64 = a.iter().zip(&b).map(|(a, b)| a * b).sum();
    let w = fac * f.big_u * f.big_u;
    let z2 = z * z;
    let qa = w - z2 * sbb;
    let qb = -2.0 * (w * f.beta_hat - z2 * sab);
    let qc = w * f.beta_hat * f.beta_hat - z2 * saa;
    let disc = qb * qb - 4.0 * qa * qc;
    if qa <= 0.0 || disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some(((-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)))
}

pub fn m0() -> ModelSpec {
    ModelSpec::reference()
}

pub fn side1(spec: &ModelSpec) -> SideInfo {
    SideInfo::case1(spec.err.lambda_theta, spec.err.mu, spec.c).unwrap()
}

pub fn side2(spec: &ModelSpec) -> SideInfo {
    SideInfo::case2(spec.err.theta, spec.err.mu, spec.c).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
