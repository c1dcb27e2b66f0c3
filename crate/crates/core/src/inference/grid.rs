//! Brute-force inversion of the slope pivots on a grid.
//!
//! Serves as an independent check on the closed-form quadratic interval: the
//! pivot is evaluated directly at each candidate slope, accepted points are
//! grouped into connected runs, and every run boundary is refined by
//! bisection on the pivot itself.

use serde::{Deserialize, Serialize};

use super::intervals::{plugin_from, QuadraticVariant};
use super::residuals::{big_u, slope_parts};
use crate::data::Dataset;
use crate::error::Result;
use crate::estimators::{estimate_from_moments, SideInfo};
use crate::moments::{CompensatedSum, SampleMoments};
use crate::normal::critical_value;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Initial bracket half-width as a multiple of the plug-in half-width.
    pub inflate: f64,
    /// Grid points on each side of the center.
    pub half_points: usize,
    /// How many times the bracket may double when the accepted set reaches its edge.
    pub max_expansions: u32,
    /// Bisection steps per boundary.
    pub refine_steps: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        // step = 1e−4 × bracket width
        GridSpec { inflate: 10.0, half_points: 5_000, max_expansions: 40, refine_steps: 80 }
    }
}

/// Accepted set `{β : |pivot(β)| ≤ z}` as seen on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInversion {
    /// Connected components in increasing order; unbounded ends are `±∞`.
    pub components: Vec<(f64, f64)>,
    /// Final bracket searched.
    pub bracket: (f64, f64),
    pub step: f64,
    pub z: f64,
}

impl GridInversion {
    /// The single bounded component, if that is what the accepted set is.
    pub fn single_interval(&self) -> Option<(f64, f64)> {
        match self.components.as_slice() {
            [(lo, hi)] if lo.is_finite() && hi.is_finite() => Some((*lo, *hi)),
            _ => None,
        }
    }
}

/// Pivot evaluator at a hypothesized slope, written in the
/// `U·(β̂ − β)` numerator form with the normalizer recomputed from scratch.
pub(crate) struct SlopePivot {
    a: Vec<f64>,
    b: Vec<f64>,
    u: f64,
    beta_hat: f64,
    n: f64,
    variant: QuadraticVariant,
}

impl SlopePivot {
    pub(crate) fn new(m: &SampleMoments, side: &SideInfo, variant: QuadraticVariant) -> Result<Self> {
        let est = estimate_from_moments(m, side)?;
        let (a, b) = slope_parts(m, side);
        Ok(SlopePivot { a, b, u: big_u(m, side), beta_hat: est.beta_hat, n: m.n as f64, variant })
    }

    /// `|pivot(β)|`; `+∞` when the normalizer vanishes with a nonzero numerator.
    pub(crate) fn abs_value(&self, beta: f64) -> f64 {
        let numerator = (self.u * (self.beta_hat - beta)).abs();
        let den_sq = match self.variant {
            QuadraticVariant::Studentized => {
                let mut s = CompensatedSum::new();
                for (a, b) in self.a.iter().zip(&self.b) {
                    s.add(a - beta * b);
                }
                let mean = s.total() / self.n;
                let mut ss = CompensatedSum::new();
                for (a, b) in self.a.iter().zip(&self.b) {
                    let d = a - beta * b - mean;
                    ss.add(d * d);
                }
                ss.total() / (self.n - 1.0) / self.n
            }
            QuadraticVariant::SelfNormalized => {
                let mut ss = CompensatedSum::new();
                for (a, b) in self.a.iter().zip(&self.b) {
                    let d = a - beta * b;
                    ss.add(d * d);
                }
                ss.total() / (self.n * self.n)
            }
        };
        if den_sq == 0.0 {
            return if numerator == 0.0 { 0.0 } else { f64::INFINITY };
        }
        numerator / den_sq.sqrt()
    }
}

pub fn grid_invert_ci(
    data: &Dataset,
    side: &SideInfo,
    variant: QuadraticVariant,
    gamma: f64,
    grid: &GridSpec,
) -> Result<GridInversion> {
    grid_invert_ci_at(data, side, variant, critical_value(gamma)?, grid)
}

/// Grid inversion at an explicit critical value. Works for either case; for
/// case 2 the pivot terms are the case-2 residuals.
pub fn grid_invert_ci_at(
    data: &Dataset,
    side: &SideInfo,
    variant: QuadraticVariant,
    z: f64,
    grid: &GridSpec,
) -> Result<GridInversion> {
    let m = SampleMoments::new(data, side.c)?;
    m.require(2)?;
    let pivot = SlopePivot::new(&m, side, variant)?;
    let center = pivot.beta_hat;

    // Plug-in standard error: the plug-in interval at z = 1.
    let se = plugin_from(&m, side, 1.0)?.width().unwrap_or(0.0) / 2.0;
    let mut half = grid.inflate * z.max(1.0) * se;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN falls through too
    if !(half > 0.0) || !half.is_finite() {
        half = 1e-3 * center.abs().max(1.0);
    }
    let accepts = |beta: f64| pivot.abs_value(beta) <= z;

    let mut expansions = 0;
    let (flags, lo, step) = loop {
        let step = half / grid.half_points as f64;
        let lo = center - half;
        let total = 2 * grid.half_points + 1;
        let points: Vec<f64> =
            (0..total).map(|i| if i == grid.half_points { center } else { lo + i as f64 * step }).collect();
        let flags = eval_flags(&points, &accepts);
        let at_edge = flags[0] || flags[total - 1];
        if !at_edge || expansions >= grid.max_expansions {
            break (flags, lo, step);
        }
        half *= 2.0;
        expansions += 1;
    };

    let point = |i: usize| if i == grid.half_points { center } else { lo + i as f64 * step };
    let last = flags.len() - 1;
    let mut components = Vec::new();
    let mut i = 0;
    while i <= last {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < last && flags[i + 1] {
            i += 1;
        }
        let end = i;
        let lower = if start == 0 {
            f64::NEG_INFINITY
        } else {
            refine(point(start - 1), point(start), &accepts, grid.refine_steps)
        };
        let upper =
            if end == last { f64::INFINITY } else { refine(point(end + 1), point(end), &accepts, grid.refine_steps) };
        components.push((lower, upper));
        i += 1;
    }
    Ok(GridInversion { components, bracket: (point(0), point(last)), step, z })
}

#[cfg(feature = "parallel")]
fn eval_flags<F: Fn(f64) -> bool + Sync>(points: &[f64], accepts: &F) -> Vec<bool> {
    use rayon::prelude::*;
    points.par_iter().map(|&b| accepts(b)).collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_flags<F: Fn(f64) -> bool>(points: &[f64], accepts: &F) -> Vec<bool> {
    points.iter().map(|&b| accepts(b)).collect()
}

/// Bisection between a rejected and an accepted point; returns the accepted end.
fn refine<F: Fn(f64) -> bool>(mut rejected: f64, mut accepted: f64, accepts: &F, steps: u32) -> f64 {
    for _ in 0..steps {
        let mid = 0.5 * (rejected + accepted);
        if mid == rejected || mid == accepted {
            break;
        }
        if accepts(mid) {
            accepted = mid;
        } else {
            rejected = mid;
        }
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::intervals::ci_slope_quadratic_at;
    use crate::moments::InterceptFlag;
    use crate::samplers::{simulate_dataset, ModelSpec};

    fn case1_side(spec: &ModelSpec) -> SideInfo {
        SideInfo::case1(spec.err.lambda_theta, spec.err.mu, spec.c).unwrap()
    }

    #[test]
    fn zero_critical_value_gives_point() {
        let spec = ModelSpec::reference();
        let data = simulate_dataset(&spec, 50, 3).unwrap();
        let side = case1_side(&spec);
        let g = grid_invert_ci_at(&data, &side, QuadraticVariant::Studentized, 0.0, &GridSpec::default()).unwrap();
        let (lo, hi) = g.single_interval().unwrap();
        let beta_hat = crate::estimators::estimate(&data, &side).unwrap().beta_hat;
        assert!((lo - beta_hat).abs() <= g.step && (hi - beta_hat).abs() <= g.step);
    }

    #[test]
    fn matches_closed_form_on_a_sample() {
        let spec = ModelSpec::reference();
        let side = case1_side(&spec);
        let data = simulate_dataset(&spec, 50, 7).unwrap();
        for v in [QuadraticVariant::Studentized, QuadraticVariant::SelfNormalized] {
            let ci = ci_slope_quadratic_at(&data, &side, v, 1.959963984540054).unwrap();
            let g = grid_invert_ci(&data, &side, v, 0.05, &GridSpec::default()).unwrap();
            let (lo, hi) = g.single_interval().unwrap();
            assert!((lo - ci.lower.unwrap()).abs() <= 1e-6 * lo.abs());
            assert!((hi - ci.upper.unwrap()).abs() <= 1e-6 * hi.abs());
        }
    }

    #[test]
    fn degenerate_data_is_not_a_bounded_interval() {
        let data = Dataset::new(vec![1.0, 3.0, 6.0], vec![0.0, 1.0, 2.0]).unwrap();
        let side = SideInfo::case1(0.0, 0.0, InterceptFlag::Unknown).unwrap();
        let g = grid_invert_ci_at(&data, &side, QuadraticVariant::Studentized, 2.5, &GridSpec::default()).unwrap();
        assert!(g.single_interval().is_none(), "{g:?}");
    }
}
