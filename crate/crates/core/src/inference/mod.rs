//! Residual constructions, pivots and confidence intervals.

mod grid;
mod intervals;
mod residuals;
mod statistics;

pub use grid::{grid_invert_ci, grid_invert_ci_at, GridInversion, GridSpec};
pub use intervals::{
    ci_intercept, ci_intercept_at, ci_slope_plugin, ci_slope_plugin_at, ci_slope_quadratic, ci_slope_quadratic_at,
    Degeneracy, IntervalEstimate, IntervalFamily, QuadraticCoefficients, QuadraticVariant,
};
pub use residuals::{
    intercept_residuals, slope_residuals, InterceptKind, InterceptResiduals, ResidualKind, SlopeResiduals,
};
pub use statistics::{intercept_statistic, slope_statistic, InterceptVariant, SlopeVariant};

pub(crate) use intervals::{intercept_from, plugin_from, quadratic_from};
pub(crate) use statistics::{intercept_statistic_from, slope_statistic_from};

use crate::data::Dataset;
use crate::error::Result;
use crate::estimators::SideInfo;
use crate::moments::SampleMoments;

/// Coefficients of the quadratic behind [`ci_slope_quadratic`].
pub fn quadratic_coefficients(
    data: &Dataset,
    side: &SideInfo,
    variant: QuadraticVariant,
    z: f64,
) -> Result<QuadraticCoefficients> {
    let m = SampleMoments::new(data, side.c)?;
    intervals::quadratic_coefficients(&m, side, variant, z)
}
