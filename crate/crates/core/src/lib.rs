//! Estimation and inference for the linear structural errors-in-variables model
//!
//! ```text
//! y_i = β ξ_i + α + δ_i,    x_i = ξ_i + ε_i,
//! ```
//!
//! where the latent `ξ_i` only need to lie in the domain of attraction of the
//! normal law (infinite variance allowed) and one of two sets of error moments
//! is known. The crate provides the modified least-squares estimators, their
//! Studentized and self-normalized pivots, three families of large-sample
//! confidence intervals, heavy-tailed data generators, and a deterministic
//! Monte Carlo harness for checking coverage, normality and rates.

pub mod config;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod moments;
pub mod montecarlo;
pub mod normal;
pub mod rng;
pub mod samplers;

pub use data::{Dataset, Latent};
pub use error::{EivError, Guard, Result};
pub use estimators::{
    estimate, estimate_case1, estimate_case2, naive_ratio, naive_ratio_estimates, reliability_ratio, Case, GuardValues,
    Identification, NaiveEstimates, NaiveRatio, PointEstimate, SideInfo,
};
pub use moments::{cross_moment_summary, CrossMomentSummary, InterceptFlag};
pub use samplers::{simulate_dataset, ErrorBase, ErrorSpec, ModelSpec, XiDistribution};
