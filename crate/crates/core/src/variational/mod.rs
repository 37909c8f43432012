// SPDX-License-Identifier: Apache-2.0

//! The measure side: optimisation over Markov families, the carpet optimum,
//! and the Misiurewicz measures built from partition sums.

mod carpet;
mod misiurewicz;
mod optimizer;

pub use carpet::carpet_optimal_measure;
pub use misiurewicz::{
    misiurewicz_identity_residual, misiurewicz_lower_bound_check, misiurewicz_sigma,
    LowerBoundReport, MisiurewiczState, Representative, LOWER_BOUND_SLACK,
};
pub use optimizer::{optimize_weighted_value, Family, OptimizerConfig, Optimum, RestartReport};
