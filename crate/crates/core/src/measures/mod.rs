// SPDX-License-Identifier: Apache-2.0

//! Entropy of partitions, Markov measures and their images under codes.

mod distribution;
mod factor;
mod markov;

pub use distribution::{
    conditional_entropy, entropy_of, gibbs_slack, power_subadditivity_slack, shannon_entropy,
    Distribution,
};
pub use factor::{
    factor_entropy_bounds, pushforward_block, weighted_measure_value, FactorEntropyBounds,
    MeasureValue,
};
pub use markov::{block_distribution, integral, markov_entropy_rate, BlockDistribution, MarkovMeasure};
