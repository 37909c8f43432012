// SPDX-License-Identifier: Apache-2.0

//! Weighted partition sums over Bowen covers and their growth rates.

mod amplify;
mod birkhoff;
mod fiber;
mod growth;
mod partition;
mod potential;
mod projective;

pub use amplify::{amplification_check, power_system, AmplificationReport, PowerSystem};
pub use birkhoff::{birkhoff_extremum, inf_birkhoff, sup_birkhoff, BirkhoffExtremum, Extremum};
pub use growth::{
    growth_limit_bounds, submultiplicativity_violations, BoundSource, GrowthBounds, GrowthRecord,
    LowerKind,
};
pub(crate) use partition::check_weight;
pub use partition::{
    boundary_sums, partition_sums, separated_lower_bound, weighted_partition_sum, BoundarySums,
    CoverOptions, PartitionSums,
};
pub use potential::Potential;
