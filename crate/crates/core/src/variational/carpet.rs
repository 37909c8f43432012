// SPDX-License-Identifier: Apache-2.0

use crate::carpets::{carpet_optimal_weights, CarpetSpec};
use crate::error::Result;
use crate::measures::MarkovMeasure;
use crate::symbolic::Sft;

/// Bernoulli measure on `R` with `p_(x,y) = t(y)^{w-1} / sum_y' t(y')^w`.
pub fn carpet_optimal_measure(c: &CarpetSpec, w: f64) -> Result<MarkovMeasure> {
    crate::cover::check_weight(w)?;
    let sft = Sft::full(c.digits().len())?;
    MarkovMeasure::bernoulli(sft, carpet_optimal_weights(c, w))
}
