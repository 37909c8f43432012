// SPDX-License-Identifier: Apache-2.0

//! Higher-power presentations: `(X, sigma^m) -> (Y, sigma^m)` with potential `S_m f`.

use std::collections::HashMap;

use serde::Serialize;

use super::partition::{weighted_partition_sum, CoverOptions};
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::symbolic::{enumerate_words, Alphabet, BlockCode, FactorPair, Sft, Word};

/// The `m`-th power of a factor pair, recoded on `m`-blocks.
#[derive(Debug, Clone)]
pub struct PowerSystem {
    pub m: usize,
    pub pair: FactorPair,
    pub potential: Potential,
    /// Symbol `i` of the power shift is the block `x_words[i]`.
    pub x_words: Vec<Word>,
    pub y_words: Vec<Word>,
}

pub fn power_system(pair: &FactorPair, f: &Potential, m: usize, opts: &CoverOptions) -> Result<PowerSystem> {
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    let cap = opts.limits.word_cap;
    let x = pair.x();
    let x_words: Vec<Word> = enumerate_words(x, m, cap)?.collect();
    let y_words = pair.y().words(m, cap)?;
    let y_index: HashMap<&[usize], usize> =
        y_words.iter().enumerate().map(|(i, w)| (w.symbols(), i)).collect();

    let transitions: Vec<Vec<bool>> = x_words
        .iter()
        .map(|u| {
            let last = *u.0.last().expect("nonempty");
            x_words.iter().map(|v| x.allows(last, v.0[0])).collect()
        })
        .collect();
    let labels = x_words.iter().map(|w| w.to_string()).collect();
    let power = Sft::new(Alphabet::with_labels(labels)?, transitions)?;

    let mut table = Vec::with_capacity(x_words.len());
    for u in &x_words {
        let image = pair.code().image(&u.0);
        match y_index.get(image.symbols()) {
            Some(&j) => table.push(j),
            None => {
                return Err(Error::invalid("y", format!("image of block {u} missing from y")));
            }
        }
    }
    let y_labels = y_words.iter().map(|w| w.to_string()).collect();
    let code = BlockCode::new(power.size(), Alphabet::with_labels(y_labels)?, table)?;

    let k = f.window();
    let window = 1 + (k - 1).div_ceil(m);
    let potential = Potential::tabulate(&power, window, cap, |blocks| {
        let word: Vec<usize> = blocks.iter().flat_map(|&b| x_words[b].0.iter().copied()).collect();
        (0..m).map(|i| f.value(&word[i..i + k])).sum()
    })?;
    let power_pair = FactorPair::new(power, code, &opts.limits)?;
    Ok(PowerSystem {
        m,
        pair: power_pair,
        potential,
        x_words,
        y_words,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationReport {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub log_z_power: f64,
    pub log_z_direct: f64,
    pub residual: f64,
}

/// Compares `log Z_N` of the `m`-th power system with `log Z_{mN}` of the
/// original pair.
pub fn amplification_check(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    m: usize,
    n: usize,
    opts: &CoverOptions,
) -> Result<AmplificationReport> {
    let power = power_system(pair, f, m, opts)?;
    let base = CoverOptions {
        resolution: 0,
        ..*opts
    };
    let log_z_power = weighted_partition_sum(&power.pair, w, &power.potential, n, &base)?;
    let log_z_direct = weighted_partition_sum(pair, w, f, m * n, &base)?;
    Ok(AmplificationReport {
        m,
        n,
        log_z_power,
        log_z_direct,
        residual: (log_z_power - log_z_direct).abs(),
    })
}
