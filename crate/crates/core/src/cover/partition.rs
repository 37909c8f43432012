// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::fiber::{check_cap, FiberEngine, FiberSums, Job};
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::Precision;
use crate::symbolic::FactorPair;

/// Settings shared by every partition-sum computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverOptions {
    /// Extra symbols `m`: sums run over cylinders of length `N + m`.
    pub resolution: usize,
    pub precision: Precision,
    pub limits: Limits,
    /// Split the word tree across threads. Results do not depend on it.
    pub parallel: bool,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            resolution: 0,
            precision: Precision::Double,
            limits: Limits::default(),
            parallel: true,
        }
    }
}

impl CoverOptions {
    pub fn with_resolution(mut self, m: usize) -> Self {
        self.resolution = m;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

/// `log Z_N` from suprema and from infima of the Birkhoff sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionSums {
    pub n: usize,
    pub log_z: f64,
    pub log_z_separated: f64,
    /// Number of image words of length `N + m`.
    pub image_words: u64,
}

/// `log Z_N` split by first and last preimage symbol:
/// `sup[b][e] = log sum_v I_{be}(v)^w`, `-inf` where no fiber word runs from `b` to `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySums {
    pub n: usize,
    pub sup: Vec<Vec<f64>>,
    pub inf: Vec<Vec<f64>>,
}

pub(crate) fn check_weight(w: f64) -> Result<()> {
    if !w.is_finite() || !(0.0..=1.0).contains(&w) {
        return Err(Error::invalid("w", format!("{w} is not in [0, 1]")));
    }
    Ok(())
}

fn run(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    opts: &CoverOptions,
    tagged: bool,
) -> Result<FiberSums> {
    check_weight(w)?;
    if n == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    f.validate_for(pair.x(), opts.limits.word_cap)?;
    let len = n + opts.resolution;
    check_cap(pair, len, opts.limits.word_cap)?;
    let engine = FiberEngine::new(pair, f, opts.limits.state_cap as u64)?;
    engine.run(&Job {
        n,
        len,
        w,
        tagged,
        precision: opts.precision,
        parallel: opts.parallel,
    })
}

/// Both partition sums for one `N`.
pub fn partition_sums(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    opts: &CoverOptions,
) -> Result<PartitionSums> {
    let s = run(pair, w, f, n, opts, false)?;
    finish(n, &s)
}

fn finish(n: usize, s: &FiberSums) -> Result<PartitionSums> {
    let log_z = s.sup.value();
    let log_z_separated = s.inf.value();
    if !log_z.is_finite() || log_z_separated.is_nan() {
        return Err(Error::NonFinite(format!("log Z_{n} = {log_z}")));
    }
    Ok(PartitionSums {
        n,
        log_z,
        log_z_separated,
        image_words: s.leaves,
    })
}

/// `log Z_N(pi, f, w)`.
pub fn weighted_partition_sum(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    opts: &CoverOptions,
) -> Result<f64> {
    Ok(partition_sums(pair, w, f, n, opts)?.log_z)
}

/// The same sum with every supremum replaced by an infimum over the cylinder.
pub fn separated_lower_bound(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    opts: &CoverOptions,
) -> Result<f64> {
    Ok(partition_sums(pair, w, f, n, opts)?.log_z_separated)
}

/// Partition sums together with their split by boundary symbols.
pub fn boundary_sums(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    opts: &CoverOptions,
) -> Result<(PartitionSums, BoundarySums)> {
    let s = run(pair, w, f, n, opts, true)?;
    let sums = finish(n, &s)?;
    let nx = pair.x().size();
    let b = s.boundary.as_ref().expect("tagged run");
    let grid = |cells: &[crate::numeric::LogSumExp]| {
        (0..nx)
            .map(|i| (0..nx).map(|j| cells[i * nx + j].value()).collect())
            .collect()
    };
    Ok((
        sums,
        BoundarySums {
            n,
            sup: grid(&b.sup),
            inf: grid(&b.inf),
        },
    ))
}
