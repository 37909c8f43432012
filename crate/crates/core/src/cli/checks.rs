// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cover::{
    amplification_check, growth_limit_bounds, submultiplicativity_violations, CoverOptions, LowerKind,
    Potential,
};
use crate::error::Result;
use crate::measures::{gibbs_slack, power_subadditivity_slack, weighted_measure_value, MarkovMeasure};
use crate::symbolic::{count_words, FactorPair};
use crate::variational::{
    misiurewicz_identity_residual, misiurewicz_lower_bound_check, misiurewicz_sigma, optimize_weighted_value,
    OptimizerConfig,
};

/// Words enumerated per check at most.
const CHECK_BUDGET: u64 = 200_000;
const IDENTITY_TOL: f64 = 1e-10;
const AMPLIFICATION_TOL: f64 = 1e-10;
const SANDWICH_TOL: f64 = 1e-6;
const CARPET_GAP_TOL: f64 = 1e-4;
const SUBMULT_TOL: f64 = 1e-9;
const CALCULUS_TOL: f64 = 1e-12;

/// One named comparison `value <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub slack: f64,
}

impl Check {
    fn new(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= threshold,
            value,
            threshold,
            slack: threshold - value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    pub misiurewicz_identity: f64,
    #[serde(rename = "misiurewicz_N_max")]
    pub misiurewicz_n_max: usize,
    pub misiurewicz_entropy_gap: f64,
    pub amplification: f64,
    pub amplification_cases: usize,
    pub submultiplicativity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    pub label: String,
    pub w: f64,
    pub upper: f64,
    pub lower: f64,
    pub lower_kind: LowerKind,
    pub value_lower: f64,
    pub value_upper: f64,
    pub measure: MarkovMeasure,
    pub residuals: Residuals,
    pub checks: Vec<Check>,
}

fn affordable(pair: &FactorPair, len: usize) -> bool {
    count_words(pair.x(), len) <= BigUint::from(CHECK_BUDGET)
}

/// Runs every check on one pair.
#[allow(clippy::too_many_arguments)]
pub fn verify_instance(
    label: &str,
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    measure: Option<&MarkovMeasure>,
    closed_form: bool,
    n_max: usize,
    opts: &CoverOptions,
    ocfg: &OptimizerConfig,
) -> Result<InstanceReport> {
    let limits = &opts.limits;
    let bounds = growth_limit_bounds(pair, w, f, n_max, opts)?;
    let opt = optimize_weighted_value(pair, w, f, ocfg)?;
    let mut checks = vec![Check::new(
        "variational_inequality",
        opt.value.lower - bounds.upper,
        SANDWICH_TOL,
    )];
    if let Some(m) = measure {
        let v = weighted_measure_value(pair, m, w, f, n_max, limits.word_cap)?;
        checks.push(Check::new("measure_inequality", v.lower - bounds.upper, SANDWICH_TOL));
    }
    if closed_form {
        checks.push(Check::new(
            "variational_gap",
            (bounds.upper - opt.value.lower).abs(),
            CARPET_GAP_TOL,
        ));
    }

    let top = (1..=n_max.min(8)).take_while(|&n| affordable(pair, n)).last().unwrap_or(0);
    let mut identity: f64 = 0.0;
    for n in 1..=top {
        let state = misiurewicz_sigma(pair, w, f, n, limits)?;
        identity = identity.max(misiurewicz_identity_residual(&state, w));
    }
    checks.push(Check::new("misiurewicz_identity", identity, IDENTITY_TOL));
    let mut entropy_gap = f64::NEG_INFINITY;
    if top >= 1 {
        let r = misiurewicz_lower_bound_check(pair, w, f, top, top.min(2), limits)?;
        entropy_gap = (r.upstairs_rhs - r.upstairs_lhs).max(r.downstairs_rhs - r.downstairs_lhs);
        checks.push(Check::new(
            "misiurewicz_entropy_inequality",
            entropy_gap,
            crate::variational::LOWER_BOUND_SLACK,
        ));
    }

    let mut amplification: f64 = 0.0;
    let mut cases = 0;
    for m in 2..=3 {
        for n in 1..=4 {
            if !affordable(pair, m * n) || count_words(pair.x(), m) > BigUint::from(64u32) {
                continue;
            }
            amplification = amplification.max(amplification_check(pair, w, f, m, n, opts)?.residual);
            cases += 1;
        }
    }
    checks.push(Check::new("amplification", amplification, AMPLIFICATION_TOL));

    let excess = submultiplicativity_violations(&bounds.records, SUBMULT_TOL)
        .iter()
        .map(|v| v.2)
        .fold(0.0, f64::max);
    checks.push(Check::new("submultiplicativity", excess, SUBMULT_TOL));

    Ok(InstanceReport {
        label: label.into(),
        w,
        upper: bounds.upper,
        lower: bounds.lower,
        lower_kind: bounds.lower_kind,
        value_lower: opt.value.lower,
        value_upper: opt.value.upper,
        measure: opt.measure,
        residuals: Residuals {
            misiurewicz_identity: identity,
            misiurewicz_n_max: top,
            misiurewicz_entropy_gap: entropy_gap,
            amplification,
            amplification_cases: cases,
            submultiplicativity: excess,
        },
        checks,
    })
}

/// Worst value of each check across instances, in first-seen order.
pub(crate) fn aggregate(instances: &[InstanceReport]) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for c in instances.iter().flat_map(|i| &i.checks) {
        match out.iter_mut().find(|o| o.name == c.name) {
            Some(o) if c.value > o.value || !c.passed => {
                o.value = o.value.max(c.value);
                o.passed &= c.passed;
                o.slack = o.threshold - o.value;
            }
            Some(_) => {}
            None => out.push(c.clone()),
        }
    }
    out
}

/// `count` random instances each of `(x + y)^w <= x^w + y^w` and
/// `sum p (x - ln p) <= ln sum e^x`.
pub fn calculus_check(seed: u64, count: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut power: f64 = 0.0;
    let mut gibbs: f64 = 0.0;
    for _ in 0..count {
        let x = 10f64.powf(rng.gen_range(-6.0..6.0));
        let y = 10f64.powf(rng.gen_range(-6.0..6.0));
        let w = rng.gen_range(0.0..=1.0);
        // relative to the scale of the terms
        let scale = x.powf(w) + y.powf(w);
        power = power.max(-power_subadditivity_slack(x, y, w) / scale.max(1.0));

        let n = rng.gen_range(1..=8);
        let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        let p: Vec<f64> = e.iter().map(|v| v / s).collect();
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        gibbs = gibbs.max(-gibbs_slack(&p, &xs));
    }
    vec![
        Check::new("power_subadditivity", power, CALCULUS_TOL),
        Check::new("gibbs_inequality", gibbs, CALCULUS_TOL),
    ]
}
