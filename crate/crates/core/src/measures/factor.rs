// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::distribution::entropy_of;
use super::markov::{integral, markov_entropy_rate, BlockDistribution, MarkovMeasure};
use crate::cover::Potential;
use crate::error::{Error, Result};
use crate::numeric::{neg_xlogx, neumaier_sum, Precision, Summer};
use crate::symbolic::{BlockCode, FactorPair, Word};

fn check_code(m: &MarkovMeasure, code: &BlockCode) -> Result<()> {
    if code.window() != 1 {
        return Err(Error::invalid("code_window", "pushforward needs a 1-block code"));
    }
    if code.domain_size() != m.sft().size() {
        return Err(Error::invalid("code", "domain size differs from the measure's alphabet"));
    }
    Ok(())
}

/// `nu(v) = mu(code^{-1} [v])` on words of length `n` with positive mass.
pub fn pushforward_block(
    m: &MarkovMeasure,
    code: &BlockCode,
    n: usize,
    cap: u64,
) -> Result<BlockDistribution> {
    check_code(m, code)?;
    if n == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    let labels = code.codomain().size();
    let d = m.sft().size();
    let mut words = Vec::new();
    let mut probs = Vec::new();
    // forward vectors alpha(s) = mu(prefix image, current symbol s)
    let mut stack: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for y in (0..labels).rev() {
        let alpha: Vec<f64> = (0..d)
            .map(|s| if code.apply(s) == y { m.stationary()[s] } else { 0.0 })
            .collect();
        if alpha.iter().any(|&v| v > 0.0) {
            stack.push((vec![y], alpha));
        }
    }
    while let Some((word, alpha)) = stack.pop() {
        if word.len() == n {
            if words.len() as u64 >= cap {
                return Err(Error::cap(format!("image words of length {n}"), cap));
            }
            probs.push(neumaier_sum(alpha.iter().copied()));
            words.push(Word(word));
            continue;
        }
        for y in (0..labels).rev() {
            let next = step(m, code, &alpha, y);
            if next.iter().any(|&v| v > 0.0) {
                let mut w = word.clone();
                w.push(y);
                stack.push((w, next));
            }
        }
    }
    Ok(BlockDistribution { n, words, probs })
}

fn step(m: &MarkovMeasure, code: &BlockCode, alpha: &[f64], y: usize) -> Vec<f64> {
    let d = alpha.len();
    let p = m.transition();
    let mut out = vec![0.0; d];
    for (s, &a) in alpha.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for t in 0..d {
            if p[s][t] > 0.0 && code.apply(t) == y {
                out[t] += a * p[s][t];
            }
        }
    }
    out
}

/// Enclosure of the entropy rate of the image process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorEntropyBounds {
    pub lower: f64,
    pub upper: f64,
    pub n_max: usize,
    /// `H(nu on n-words)` for `n = 1 ..= n_max`.
    pub block_entropies: Vec<f64>,
    /// Set when the image process is i.i.d. and the rate is known exactly.
    pub exact: bool,
}

impl FactorEntropyBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Sandwich bounds on `h(nu)`:
/// `H(Y_n | Y_1..n-1, X_1) <= h <= min(H(Y_1..n)/n, H(Y_n | Y_1..n-1))`,
/// each side optimised over `n <= n_max`.
pub fn factor_entropy_bounds(
    m: &MarkovMeasure,
    code: &BlockCode,
    n_max: usize,
    cap: u64,
) -> Result<FactorEntropyBounds> {
    check_code(m, code)?;
    if n_max == 0 {
        return Err(Error::invalid("nmax", "must be at least 1"));
    }
    let d = m.sft().size();
    let labels = code.codomain().size();

    if m.memory() == 0 && m.sft().is_full() {
        let mut q = vec![0.0; labels];
        for (s, &p) in m.stationary().iter().enumerate() {
            q[code.apply(s)] += p;
        }
        let h = entropy_of(&q);
        return Ok(FactorEntropyBounds {
            lower: h,
            upper: h,
            n_max,
            block_entropies: (1..=n_max).map(|n| n as f64 * h).collect(),
            exact: true,
        });
    }

    // joint[x1 * d + s] = P(X_1 = x1, Y_1..n = v, X_n = s)
    let mut h_blocks: Vec<Summer> = vec![Summer::new(Precision::Extended); n_max];
    let mut h_joint: Vec<Summer> = vec![Summer::new(Precision::Extended); n_max];
    let mut visited: u64 = 0;
    let mut stack: Vec<(usize, Vec<f64>)> = Vec::new();
    for y in (0..labels).rev() {
        let mut joint = vec![0.0; d * d];
        for s in 0..d {
            if code.apply(s) == y {
                joint[s * d + s] = m.stationary()[s];
            }
        }
        if joint.iter().any(|&v| v > 0.0) {
            stack.push((1, joint));
        }
    }
    let p = m.transition();
    while let Some((depth, joint)) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::cap("image words in entropy bounds", cap));
        }
        let mut total = 0.0;
        for x1 in 0..d {
            let row: f64 = joint[x1 * d..(x1 + 1) * d].iter().sum();
            total += row;
            h_joint[depth - 1].add(neg_xlogx(row));
        }
        h_blocks[depth - 1].add(neg_xlogx(total));
        if depth == n_max {
            continue;
        }
        for y in (0..labels).rev() {
            let mut next = vec![0.0; d * d];
            let mut any = false;
            for x1 in 0..d {
                for s in 0..d {
                    let a = joint[x1 * d + s];
                    if a == 0.0 {
                        continue;
                    }
                    for t in 0..d {
                        if p[s][t] > 0.0 && code.apply(t) == y {
                            next[x1 * d + t] += a * p[s][t];
                            any = true;
                        }
                    }
                }
            }
            if any {
                stack.push((depth + 1, next));
            }
        }
    }
    let hb: Vec<f64> = h_blocks.iter().map(|s| s.value()).collect();
    let hj: Vec<f64> = h_joint.iter().map(|s| s.value()).collect();
    let mut upper = f64::INFINITY;
    let mut lower: f64 = 0.0;
    for n in 1..=n_max {
        let prev = if n == 1 { 0.0 } else { hb[n - 2] };
        upper = upper.min(hb[n - 1] / n as f64).min(hb[n - 1] - prev);
        if n >= 2 {
            lower = lower.max(hj[n - 1] - hj[n - 2]);
        }
    }
    let upper = upper.max(0.0);
    Ok(FactorEntropyBounds {
        lower: lower.min(upper),
        upper,
        n_max,
        block_entropies: hb,
        exact: false,
    })
}

/// `w h_mu + (1 - w) h_{pi mu} + w int f dmu`, as an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue {
    pub lower: f64,
    pub upper: f64,
    pub entropy: f64,
    pub integral: f64,
    /// Absent at `w = 1`, where the image entropy carries no weight.
    pub factor: Option<FactorEntropyBounds>,
}

pub fn weighted_measure_value(
    pair: &FactorPair,
    m: &MarkovMeasure,
    w: f64,
    f: &Potential,
    n_max: usize,
    cap: u64,
) -> Result<MeasureValue> {
    crate::cover::check_weight(w)?;
    m.check_support(pair.x())?;
    f.validate_for(pair.x(), cap)?;
    let h = markov_entropy_rate(m);
    let fi = integral(m, f, cap)?;
    let base = w * h + w * fi;
    if w == 1.0 {
        return Ok(MeasureValue {
            lower: base,
            upper: base,
            entropy: h,
            integral: fi,
            factor: None,
        });
    }
    let fb = factor_entropy_bounds(m, pair.code(), n_max, cap)?;
    Ok(MeasureValue {
        lower: base + (1.0 - w) * fb.lower,
        upper: base + (1.0 - w) * fb.upper,
        entropy: h,
        integral: fi,
        factor: Some(fb),
    })
}
