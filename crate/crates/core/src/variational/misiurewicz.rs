// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cover::{birkhoff_extremum, check_weight, Extremum, Potential};
use crate::error::{Error, Result};
use crate::measures::{entropy_of, BlockDistribution};
use crate::numeric::{log_sum_exp, neumaier_sum};
use crate::symbolic::{enumerate_words, FactorPair, Word};
use crate::Limits;

/// An `N`-word of `X` together with the lexicographically least continuation
/// attaining the supremum of the Birkhoff sum over its cylinder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representative {
    pub word: Word,
    pub extension: Vec<usize>,
    /// `sup` of the `N`-step Birkhoff sum over the cylinder.
    pub sup: f64,
    /// Index into [`MisiurewiczState::images`].
    pub image: usize,
}

impl Representative {
    /// The marked point: word followed by its extension.
    pub fn point(&self) -> Vec<usize> {
        let mut p = self.word.0.clone();
        p.extend_from_slice(&self.extension);
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisiurewiczState {
    #[serde(rename = "N")]
    pub n: usize,
    pub w: f64,
    pub representatives: Vec<Representative>,
    /// Image words `A`, lexicographic.
    pub images: Vec<Word>,
    /// `log Z_{N,A}` for each image word.
    pub log_z_image: Vec<f64>,
    #[serde(rename = "logZ")]
    pub log_z: f64,
    /// Masses over the representatives' `N`-words.
    pub sigma: BlockDistribution,
}

impl MisiurewiczState {
    /// Masses of the image words under the pushforward of `sigma`.
    pub fn pushforward(&self) -> Vec<f64> {
        let mut masses = vec![Vec::new(); self.images.len()];
        for (r, &p) in self.representatives.iter().zip(&self.sigma.probs) {
            masses[r.image].push(p);
        }
        masses.into_iter().map(neumaier_sum).collect()
    }
}

/// Builds `sigma_N` with `sigma_N(B) = Z_{N,pi(B)}^{w-1} e^{sup_B S_N f} / Z_N`.
pub fn misiurewicz_sigma(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    limits: &Limits,
) -> Result<MisiurewiczState> {
    check_weight(w)?;
    if n == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    let x = pair.x();
    f.validate_for(x, limits.word_cap)?;

    let mut image_index: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    let mut reps = Vec::new();
    for word in enumerate_words(x, n, limits.word_cap)? {
        let ext = birkhoff_extremum(x, f, word.symbols(), n, Extremum::Sup)?;
        if !ext.value.is_finite() {
            continue;
        }
        image_index
            .entry(pair.code().image(word.symbols()))
            .or_default()
            .push(reps.len());
        reps.push(Representative {
            word,
            extension: ext.extension,
            sup: ext.value,
            image: 0,
        });
    }
    if reps.is_empty() {
        return Err(Error::invalid("N", format!("no words of length {n} extend far enough")));
    }

    let mut images = Vec::with_capacity(image_index.len());
    let mut log_z_image = Vec::with_capacity(image_index.len());
    for (i, (image, members)) in image_index.into_iter().enumerate() {
        let sups: Vec<f64> = members.iter().map(|&r| reps[r].sup).collect();
        log_z_image.push(log_sum_exp(&sups));
        for &r in &members {
            reps[r].image = i;
        }
        images.push(image);
    }
    let log_z = log_sum_exp(&log_z_image.iter().map(|&l| w * l).collect::<Vec<_>>());

    let probs: Vec<f64> = reps
        .iter()
        .map(|r| ((w - 1.0) * log_z_image[r.image] + r.sup - log_z).exp())
        .collect();
    let sigma = BlockDistribution {
        n,
        words: reps.iter().map(|r| r.word.clone()).collect(),
        probs,
    };
    Ok(MisiurewiczState {
        n,
        w,
        representatives: reps,
        images,
        log_z_image,
        log_z,
        sigma,
    })
}

/// `|w H(sigma) + (1-w) H(pi_* sigma) + w int S_N f dsigma - log Z_N|`.
pub fn misiurewicz_identity_residual(state: &MisiurewiczState, w: f64) -> f64 {
    let h = state.sigma.entropy();
    let h_image = entropy_of(&state.pushforward());
    let birkhoff = neumaier_sum(
        state
            .representatives
            .iter()
            .zip(&state.sigma.probs)
            .map(|(r, &p)| p * r.sup),
    );
    let lhs = neumaier_sum([w * h, (1.0 - w) * h_image, w * birkhoff]);
    (lhs - state.log_z).abs()
}

/// Both sides of the entropy comparison between `sigma_N` and its Cesàro average.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// `H_mu(B^M) / M`.
    pub upstairs_lhs: f64,
    /// `H_sigma(B^N) / N - 2 M log|B| / N`.
    pub upstairs_rhs: f64,
    pub downstairs_lhs: f64,
    pub downstairs_rhs: f64,
    pub holds: bool,
    /// Number of symbols appended beyond the marked points to reach length `N + M - 1`.
    pub continuation_symbols: usize,
    /// `mu_N` on `M`-words.
    pub mu: BlockDistribution,
}

/// Tolerance on both inequalities.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

/// Averages the shifted `M`-block marginals of `sigma_N` and compares entropies.
///
/// Marked points shorter than `N + M - 1` are continued by the least admissible
/// successor at each step.
pub fn misiurewicz_lower_bound_check(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n: usize,
    m: usize,
    limits: &Limits,
) -> Result<LowerBoundReport> {
    if m == 0 || m > n {
        return Err(Error::invalid("M", format!("{m} is not in 1..={n}")));
    }
    let state = misiurewicz_sigma(pair, w, f, n, limits)?;
    let x = pair.x();
    let len = n + m - 1;
    let mut blocks: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
    let mut appended = 0;
    for (r, &p) in state.representatives.iter().zip(&state.sigma.probs) {
        let mut point = r.point();
        if point.len() < len {
            appended = appended.max(len - point.len());
            x.greedy_extend(&mut point, len);
        }
        for start in 0..n {
            blocks
                .entry(point[start..start + m].to_vec())
                .or_default()
                .push(p / n as f64);
        }
    }
    let mut images: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
    let mut words = Vec::with_capacity(blocks.len());
    let mut probs = Vec::with_capacity(blocks.len());
    for (word, parts) in blocks {
        let mass = neumaier_sum(parts);
        images
            .entry(pair.code().image(&word).0)
            .or_default()
            .push(mass);
        words.push(Word(word));
        probs.push(mass);
    }
    let mu = BlockDistribution { n: m, words, probs };
    let image_masses: Vec<f64> = images.into_values().map(neumaier_sum).collect();

    let (nf, mf) = (n as f64, m as f64);
    let penalty = |symbols: usize| 2.0 * mf * (symbols as f64).ln() / nf;
    let upstairs_lhs = mu.entropy() / mf;
    let upstairs_rhs = state.sigma.entropy() / nf - penalty(x.size());
    let downstairs_lhs = entropy_of(&image_masses) / mf;
    let downstairs_rhs = entropy_of(&state.pushforward()) / nf - penalty(pair.y_symbols().len());
    let holds = upstairs_lhs >= upstairs_rhs - LOWER_BOUND_SLACK
        && downstairs_lhs >= downstairs_rhs - LOWER_BOUND_SLACK;
    Ok(LowerBoundReport {
        n,
        m,
        upstairs_lhs,
        upstairs_rhs,
        downstairs_lhs,
        downstairs_rhs,
        holds,
        continuation_symbols: appended,
        mu,
    })
}
