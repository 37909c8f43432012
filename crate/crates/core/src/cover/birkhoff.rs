// SPDX-License-Identifier: Apache-2.0

//! Extremal Birkhoff sums over cylinders.

use super::potential::Potential;
use crate::error::{Error, Result};
use crate::symbolic::{FactorPair, Sft, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Sup,
    Inf,
}

impl Extremum {
    #[inline]
    fn better(self, candidate: f64, current: f64) -> bool {
        match self {
            Extremum::Sup => candidate > current,
            Extremum::Inf => candidate < current,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffExtremum {
    pub value: f64,
    /// Lexicographically least continuation of the word attaining `value`.
    pub extension: Vec<usize>,
}

/// Extremum over the cylinder `[u]` of `f + f∘T + ... + f∘T^{sum_len-1}`.
///
/// The sum reads coordinates `0 .. sum_len + k - 2`; coordinates beyond `u`
/// range over admissible continuations. Returns `-inf`/`+inf` with an empty
/// extension when `u` cannot be continued far enough.
pub fn birkhoff_extremum(
    x: &Sft,
    f: &Potential,
    u: &[usize],
    sum_len: usize,
    mode: Extremum,
) -> Result<BirkhoffExtremum> {
    if u.is_empty() {
        return Err(Error::invalid("word", "must be nonempty"));
    }
    x.check_admissible(u)?;
    let k = f.window();
    let needed = sum_len + k - 1;
    let ext_len = needed.saturating_sub(u.len());
    if ext_len == 0 {
        let value = (0..sum_len).map(|n| f.value(&u[n..n + k])).sum();
        return Ok(BirkhoffExtremum {
            value,
            extension: Vec::new(),
        });
    }
    // windows contained in u
    let inside = (u.len() + 1).saturating_sub(k).min(sum_len);
    let base: f64 = (0..inside).map(|n| f.value(&u[n..n + k])).sum();

    let mut point: Vec<usize> = u.to_vec();
    let mut best: Option<(f64, Vec<usize>)> = None;
    search(x, f, &mut point, u.len(), needed, inside, sum_len, base, mode, &mut best);
    Ok(match best {
        Some((value, ext)) => BirkhoffExtremum {
            value,
            extension: ext,
        },
        None => BirkhoffExtremum {
            value: match mode {
                Extremum::Sup => f64::NEG_INFINITY,
                Extremum::Inf => f64::INFINITY,
            },
            extension: Vec::new(),
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    x: &Sft,
    f: &Potential,
    point: &mut Vec<usize>,
    word_len: usize,
    needed: usize,
    first_window: usize,
    sum_len: usize,
    base: f64,
    mode: Extremum,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    if point.len() == needed {
        let k = f.window();
        let tail: f64 = (first_window..sum_len)
            .map(|n| f.value(&point[n..n + k]))
            .sum();
        let value = base + tail;
        let improves = match best {
            None => true,
            Some((b, _)) => mode.better(value, *b),
        };
        if improves {
            *best = Some((value, point[word_len..].to_vec()));
        }
        return;
    }
    let last = *point.last().expect("nonempty");
    for &a in x.successors(last) {
        point.push(a);
        search(x, f, point, word_len, needed, first_window, sum_len, base, mode, best);
        point.pop();
    }
}

/// `sup` over `[u]` of the Birkhoff sum of length `|u|`.
pub fn sup_birkhoff(pair: &FactorPair, f: &Potential, u: &Word) -> Result<f64> {
    Ok(birkhoff_extremum(pair.x(), f, &u.0, u.len(), Extremum::Sup)?.value)
}

/// `inf` over `[u]` of the Birkhoff sum of length `|u|`.
pub fn inf_birkhoff(pair: &FactorPair, f: &Potential, u: &Word) -> Result<f64> {
    Ok(birkhoff_extremum(pair.x(), f, &u.0, u.len(), Extremum::Inf)?.value)
}
