// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::code::BlockCode;
use super::presentation::{image_presentation, SoficPresentation};
use super::sft::{Sft, Word};
use super::words::BlockRecoding;
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Factor map `x -> y` given by a 1-block code, with a deterministic
/// presentation of the downstairs shift.
#[derive(Debug, Clone)]
pub struct FactorPair {
    x: Sft,
    code: BlockCode,
    y: SoficPresentation,
    y_is_sft: Option<bool>,
}

impl FactorPair {
    /// Builds the pair with `y` the image of `x` under `code`.
    pub fn new(x: Sft, code: BlockCode, limits: &Limits) -> Result<Self> {
        let y = image_presentation(&x, &code, limits)?;
        let y_is_sft = y.is_one_step_sft();
        Ok(FactorPair {
            x,
            code,
            y,
            y_is_sft,
        })
    }

    /// Accepts a window-`k` code by first recoding `x` to its `k`-block shift.
    pub fn from_block_code(
        x: &Sft,
        code: &BlockCode,
        limits: &Limits,
    ) -> Result<(Self, Option<BlockRecoding>)> {
        if code.window() == 1 {
            return Ok((FactorPair::new(x.clone(), code.clone(), limits)?, None));
        }
        let (recoding, one) = code.to_one_block(x, limits.word_cap)?;
        let pair = FactorPair::new(recoding.sft.clone(), one, limits)?;
        Ok((pair, Some(recoding)))
    }

    /// Uses a caller-supplied presentation for `y`. Nothing is checked beyond
    /// alphabet sizes; see [`validate_factor_pair`].
    pub fn with_target(x: Sft, code: BlockCode, y: SoficPresentation) -> Result<Self> {
        if code.window() != 1 {
            return Err(Error::invalid("code_window", "factor pairs need a 1-block code"));
        }
        if code.domain_size() != x.size() {
            return Err(Error::invalid("code", "domain size does not match shift alphabet"));
        }
        if y.num_labels() != code.codomain().size() {
            return Err(Error::invalid(
                "y",
                "presentation labels do not match code codomain",
            ));
        }
        let y_is_sft = y.is_one_step_sft();
        Ok(FactorPair {
            x,
            code,
            y,
            y_is_sft,
        })
    }

    pub fn x(&self) -> &Sft {
        &self.x
    }

    pub fn code(&self) -> &BlockCode {
        &self.code
    }

    pub fn y(&self) -> &SoficPresentation {
        &self.y
    }

    /// Whether `y` is a one-step SFT on the codomain alphabet (`None` when the
    /// presentation was too large to decide).
    pub fn y_is_sft(&self) -> Option<bool> {
        self.y_is_sft
    }

    #[inline]
    pub fn label(&self, x_symbol: usize) -> usize {
        self.code.apply(x_symbol)
    }

    /// Codomain symbols that actually occur in `y`.
    pub fn y_symbols(&self) -> Vec<usize> {
        (0..self.y.num_labels())
            .filter(|&a| self.y.step(self.y.start(), a).is_some())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub length: usize,
    pub word: Vec<usize>,
    /// True if the word is a code image missing from `y`, false if `y`
    /// contains a word that is not an image.
    pub is_image: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checked_up_to: usize,
    pub counterexample: Option<Counterexample>,
}

/// Image words of length `n` in lexicographic order.
pub(crate) fn image_words(x: &Sft, code: &BlockCode, n: usize, cap: u64) -> Result<Vec<Word>> {
    let labels = code.codomain().size();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    let start: Vec<Vec<usize>> = (0..labels)
        .map(|a| (0..x.size()).filter(|&j| code.apply(j) == a).collect())
        .collect();

    fn descend(
        x: &Sft,
        code: &BlockCode,
        ends: &[usize],
        remaining: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Word>,
        cap: u64,
    ) -> Result<()> {
        if remaining == 0 {
            if out.len() as u64 >= cap {
                return Err(Error::cap("image words", cap));
            }
            out.push(Word(prefix.clone()));
            return Ok(());
        }
        let labels = code.codomain().size();
        let mut next: Vec<Vec<usize>> = vec![Vec::new(); labels];
        let mut seen = vec![false; x.size()];
        for &i in ends {
            for &j in x.successors(i) {
                if !seen[j] {
                    seen[j] = true;
                    next[code.apply(j)].push(j);
                }
            }
        }
        for (a, set) in next.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            prefix.push(a);
            descend(x, code, set, remaining - 1, prefix, out, cap)?;
            prefix.pop();
        }
        Ok(())
    }

    for (a, set) in start.iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        prefix.push(a);
        descend(x, code, set, n - 1, &mut prefix, &mut out, cap)?;
        prefix.pop();
    }
    Ok(out)
}

/// Checks `{code(u) : u in L_n(x)} = L_n(y)` for every `n <= max_len`.
///
/// A mismatch is reported, not raised; only resource caps produce errors.
pub fn validate_factor_pair(
    pair: &FactorPair,
    max_len: usize,
    limits: &Limits,
) -> Result<ValidationReport> {
    for n in 1..=max_len {
        let images = image_words(&pair.x, &pair.code, n, limits.word_cap)?;
        let presented = pair.y.words(n, limits.word_cap)?;
        let (mut i, mut j) = (0, 0);
        while i < images.len() || j < presented.len() {
            let ord = match (images.get(i), presented.get(j)) {
                (Some(a), Some(b)) => a.cmp(b),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match ord {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    return Ok(ValidationReport {
                        passed: false,
                        checked_up_to: n,
                        counterexample: Some(Counterexample {
                            length: n,
                            word: images[i].0.clone(),
                            is_image: true,
                        }),
                    })
                }
                std::cmp::Ordering::Greater => {
                    return Ok(ValidationReport {
                        passed: false,
                        checked_up_to: n,
                        counterexample: Some(Counterexample {
                            length: n,
                            word: presented[j].0.clone(),
                            is_image: false,
                        }),
                    })
                }
            }
        }
    }
    Ok(ValidationReport {
        passed: true,
        checked_up_to: max_len,
        counterexample: None,
    })
}
