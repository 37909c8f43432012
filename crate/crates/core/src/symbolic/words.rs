// SPDX-License-Identifier: Apache-2.0

//! Counting, enumeration and entropy of SFT languages.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::sft::{Alphabet, Sft, Word};
use crate::error::{Error, Result};
use crate::numeric::{perron_root, SparseMatrix};

/// Number of admissible words of length `n` (exact).
pub fn count_words(sft: &Sft, n: usize) -> BigUint {
    assert!(n >= 1, "word length must be positive");
    let size = sft.size();
    let mut ending: Vec<BigUint> = vec![BigUint::one(); size];
    for _ in 1..n {
        let mut next = vec![BigUint::zero(); size];
        for (i, c) in ending.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &j in sft.successors(i) {
                next[j] += c;
            }
        }
        ending = next;
    }
    ending.into_iter().sum()
}

/// Lexicographic iterator over admissible words of a fixed length.
pub struct WordIter<'a> {
    sft: &'a Sft,
    len: usize,
    current: Vec<usize>,
    // index of current[i] within its candidate list
    choice: Vec<usize>,
    started: bool,
    done: bool,
}

impl<'a> WordIter<'a> {
    fn candidates(&self, pos: usize) -> usize {
        if pos == 0 {
            self.sft.size()
        } else {
            self.sft.successors(self.current[pos - 1]).len()
        }
    }

    fn symbol_at(&self, pos: usize, idx: usize) -> usize {
        if pos == 0 {
            idx
        } else {
            self.sft.successors(self.current[pos - 1])[idx]
        }
    }

    fn fill_from(&mut self, pos: usize) {
        for p in pos..self.len {
            self.choice[p] = 0;
            self.current[p] = self.symbol_at(p, 0);
        }
    }
}

impl Iterator for WordIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            return Some(Word(self.current.clone()));
        }
        let mut pos = self.len;
        while pos > 0 {
            pos -= 1;
            if self.choice[pos] + 1 < self.candidates(pos) {
                self.choice[pos] += 1;
                self.current[pos] = self.symbol_at(pos, self.choice[pos]);
                self.fill_from(pos + 1);
                return Some(Word(self.current.clone()));
            }
        }
        self.done = true;
        None
    }
}

/// All admissible words of length `n` in lexicographic order.
///
/// Fails with [`Error::CapExceeded`] when there are more than `cap` of them.
pub fn enumerate_words(sft: &Sft, n: usize, cap: u64) -> Result<WordIter<'_>> {
    assert!(n >= 1, "word length must be positive");
    let count = count_words(sft, n);
    if count > BigUint::from(cap) {
        return Err(Error::cap(
            format!("{count} words of length {n}"),
            cap,
        ));
    }
    Ok(WordIter {
        sft,
        len: n,
        current: vec![0; n],
        choice: vec![0; n],
        started: false,
        done: false,
    })
}

/// Topological entropy `log rho(A)` in nats.
pub fn perron_entropy(sft: &Sft) -> Result<f64> {
    let rho = perron_root(&SparseMatrix::from_bool(sft.transitions()), 1e-12, 1_000_000)?;
    Ok(rho.ln())
}

/// `log` of a big count as f64.
pub fn log_count(count: &BigUint) -> f64 {
    match count.to_f64() {
        Some(v) if v.is_finite() && v > 0.0 => v.ln(),
        _ => {
            // beyond f64 range: use the top 64 bits
            let bits = count.bits();
            let shift = bits.saturating_sub(64);
            let top = (count >> shift).to_f64().unwrap_or(f64::MAX);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// `k`-block presentation of an SFT plus the dictionary of its symbols.
#[derive(Debug, Clone)]
pub struct BlockRecoding {
    pub sft: Sft,
    /// `dictionary[s]` is the `k`-word encoded by symbol `s`.
    pub dictionary: Vec<Word>,
    pub index: HashMap<Vec<usize>, usize>,
}

/// Higher block presentation: symbols are admissible `k`-words, and `u -> v` is
/// allowed when `u` and `v` overlap in `k - 1` symbols.
pub fn higher_block_recode(sft: &Sft, k: usize, cap: u64) -> Result<BlockRecoding> {
    assert!(k >= 1, "block length must be positive");
    let dictionary: Vec<Word> = enumerate_words(sft, k, cap)?.collect();
    let index: HashMap<Vec<usize>, usize> = dictionary
        .iter()
        .enumerate()
        .map(|(i, w)| (w.0.clone(), i))
        .collect();
    let n = dictionary.len();
    let mut transitions = vec![vec![false; n]; n];
    for (i, w) in dictionary.iter().enumerate() {
        let last = *w.0.last().expect("k >= 1");
        for &a in sft.successors(last) {
            let mut next: Vec<usize> = w.0[1..].to_vec();
            next.push(a);
            transitions[i][index[&next]] = true;
        }
    }
    let labels = dictionary
        .iter()
        .map(|w| {
            w.0.iter()
                .map(|&s| sft.alphabet().label(s))
                .collect::<Vec<_>>()
                .join("")
        })
        .collect::<Vec<_>>();
    let alphabet = if k == 1 {
        sft.alphabet().clone()
    } else {
        Alphabet::with_labels(labels).or_else(|_| Alphabet::new(n))?
    };
    Ok(BlockRecoding {
        sft: Sft::new(alphabet, transitions)?,
        dictionary,
        index,
    })
}
