// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite alphabet `{0, .., size-1}` with optional display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("alphabet_size", "must be at least 1"));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("labels", "must be nonempty"));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::invalid("labels", format!("duplicate label {l:?}")));
            }
        }
        Ok(Alphabet {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, symbol: usize) -> String {
        match &self.labels {
            Some(l) => l[symbol].clone(),
            None => symbol.to_string(),
        }
    }

    /// Sub-alphabet keeping the listed symbols in order.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Alphabet {
        Alphabet {
            size: keep.len(),
            labels: self
                .labels
                .as_ref()
                .map(|l| keep.iter().map(|&i| l[i].clone()).collect()),
        }
    }
}

/// A finite sequence of symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// One-step subshift of finite type given by a 0/1 transition matrix.
///
/// Construction keeps only the essential part: symbols without an allowed
/// predecessor or successor are removed (repeatedly) with a warning, and
/// `origin()` maps each surviving symbol back to its input index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    alphabet: Alphabet,
    transitions: Vec<Vec<bool>>,
    successors: Vec<Vec<usize>>,
    origin: Vec<usize>,
}

impl Sft {
    pub fn new(alphabet: Alphabet, transitions: Vec<Vec<bool>>) -> Result<Self> {
        let n = alphabet.size();
        if transitions.len() != n {
            return Err(Error::invalid(
                "transitions",
                format!("expected {n} rows, found {}", transitions.len()),
            ));
        }
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(
                    format!("transitions[{i}]"),
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
        }

        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if !alive[i] {
                    continue;
                }
                let has_out = (0..n).any(|j| alive[j] && transitions[i][j]);
                let has_in = (0..n).any(|j| alive[j] && transitions[j][i]);
                if !(has_out && has_in) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        if keep.is_empty() {
            return Err(Error::invalid(
                "transitions",
                "no essential symbols: the shift is empty",
            ));
        }
        if keep.len() < n {
            let dropped: Vec<usize> = (0..n).filter(|&i| !alive[i]).collect();
            log::warn!("pruned non-essential symbols {dropped:?}");
        }
        let transitions: Vec<Vec<bool>> = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| transitions[i][j]).collect())
            .collect();
        let successors = transitions
            .iter()
            .map(|row| (0..row.len()).filter(|&j| row[j]).collect())
            .collect();
        Ok(Sft {
            alphabet: alphabet.restrict(&keep),
            transitions,
            successors,
            origin: keep,
        })
    }

    /// Full shift on `n` symbols.
    pub fn full(n: usize) -> Result<Self> {
        Sft::new(Alphabet::new(n)?, vec![vec![true; n]; n])
    }

    /// Binary shift forbidding the word `11`.
    pub fn golden_mean() -> Self {
        Sft::new(
            Alphabet::new(2).expect("nonzero"),
            vec![vec![true, true], vec![true, false]],
        )
        .expect("golden mean shift is essential")
    }

    pub fn from_01(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut t = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => r.push(false),
                    1 => r.push(true),
                    _ => {
                        return Err(Error::invalid(
                            format!("transitions[{i}][{j}]"),
                            "entries must be 0 or 1",
                        ))
                    }
                }
            }
            t.push(r);
        }
        Sft::new(Alphabet::new(n)?, t)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn transitions(&self) -> &[Vec<bool>] {
        &self.transitions
    }

    #[inline]
    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.transitions[i][j]
    }

    /// Allowed successors of `i`, ascending.
    #[inline]
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// Input index of each surviving symbol.
    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn is_full(&self) -> bool {
        self.transitions.iter().all(|r| r.iter().all(|&b| b))
    }

    pub fn num_transitions(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn is_admissible(&self, word: &[usize]) -> bool {
        word.iter().all(|&s| s < self.size()) && word.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    pub(crate) fn check_admissible(&self, word: &[usize]) -> Result<()> {
        if self.is_admissible(word) {
            Ok(())
        } else {
            Err(Error::Inadmissible {
                word: word.to_vec(),
            })
        }
    }

    /// Smallest `p` with every entry of `A^p` positive, if the shift is primitive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.size();
        let bound = (n - 1) * (n - 1) + 1;
        let mut power = self.transitions.clone();
        for p in 1..=bound {
            if power.iter().all(|r| r.iter().all(|&b| b)) {
                return Some(p);
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if power[i][k] {
                        for &j in self.successors(k) {
                            next[i][j] = true;
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }

    /// Lexicographically least admissible continuation of `word` to `len` symbols.
    pub(crate) fn greedy_extend(&self, word: &mut Vec<usize>, len: usize) {
        while word.len() < len {
            let last = *word.last().expect("nonempty word");
            word.push(self.successors(last)[0]);
        }
    }
}
