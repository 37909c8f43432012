// SPDX-License-Identifier: Apache-2.0

//! Deterministic (right-resolving) presentations of sofic shifts.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::code::BlockCode;
use super::sft::{Sft, Word};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::{perron_root, SparseMatrix};

/// Deterministic automaton whose readable words from `start` form the
/// language of a shift. Every state is accepting; a missing transition rejects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoficPresentation {
    labels: usize,
    start: usize,
    delta: Vec<Vec<Option<usize>>>,
}

impl SoficPresentation {
    pub fn new(labels: usize, start: usize, delta: Vec<Vec<Option<usize>>>) -> Result<Self> {
        if start >= delta.len() {
            return Err(Error::invalid("start", "state out of range"));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != labels {
                return Err(Error::invalid(
                    format!("delta[{q}]"),
                    format!("expected {labels} labels"),
                ));
            }
            if row.iter().flatten().any(|&t| t >= delta.len()) {
                return Err(Error::invalid(format!("delta[{q}]"), "state out of range"));
            }
        }
        Ok(SoficPresentation {
            labels,
            start,
            delta,
        })
    }

    /// The SFT itself as a presentation: a start state plus one state per symbol.
    pub fn from_sft(sft: &Sft) -> Self {
        let n = sft.size();
        let mut delta = vec![vec![None; n]; n + 1];
        for a in 0..n {
            delta[0][a] = Some(a + 1);
            for &b in sft.successors(a) {
                delta[a + 1][b] = Some(b + 1);
            }
        }
        SoficPresentation {
            labels: n,
            start: 0,
            delta,
        }
    }

    pub fn num_labels(&self) -> usize {
        self.labels
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn step(&self, state: usize, label: usize) -> Option<usize> {
        self.delta[state][label]
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = self.start;
        for &a in word {
            if a >= self.labels {
                return false;
            }
            match self.step(q, a) {
                Some(n) => q = n,
                None => return false,
            }
        }
        true
    }

    /// Exact `|L_n|`.
    pub fn count_words(&self, n: usize) -> BigUint {
        let mut counts = vec![BigUint::zero(); self.num_states()];
        counts[self.start] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); self.num_states()];
            for (q, c) in counts.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for t in self.delta[q].iter().flatten() {
                    next[*t] += c;
                }
            }
            counts = next;
        }
        counts.into_iter().sum()
    }

    /// `L_n` in lexicographic order.
    pub fn words(&self, n: usize, cap: u64) -> Result<Vec<Word>> {
        let count = self.count_words(n);
        if count > BigUint::from(cap) {
            return Err(Error::cap(format!("{count} words of length {n}"), cap));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(n);
        self.collect(self.start, n, &mut prefix, &mut out);
        Ok(out)
    }

    fn collect(&self, q: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word(prefix.clone()));
            return;
        }
        for a in 0..self.labels {
            if let Some(t) = self.step(q, a) {
                prefix.push(a);
                self.collect(t, remaining - 1, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Label-count matrix between states.
    pub fn adjacency(&self) -> SparseMatrix {
        let rows = self
            .delta
            .iter()
            .map(|row| {
                let mut counts: Vec<(usize, f64)> = Vec::new();
                for t in row.iter().flatten() {
                    match counts.iter_mut().find(|(j, _)| j == t) {
                        Some(e) => e.1 += 1.0,
                        None => counts.push((*t, 1.0)),
                    }
                }
                counts
            })
            .collect();
        SparseMatrix {
            n: self.num_states(),
            rows,
        }
    }

    /// Topological entropy of the presented shift, in nats.
    pub fn entropy(&self) -> Result<f64> {
        Ok(perron_root(&self.adjacency(), 1e-12, 1_000_000)?.ln())
    }

    /// Moore partition refinement; returns the minimal equivalent automaton.
    pub fn minimize(&self) -> SoficPresentation {
        let n = self.num_states();
        let mut class = vec![0usize; n];
        let mut num_classes = 1;
        loop {
            let mut sig_index: HashMap<(usize, Vec<Option<usize>>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for q in 0..n {
                let sig = (
                    class[q],
                    self.delta[q].iter().map(|t| t.map(|t| class[t])).collect(),
                );
                let len = sig_index.len();
                next[q] = *sig_index.entry(sig).or_insert(len);
            }
            let count = sig_index.len();
            class = next;
            if count == num_classes {
                break;
            }
            num_classes = count;
        }
        // renumber so the start state is 0 and others follow first appearance
        let mut order = vec![usize::MAX; num_classes];
        let mut reps = Vec::with_capacity(num_classes);
        let mut visit = vec![self.start];
        visit.extend(0..n);
        for q in visit {
            if order[class[q]] == usize::MAX {
                order[class[q]] = reps.len();
                reps.push(q);
            }
        }
        let delta = reps
            .iter()
            .map(|&q| {
                self.delta[q]
                    .iter()
                    .map(|t| t.map(|t| order[class[t]]))
                    .collect()
            })
            .collect();
        SoficPresentation {
            labels: self.labels,
            start: 0,
            delta,
        }
    }

    /// Whether the presented language equals that of the one-step SFT built
    /// from its own 2-words. Exact: two linear count sequences of total order
    /// `d` agree everywhere once they agree up to length `d`.
    pub fn is_one_step_sft(&self) -> Option<bool> {
        let used: Vec<usize> = (0..self.labels)
            .filter(|&a| self.step(self.start, a).is_some())
            .collect();
        let d = self.num_states() + used.len() + 1;
        if d > 4096 {
            return None;
        }
        let mut pair = vec![vec![false; self.labels]; self.labels];
        for &a in &used {
            let q = self.step(self.start, a).expect("used label");
            for b in 0..self.labels {
                if self.step(q, b).is_some() {
                    pair[a][b] = true;
                }
            }
        }
        let mut sft_delta = vec![vec![None; self.labels]; self.labels + 1];
        for &a in &used {
            sft_delta[0][a] = Some(a + 1);
            for b in 0..self.labels {
                if pair[a][b] {
                    sft_delta[a + 1][b] = Some(b + 1);
                }
            }
        }
        let sft = SoficPresentation {
            labels: self.labels,
            start: 0,
            delta: sft_delta,
        };
        Some((1..=d).all(|n| self.count_words(n) == sft.count_words(n)))
    }
}

fn bitset_insert(set: &mut [u64], i: usize) {
    set[i / 64] |= 1u64 << (i % 64);
}

fn bitset_iter(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &bits)| {
        (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
    })
}

/// Determinizes the labeled graph of `x` (vertex `j` carries label `code(j)`)
/// by subset construction, then minimizes.
///
/// States are the nonempty sets of `x`-symbols that can end a path reading a
/// given prefix, plus a start state.
pub fn image_presentation(x: &Sft, code: &BlockCode, limits: &Limits) -> Result<SoficPresentation> {
    if code.window() != 1 {
        return Err(Error::invalid("code_window", "image_presentation needs a 1-block code"));
    }
    if code.domain_size() != x.size() {
        return Err(Error::invalid(
            "code",
            format!(
                "domain size {} does not match shift alphabet {}",
                code.domain_size(),
                x.size()
            ),
        ));
    }
    let labels = code.codomain().size();
    let words = x.size().div_ceil(64);
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut sets: Vec<Vec<u64>> = Vec::new();
    // state 0 is the start state
    let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; labels]];

    let mut intern = |set: Vec<u64>,
                      sets: &mut Vec<Vec<u64>>,
                      delta: &mut Vec<Vec<Option<usize>>>|
     -> Result<usize> {
        if let Some(&id) = index.get(&set) {
            return Ok(id);
        }
        if delta.len() >= limits.state_cap {
            return Err(Error::cap(
                format!("subset construction discovered {} states", delta.len()),
                limits.state_cap as u64,
            ));
        }
        let id = delta.len();
        index.insert(set.clone(), id);
        sets.push(set);
        delta.push(vec![None; labels]);
        Ok(id)
    };

    let mut initial = vec![vec![0u64; words]; labels];
    for j in 0..x.size() {
        bitset_insert(&mut initial[code.apply(j)], j);
    }
    for (a, set) in initial.into_iter().enumerate() {
        if set.iter().any(|&b| b != 0) {
            let id = intern(set, &mut sets, &mut delta)?;
            delta[0][a] = Some(id);
        }
    }
    let mut cursor = 0;
    while cursor < sets.len() {
        let state = cursor + 1;
        let mut next = vec![vec![0u64; words]; labels];
        for i in bitset_iter(&sets[cursor]).collect::<Vec<_>>() {
            for &j in x.successors(i) {
                bitset_insert(&mut next[code.apply(j)], j);
            }
        }
        for (a, set) in next.into_iter().enumerate() {
            if set.iter().any(|&b| b != 0) {
                let id = intern(set, &mut sets, &mut delta)?;
                delta[state][a] = Some(id);
            }
        }
        cursor += 1;
    }
    let raw = SoficPresentation {
        labels,
        start: 0,
        delta,
    };
    Ok(raw.minimize())
}
