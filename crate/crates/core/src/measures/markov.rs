// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::distribution::{check_mass, entropy_of};
use crate::cover::Potential;
use crate::error::{Error, Result};
use crate::numeric::{neg_xlogx, neumaier_sum};
use crate::symbolic::{Sft, Word};

const ROW_TOL: f64 = 1e-10;
const STATIONARY_TOL: f64 = 1e-10;

/// Stationary Markov measure on an SFT.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovMeasure {
    #[serde(skip)]
    sft: Sft,
    pi: Vec<f64>,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
}

impl MarkovMeasure {
    /// Measure with transition matrix `p` and its stationary vector.
    pub fn new(sft: Sft, p: Vec<Vec<f64>>) -> Result<Self> {
        check_matrix(&sft, &p)?;
        let pi = stationary(&p)?;
        Ok(MarkovMeasure { sft, pi, p })
    }

    /// Measure with a caller-supplied stationary vector, checked to `1e-10`.
    pub fn with_stationary(sft: Sft, pi: Vec<f64>, p: Vec<Vec<f64>>) -> Result<Self> {
        check_matrix(&sft, &p)?;
        if pi.len() != sft.size() {
            return Err(Error::invalid("pi", format!("length {} differs from alphabet size", pi.len())));
        }
        check_mass("pi", &pi, ROW_TOL)?;
        let n = pi.len();
        for j in 0..n {
            let v: f64 = (0..n).map(|i| pi[i] * p[i][j]).sum();
            if (v - pi[j]).abs() > STATIONARY_TOL {
                return Err(Error::invalid(
                    format!("pi[{j}]"),
                    format!("not stationary: (pi P)_{j} = {v}, pi_{j} = {}", pi[j]),
                ));
            }
        }
        Ok(MarkovMeasure { sft, pi, p })
    }

    /// Bernoulli measure with symbol weights `q` on a full shift.
    pub fn bernoulli(sft: Sft, q: Vec<f64>) -> Result<Self> {
        if !sft.is_full() {
            return Err(Error::invalid("family", "Bernoulli measures need a full shift"));
        }
        if q.len() != sft.size() {
            return Err(Error::invalid("q", format!("length {} differs from alphabet size", q.len())));
        }
        check_mass("q", &q, ROW_TOL)?;
        if let Some(i) = q.iter().position(|&v| v == 0.0) {
            return Err(Error::invalid(format!("q[{i}]"), "Bernoulli weights must be positive"));
        }
        let p = vec![q.clone(); q.len()];
        Ok(MarkovMeasure { sft, pi: q, p })
    }

    /// Uniform transitions out of every symbol.
    pub fn uniform_transitions(sft: Sft) -> Result<Self> {
        let p = (0..sft.size())
            .map(|i| {
                let succ = sft.successors(i);
                let mut row = vec![0.0; sft.size()];
                for &j in succ {
                    row[j] = 1.0 / succ.len() as f64;
                }
                row
            })
            .collect();
        MarkovMeasure::new(sft, p)
    }

    /// Measure of maximal entropy (Parry) of an irreducible SFT.
    pub fn parry(sft: Sft) -> Result<Self> {
        let n = sft.size();
        let mut v = vec![1.0; n];
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            // lazy iteration converges for periodic matrices too
            let next: Vec<f64> = (0..n)
                .map(|i| v[i] + sft.successors(i).iter().map(|&j| v[j]).sum::<f64>())
                .collect();
            let norm = next.iter().copied().fold(0.0, f64::max);
            let next: Vec<f64> = next.iter().map(|x| x / norm).collect();
            let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            lambda = norm - 1.0;
            if delta < 1e-15 {
                break;
            }
        }
        let p = (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                for &j in sft.successors(i) {
                    row[j] = v[j] / (lambda * v[i]);
                }
                let total: f64 = row.iter().sum();
                row.iter().map(|x| x / total).collect()
            })
            .collect();
        MarkovMeasure::new(sft, p)
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// 0 when all rows agree (Bernoulli), else 1.
    pub fn memory(&self) -> usize {
        let first = &self.p[0];
        let same = self
            .p
            .iter()
            .all(|row| row.iter().zip(first).all(|(a, b)| (a - b).abs() <= 1e-14));
        if same {
            0
        } else {
            1
        }
    }

    /// `mu([u])`.
    pub fn probability(&self, u: &[usize]) -> f64 {
        let Some((&first, rest)) = u.split_first() else {
            return 1.0;
        };
        let mut prev = first;
        let mut mass = self.pi[first];
        for &a in rest {
            mass *= self.p[prev][a];
            prev = a;
        }
        mass
    }

    pub(crate) fn check_support(&self, x: &Sft) -> Result<()> {
        if x.size() != self.sft.size() {
            return Err(Error::invalid("measure", "alphabet size differs from the shift"));
        }
        for (i, row) in self.p.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > 0.0 && !x.allows(i, j) {
                    return Err(Error::invalid(
                        format!("P[{i}][{j}]"),
                        "positive on a forbidden transition",
                    ));
                }
            }
        }
        Ok(())
    }
}

fn check_matrix(sft: &Sft, p: &[Vec<f64>]) -> Result<()> {
    let n = sft.size();
    if p.len() != n {
        return Err(Error::invalid("P", format!("{} rows for alphabet size {n}", p.len())));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(format!("P[{i}]"), format!("row length {} differs from {n}", row.len())));
        }
        check_mass(&format!("P[{i}]"), row, ROW_TOL)?;
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 && !sft.allows(i, j) {
                return Err(Error::invalid(format!("P[{i}][{j}]"), "positive on a forbidden transition"));
            }
        }
    }
    Ok(())
}

/// Stationary vector by Gaussian elimination on `pi (P - I) = 0`, `sum pi = 1`,
/// falling back to Cesàro-averaged iteration when the chain is reducible.
fn stationary(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    // rows of the system: transpose of (P - I) with the last equation replaced
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut row: Vec<f64> = (0..n).map(|i| p[i][j] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    a[n - 1] = vec![1.0; n + 1];
    if let Some(pi) = solve(a) {
        if pi.iter().all(|&v| v >= -1e-12) {
            let pi: Vec<f64> = pi.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = pi.iter().sum();
            return Ok(pi.iter().map(|v| v / total).collect());
        }
    }
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let next: Vec<f64> = (0..n)
            .map(|j| 0.5 * v[j] + 0.5 * (0..n).map(|i| v[i] * p[i][j]).sum::<f64>())
            .collect();
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < 1e-16 {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence {
        iterations: 1_000_000,
        residual: f64::NAN,
    })
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let factor = a[row][col] / a[col][col];
                if factor != 0.0 {
                    for k in col..=n {
                        a[row][k] -= factor * a[col][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// `-sum_i pi_i sum_j P_ij ln P_ij`.
pub fn markov_entropy_rate(m: &MarkovMeasure) -> f64 {
    neumaier_sum(
        m.pi
            .iter()
            .zip(&m.p)
            .map(|(&pi, row)| pi * neumaier_sum(row.iter().map(|&q| neg_xlogx(q)))),
    )
}

/// Masses of the admissible words of one length, lexicographic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDistribution {
    pub n: usize,
    pub words: Vec<Word>,
    pub probs: Vec<f64>,
}

impl BlockDistribution {
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    pub fn total(&self) -> f64 {
        neumaier_sum(self.probs.iter().copied())
    }

    pub fn get(&self, word: &[usize]) -> f64 {
        match self.words.binary_search_by(|w| w.symbols().cmp(word)) {
            Ok(i) => self.probs[i],
            Err(_) => 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// `mu` on words of length `n` with positive mass.
pub fn block_distribution(m: &MarkovMeasure, n: usize, cap: u64) -> Result<BlockDistribution> {
    if n == 0 {
        return Err(Error::invalid("N", "must be at least 1"));
    }
    let mut words = Vec::new();
    let mut probs = Vec::new();
    let mut stack: Vec<(Vec<usize>, f64)> = (0..m.pi.len())
        .rev()
        .filter(|&a| m.pi[a] > 0.0)
        .map(|a| (vec![a], m.pi[a]))
        .collect();
    while let Some((word, mass)) = stack.pop() {
        if word.len() == n {
            if words.len() as u64 >= cap {
                return Err(Error::cap(format!("words of length {n}"), cap));
            }
            words.push(Word(word));
            probs.push(mass);
            continue;
        }
        let last = *word.last().expect("nonempty");
        for b in (0..m.p.len()).rev() {
            let q = m.p[last][b];
            if q > 0.0 {
                let mut next = word.clone();
                next.push(b);
                stack.push((next, mass * q));
            }
        }
    }
    Ok(BlockDistribution { n, words, probs })
}

/// `int f dmu`, exact for locally constant `f`.
pub fn integral(m: &MarkovMeasure, f: &Potential, cap: u64) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let b = block_distribution(m, f.window(), cap)?;
    Ok(neumaier_sum(
        b.words.iter().zip(&b.probs).map(|(w, &p)| p * f.value(w.symbols())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_rate_examples() {
        let full = Sft::full(2).unwrap();
        let b = MarkovMeasure::bernoulli(full.clone(), vec![0.5, 0.5]).unwrap();
        assert!((markov_entropy_rate(&b) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(b.memory(), 0);
        let perm = MarkovMeasure::new(full.clone(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(markov_entropy_rate(&perm), 0.0);
        assert_eq!(perm.stationary(), &[0.5, 0.5]);
        let sym = MarkovMeasure::new(full, vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let exact = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        assert!((markov_entropy_rate(&sym) - exact).abs() < 1e-15);
        assert!((exact - 0.325083).abs() < 1e-6);
    }

    #[test]
    fn parry_measure_attains_topological_entropy() {
        let m = MarkovMeasure::parry(Sft::golden_mean()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((markov_entropy_rate(&m) - phi.ln()).abs() < 1e-12);
        let b = block_distribution(&m, 2, 100).unwrap();
        assert_eq!(b.get(&[1, 1]), 0.0);
        assert!((b.total() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        let gm = Sft::golden_mean();
        assert!(MarkovMeasure::new(gm.clone(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        assert!(MarkovMeasure::new(gm.clone(), vec![vec![0.5, 0.4], vec![1.0, 0.0]]).is_err());
        assert!(MarkovMeasure::bernoulli(gm.clone(), vec![0.5, 0.5]).is_err());
        let err = MarkovMeasure::with_stationary(
            gm,
            vec![0.5, 0.5],
            vec![vec![0.5, 0.5], vec![1.0, 0.0]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("pi["), "{err}");
    }

    #[test]
    fn reducible_chain_still_has_a_stationary_vector() {
        let full = Sft::full(2).unwrap();
        let m = MarkovMeasure::new(full, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s: f64 = m.stationary().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
