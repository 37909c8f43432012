// SPDX-License-Identifier: Apache-2.0

//! Floating-point helpers: stable log-domain accumulation, compensated sums,
//! Perron-root brackets for nonnegative matrices, and simplex projection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arithmetic mode for long accumulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Plain double precision.
    #[default]
    Double,
    /// Double precision with Neumaier-compensated summation.
    Extended,
}

/// Running sum that optionally carries a Neumaier compensation term.
#[derive(Debug, Clone, Copy)]
pub struct Summer {
    sum: f64,
    comp: f64,
    compensated: bool,
}

impl Summer {
    pub fn new(precision: Precision) -> Self {
        Summer {
            sum: 0.0,
            comp: 0.0,
            compensated: precision == Precision::Extended,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if !self.compensated {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = Summer::new(Precision::Extended);
    for v in values {
        s.add(v);
    }
    s.value()
}

/// Streaming `log(sum(exp(x_i)))`.
///
/// Keeps a running maximum and a (possibly compensated) sum of `exp(x_i - max)`,
/// rescaling when a larger term arrives. `-inf` terms are ignored, so an empty
/// accumulator reports `-inf`.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    scaled: Summer,
    precision: Precision,
}

impl LogSumExp {
    pub fn new(precision: Precision) -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: Summer::new(precision),
            precision,
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled.add((x - self.max).exp());
        } else {
            let rescale = (self.max - x).exp();
            let old = self.scaled.value() * rescale;
            self.scaled = Summer::new(self.precision);
            self.scaled.add(old);
            self.scaled.add(1.0);
            self.max = x;
        }
    }

    /// Merge another accumulator (order-sensitive only through rounding).
    pub fn merge(&mut self, other: &LogSumExp) {
        let v = other.value();
        self.push(v);
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.value().ln()
        }
    }
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut acc = LogSumExp::new(Precision::Double);
    for &v in values {
        acc.push(v);
    }
    acc.value()
}

/// `-p ln p` with `0 ln 0 = 0`.
#[inline]
pub fn neg_xlogx(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Nonnegative matrix in row-major sparse form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let n = dense.len();
        let rows = dense
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        SparseMatrix { n, rows }
    }

    pub fn from_bool(adj: &[Vec<bool>]) -> Self {
        let n = adj.len();
        let rows = adj
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(j, _)| (j, 1.0))
                    .collect()
            })
            .collect();
        SparseMatrix { n, rows }
    }

    /// Strongly connected components (Kosaraju), each sorted ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![(root, 0usize)];
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&(u, _)) = self.rows[v].get(*next) {
                    *next += 1;
                    if !seen[u] {
                        seen[u] = true;
                        stack.push((u, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut reverse = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                reverse[j].push(i);
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for &root in order.iter().rev() {
            if comp[root] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![root];
            comp[root] = id;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &u in &reverse[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        members.push(u);
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// Two-sided enclosure of a Perron root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Encloses the spectral radius of a nonnegative matrix.
///
/// Each strongly connected block is handled separately: power iteration runs on
/// the shifted block `B + cI` (primitive even when `B` is periodic) and the
/// Collatz–Wielandt ratios `(Bv)_i / v_i` bound the block's Perron root from
/// both sides. The matrix root is the maximum over blocks.
pub fn spectral_bracket(m: &SparseMatrix, rel_tol: f64, max_iters: usize) -> Bracket {
    let mut best = Bracket {
        lower: 0.0,
        upper: 0.0,
        converged: true,
    };
    for block in m.components() {
        let b = block_bracket(m, &block, rel_tol, max_iters);
        best.lower = best.lower.max(b.lower);
        best.upper = best.upper.max(b.upper);
        best.converged &= b.converged;
    }
    best
}

fn block_bracket(m: &SparseMatrix, block: &[usize], rel_tol: f64, max_iters: usize) -> Bracket {
    let k = block.len();
    let mut local = vec![usize::MAX; m.n];
    for (i, &g) in block.iter().enumerate() {
        local[g] = i;
    }
    let rows: Vec<Vec<(usize, f64)>> = block
        .iter()
        .map(|&g| {
            m.rows[g]
                .iter()
                .filter(|(j, _)| local[*j] != usize::MAX)
                .map(|&(j, v)| (local[j], v))
                .collect()
        })
        .collect();
    if rows.iter().all(|r| r.is_empty()) {
        // single transient vertex
        return Bracket {
            lower: 0.0,
            upper: 0.0,
            converged: true,
        };
    }
    let shift = {
        let total: f64 = rows.iter().flat_map(|r| r.iter().map(|e| e.1)).sum();
        (total / k as f64).max(f64::MIN_POSITIVE)
    };
    let mut v = vec![1.0; k];
    let mut bv = vec![0.0; k];
    let mut out = Bracket {
        lower: 0.0,
        upper: f64::INFINITY,
        converged: false,
    };
    for iter in 0..max_iters {
        for (i, row) in rows.iter().enumerate() {
            bv[i] = row.iter().map(|&(j, a)| a * v[j]).sum();
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..k {
            let r = bv[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        out.lower = out.lower.max(lo);
        out.upper = out.upper.min(hi);
        if out.upper - out.lower <= rel_tol * out.upper {
            out.converged = true;
            break;
        }
        let mut norm = 0.0f64;
        for i in 0..k {
            v[i] = bv[i] + shift * v[i];
            norm = norm.max(v[i]);
        }
        for x in v.iter_mut() {
            *x /= norm;
            if *x < 1e-300 {
                *x = 1e-300;
            }
        }
        if iter + 1 == max_iters {
            log::debug!("spectral bracket stopped at {max_iters} iterations");
        }
    }
    out
}

/// Perron root with relative residual at most `rel_tol`, or an error.
pub fn perron_root(m: &SparseMatrix, rel_tol: f64, max_iters: usize) -> Result<f64> {
    let b = spectral_bracket(m, rel_tol, max_iters);
    if b.converged {
        Ok(b.mid())
    } else {
        Err(Error::NonConvergence {
            iterations: max_iters,
            residual: b.upper - b.lower,
        })
    }
}

/// Euclidean projection onto `{x : x_i >= floor, sum x_i = 1}`.
///
/// Sort-based algorithm on the shifted variable `x - floor`, which lives on a
/// scaled standard simplex.
pub fn project_to_simplex(v: &[f64], floor: f64) -> Vec<f64> {
    let n = v.len();
    assert!(n > 0, "empty simplex");
    let mass = 1.0 - floor * n as f64;
    assert!(mass > 0.0, "simplex floor too large for dimension");
    let y: Vec<f64> = v.iter().map(|x| x - floor).collect();
    let mut sorted = y.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - mass) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|x| (x - theta).max(0.0) + floor).collect()
}
