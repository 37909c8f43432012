// SPDX-License-Identifier: Apache-2.0

//! Dynamic programme over image words.
//!
//! A depth-first walk over words `v` of `Y` carries, for every context state
//! (the last `max(k-1, 1)` symbols of a preimage), the total weight
//! `sum exp(S f)` of preimage prefixes ending there. Empty fibers are pruned,
//! so only image words are visited. Vectors are kept in linear scale with a
//! separate log factor.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::birkhoff::{birkhoff_extremum, Extremum};
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::numeric::{LogSumExp, Precision};
use crate::symbolic::{enumerate_words, log_count, FactorPair};

const PARALLEL_FRONTIER: usize = 256;

/// Log-domain sums produced by one pass.
#[derive(Debug, Clone)]
pub(crate) struct FiberSums {
    pub sup: LogSumExp,
    pub inf: LogSumExp,
    pub leaves: u64,
    /// `[b * |X| + e]`: sums of `I_{be}(v)^w` split by first and last preimage symbol.
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Clone)]
pub(crate) struct Boundary {
    pub sup: Vec<LogSumExp>,
    pub inf: Vec<LogSumExp>,
}

impl FiberSums {
    fn empty(precision: Precision, tagged_size: Option<usize>) -> Self {
        FiberSums {
            sup: LogSumExp::new(precision),
            inf: LogSumExp::new(precision),
            leaves: 0,
            boundary: tagged_size.map(|n| Boundary {
                sup: vec![LogSumExp::new(precision); n * n],
                inf: vec![LogSumExp::new(precision); n * n],
            }),
        }
    }

    fn merge(&mut self, other: &FiberSums) {
        self.sup.merge(&other.sup);
        self.inf.merge(&other.inf);
        self.leaves += other.leaves;
        if let (Some(a), Some(b)) = (self.boundary.as_mut(), other.boundary.as_ref()) {
            for (x, y) in a.sup.iter_mut().zip(&b.sup) {
                x.merge(y);
            }
            for (x, y) in a.inf.iter_mut().zip(&b.inf) {
                x.merge(y);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Job {
    /// Birkhoff length `N`.
    pub n: usize,
    /// Cylinder length `N + m`.
    pub len: usize,
    pub w: f64,
    pub tagged: bool,
    pub precision: Precision,
    pub parallel: bool,
}

struct Node {
    depth: usize,
    vec: Vec<f64>,
    scale: f64,
}

pub(crate) struct FiberEngine<'a> {
    pair: &'a FactorPair,
    f: &'a Potential,
    k: usize,
    ctx_len: usize,
    ctx: Vec<Vec<usize>>,
    labels: usize,
    /// `trans[label][state]`: successors with `exp(f(window) - fmax)`.
    trans: Vec<Vec<Vec<(usize, f64)>>>,
    fmax: f64,
    /// `tails[r][state]` for sup and inf: extremal sum of the `r` windows
    /// that start inside the context and run past the word.
    tails_sup: Vec<Vec<f64>>,
    tails_inf: Vec<Vec<f64>>,
}

impl<'a> FiberEngine<'a> {
    pub fn new(pair: &'a FactorPair, f: &'a Potential, state_cap: u64) -> Result<Self> {
        let x = pair.x();
        let k = f.window();
        let ctx_len = (k - 1).max(1);
        let ctx: Vec<Vec<usize>> = enumerate_words(x, ctx_len, state_cap)?.map(|w| w.0).collect();
        let index: HashMap<&[usize], usize> =
            ctx.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let labels = pair.code().codomain().size();

        let mut raw: Vec<Vec<Vec<(usize, f64)>>> = vec![vec![Vec::new(); ctx.len()]; labels];
        let mut fmax = f64::NEG_INFINITY;
        let mut window = Vec::with_capacity(k);
        for (s, word) in ctx.iter().enumerate() {
            let last = *word.last().expect("nonempty");
            for &a in x.successors(last) {
                let next: Vec<usize> = if ctx_len == 1 {
                    vec![a]
                } else {
                    word[1..].iter().copied().chain(std::iter::once(a)).collect()
                };
                window.clear();
                if k == 1 {
                    window.push(a);
                } else {
                    window.extend_from_slice(word);
                    window.push(a);
                }
                let v = f.value(&window);
                fmax = fmax.max(v);
                raw[pair.label(a)][s].push((index[next.as_slice()], v));
            }
        }
        if !fmax.is_finite() {
            fmax = 0.0;
        }
        let trans = raw
            .into_iter()
            .map(|per_label| {
                per_label
                    .into_iter()
                    .map(|edges| edges.into_iter().map(|(t, v)| (t, (v - fmax).exp())).collect())
                    .collect()
            })
            .collect();

        let depth = k.saturating_sub(1);
        let mut tails_sup = vec![vec![0.0; ctx.len()]];
        let mut tails_inf = vec![vec![0.0; ctx.len()]];
        for r in 1..=depth {
            let mut sup = vec![f64::NEG_INFINITY; ctx.len()];
            let mut inf = vec![f64::INFINITY; ctx.len()];
            for (s, word) in ctx.iter().enumerate() {
                let last = *word.last().expect("nonempty");
                for &a in x.successors(last) {
                    window.clear();
                    window.extend_from_slice(word);
                    window.push(a);
                    let v = f.value(&window);
                    let next = index[&window[1..]];
                    sup[s] = sup[s].max(v + tails_sup[r - 1][next]);
                    inf[s] = inf[s].min(v + tails_inf[r - 1][next]);
                }
            }
            tails_sup.push(sup);
            tails_inf.push(inf);
        }

        Ok(FiberEngine {
            pair,
            f,
            k,
            ctx_len,
            ctx,
            labels,
            trans,
            fmax,
            tails_sup,
            tails_inf,
        })
    }

    pub fn run(&self, job: &Job) -> Result<FiberSums> {
        if job.len < self.ctx_len {
            return self.brute(job);
        }
        let nx = self.pair.x().size();
        let tags = if job.tagged { nx } else { 1 };
        let tagged_size = job.tagged.then_some(nx);

        let mut frontier = self.initial_nodes(tags);
        while frontier.len() < PARALLEL_FRONTIER
            && !frontier.is_empty()
            && frontier[0].depth < job.len
        {
            let mut next = Vec::new();
            for node in &frontier {
                for label in 0..self.labels {
                    if let Some(child) = self.step(node, label, job, tags) {
                        next.push(child);
                    }
                }
            }
            frontier = next;
        }

        let visit = |node: &Node| {
            let mut out = FiberSums::empty(job.precision, tagged_size);
            self.dfs(node, job, tags, &mut out);
            out
        };
        let parts: Vec<FiberSums> = if job.parallel {
            frontier.par_iter().map(visit).collect()
        } else {
            frontier.iter().map(visit).collect()
        };
        let mut total = FiberSums::empty(job.precision, tagged_size);
        for p in &parts {
            total.merge(p);
        }
        Ok(total)
    }

    fn initial_nodes(&self, tags: usize) -> Vec<Node> {
        let n = self.ctx.len();
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (s, word) in self.ctx.iter().enumerate() {
            let image: Vec<usize> = word.iter().map(|&a| self.pair.label(a)).collect();
            groups.entry(image).or_default().push(s);
        }
        groups
            .into_values()
            .map(|members| {
                let init: Vec<f64> = members
                    .iter()
                    .map(|&s| if self.k == 1 { self.f.value(&self.ctx[s]) } else { 0.0 })
                    .collect();
                let top = init.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut vec = vec![0.0; tags * n];
                for (&s, &v) in members.iter().zip(&init) {
                    let tag = if tags == 1 { 0 } else { self.ctx[s][0] };
                    vec[tag * n + s] = (v - top).exp();
                }
                Node {
                    depth: self.ctx_len,
                    vec,
                    scale: top,
                }
            })
            .collect()
    }

    fn step(&self, node: &Node, label: usize, job: &Job, tags: usize) -> Option<Node> {
        let n = self.ctx.len();
        let edges = &self.trans[label];
        // the new symbol sits at index `node.depth`
        let counted = node.depth + 2 <= job.n + self.k;
        let mut out = vec![0.0; tags * n];
        for t in 0..tags {
            let base = t * n;
            for (s, list) in edges.iter().enumerate() {
                let v = node.vec[base + s];
                if v == 0.0 {
                    continue;
                }
                for &(next, wgt) in list {
                    out[base + next] += if counted { v * wgt } else { v };
                }
            }
        }
        let top = out.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return None;
        }
        for x in &mut out {
            *x /= top;
        }
        Some(Node {
            depth: node.depth + 1,
            vec: out,
            scale: node.scale + top.ln() + if counted { self.fmax } else { 0.0 },
        })
    }

    fn dfs(&self, node: &Node, job: &Job, tags: usize, out: &mut FiberSums) {
        if node.depth == job.len {
            self.leaf(node, job, tags, out);
            return;
        }
        for label in 0..self.labels {
            if let Some(child) = self.step(node, label, job, tags) {
                self.dfs(&child, job, tags, out);
            }
        }
    }

    fn leaf(&self, node: &Node, job: &Job, tags: usize, out: &mut FiberSums) {
        let n = self.ctx.len();
        let r = (self.k - 1).saturating_sub(job.len - job.n);
        let ts = &self.tails_sup[r];
        let ti = &self.tails_inf[r];
        out.leaves += 1;
        let mut sup = LogSumExp::new(Precision::Double);
        let mut inf = LogSumExp::new(Precision::Double);
        for t in 0..tags {
            for s in 0..n {
                let v = node.vec[t * n + s];
                if v > 0.0 {
                    let lv = v.ln();
                    sup.push(lv + ts[s]);
                    inf.push(lv + ti[s]);
                }
            }
        }
        out.sup.push(job.w * (sup.value() + node.scale));
        out.inf.push(job.w * (inf.value() + node.scale));

        if let Some(b) = out.boundary.as_mut() {
            let nx = tags;
            let mut cell_sup = vec![LogSumExp::new(Precision::Double); nx * nx];
            let mut cell_inf = vec![LogSumExp::new(Precision::Double); nx * nx];
            for t in 0..tags {
                for s in 0..n {
                    let v = node.vec[t * n + s];
                    if v > 0.0 {
                        let e = *self.ctx[s].last().expect("nonempty");
                        let lv = v.ln();
                        cell_sup[t * nx + e].push(lv + ts[s]);
                        cell_inf[t * nx + e].push(lv + ti[s]);
                    }
                }
            }
            for (i, (cs, ci)) in cell_sup.iter().zip(&cell_inf).enumerate() {
                let vs = cs.value();
                if vs > f64::NEG_INFINITY {
                    b.sup[i].push(job.w * (vs + node.scale));
                    b.inf[i].push(job.w * (ci.value() + node.scale));
                }
            }
        }
    }

    /// Direct enumeration for cylinders shorter than the context length.
    fn brute(&self, job: &Job) -> Result<FiberSums> {
        let x = self.pair.x();
        let nx = x.size();
        let tagged_size = job.tagged.then_some(nx);
        type Cells = Vec<(usize, f64, f64)>;
        let mut groups: BTreeMap<Vec<usize>, Cells> = BTreeMap::new();
        for u in enumerate_words(x, job.len, u64::MAX)? {
            let sup = birkhoff_extremum(x, self.f, &u.0, job.n, Extremum::Sup)?.value;
            let inf = birkhoff_extremum(x, self.f, &u.0, job.n, Extremum::Inf)?.value;
            if sup == f64::NEG_INFINITY {
                continue;
            }
            let image: Vec<usize> = u.0.iter().map(|&a| self.pair.label(a)).collect();
            let cell = u.0[0] * nx + u.0[job.len - 1];
            groups.entry(image).or_default().push((cell, sup, inf));
        }
        let mut out = FiberSums::empty(job.precision, tagged_size);
        for members in groups.values() {
            out.leaves += 1;
            let sup: Vec<f64> = members.iter().map(|m| m.1).collect();
            let inf: Vec<f64> = members.iter().map(|m| m.2).collect();
            out.sup.push(job.w * crate::numeric::log_sum_exp(&sup));
            out.inf.push(job.w * crate::numeric::log_sum_exp(&inf));
            if let Some(b) = out.boundary.as_mut() {
                let mut cs = vec![LogSumExp::new(Precision::Double); nx * nx];
                let mut ci = vec![LogSumExp::new(Precision::Double); nx * nx];
                for &(cell, s, i) in members {
                    cs[cell].push(s);
                    ci[cell].push(i);
                }
                for c in 0..nx * nx {
                    if cs[c].value() > f64::NEG_INFINITY {
                        b.sup[c].push(job.w * cs[c].value());
                        b.inf[c].push(job.w * ci[c].value());
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Fails when `|L_len(Y)|` exceeds the word cap.
pub(crate) fn check_cap(pair: &FactorPair, len: usize, cap: u64) -> Result<()> {
    let count = pair.y().count_words(len);
    if count > cap.into() {
        log::debug!("|L_{len}(Y)| ~ exp({:.3}) exceeds cap {cap}", log_count(&count));
        return Err(Error::cap(format!("image words of length {len}"), cap));
    }
    Ok(())
}
