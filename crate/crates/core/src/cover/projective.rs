// SPDX-License-Identifier: Apache-2.0

//! Ratio bounds for the projective transfer operator.
//!
//! With label matrices `M_a` on context states, the growth rate equals the
//! log spectral radius of `(L phi)(x) = sum_a |x M_a|^w phi([x M_a])` acting on
//! positive functions of directions `x`. For `phi = g_M`, where
//! `g_M(x) = sum_{|v| = M} (x . M_v 1)^w`, one has `L g_M = g_{M+1}`, so
//!
//! ```text
//! inf_x g_{M+1}(x) / g_M(x)  <=  exp(P)  <=  sup_x g_{M+1}(x) / g_M(x).
//! ```
//!
//! Both `g` are monotone and homogeneous, so the ratio is enclosed on boxes of
//! the charts `{x : x_j = 1, 0 <= x_i <= 1}`; boxes are refined adaptively.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::error::Result;
use crate::symbolic::{enumerate_words, FactorPair};

use super::potential::Potential;

/// Largest number of context states handled.
pub(crate) const MAX_DIM: usize = 5;
const VECTOR_BUDGET: usize = 1 << 9;
const BOX_BUDGET: usize = 4_000;
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ProjectiveBounds {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
}

/// Distinct vectors `M_v 1 / scale` with multiplicities.
struct Level {
    vectors: Vec<(Vec<f64>, f64)>,
    log_scale: f64,
}

impl Level {
    fn eval(&self, x: &[f64], w: f64) -> f64 {
        self.vectors
            .iter()
            .map(|(c, mult)| {
                let dot: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
                if dot > 0.0 {
                    mult * dot.powf(w)
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Value and gradient at `x`.
    fn eval_grad(&self, x: &[f64], w: f64, grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut total = 0.0;
        for (c, mult) in &self.vectors {
            let dot: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
            if dot > 0.0 {
                let p = dot.powf(w);
                total += mult * p;
                let scale = mult * w * p / dot;
                for (g, ci) in grad.iter_mut().zip(c) {
                    *g += scale * ci;
                }
            }
        }
        total
    }

}

/// Values of `g` at the box vertices together with its tangent plane at the
/// centre. A concave `g` lies above the multilinear interpolation of its vertex
/// values and below the tangent plane.
struct BoxSample {
    vertices: Vec<f64>,
    tangent: Vec<f64>,
    centre: f64,
}

fn sample(level: &Level, lo: &[f64], hi: &[f64], free: &[usize], w: f64) -> BoxSample {
    let centre: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut grad = vec![0.0; lo.len()];
    let gc = level.eval_grad(&centre, w, &mut grad);
    let mut vertex = lo.to_vec();
    let n = 1usize << free.len();
    let mut vertices = Vec::with_capacity(n);
    let mut tangent = Vec::with_capacity(n);
    for mask in 0..n {
        let mut t = gc;
        for (bit, &i) in free.iter().enumerate() {
            vertex[i] = if mask >> bit & 1 == 1 { hi[i] } else { lo[i] };
            t += grad[i] * (vertex[i] - centre[i]);
        }
        vertices.push(level.eval(&vertex, w));
        tangent.push(t);
    }
    BoxSample {
        vertices,
        tangent,
        centre: gc,
    }
}

#[derive(Debug, Clone)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    free: Vec<usize>,
    key: f64,
    other: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// Encloses the growth rate for `0 < w < 1`, using words of length up to
/// `max_depth + 1`. `None` when there are too many context states.
pub(crate) fn projective_bounds(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    max_depth: usize,
    state_cap: u64,
) -> Result<Option<ProjectiveBounds>> {
    let x = pair.x();
    let k = f.window();
    let ctx_len = (k - 1).max(1);
    let ctx: Vec<Vec<usize>> = enumerate_words(x, ctx_len, state_cap)?.map(|w| w.0).collect();
    let d = ctx.len();
    if max_depth == 0 {
        return Ok(None);
    }
    let index: HashMap<&[usize], usize> =
        ctx.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let labels = pair.code().codomain().size();
    let mut fmax = f64::NEG_INFINITY;
    let mut edges: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); labels];
    for (s, word) in ctx.iter().enumerate() {
        let last = *word.last().expect("nonempty");
        for &a in x.successors(last) {
            let mut window: Vec<usize> = if k == 1 { Vec::new() } else { word.clone() };
            window.push(a);
            let next = if ctx_len == 1 { index[&[a][..]] } else { index[&window[1..]] };
            let v = f.value(&window);
            fmax = fmax.max(v);
            edges[pair.label(a)].push((s, next, v));
        }
    }
    let mats: Vec<Vec<(usize, usize, f64)>> = edges
        .into_iter()
        .map(|list| list.into_iter().map(|(s, t, v)| (s, t, (v - fmax).exp())).collect())
        .collect();

    let mut levels = vec![Level {
        vectors: vec![(vec![1.0; d], 1.0)],
        log_scale: 0.0,
    }];
    while levels.len() <= max_depth + 1 {
        let prev = levels.last().expect("nonempty");
        let mut merged: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut vectors: Vec<(Vec<f64>, f64)> = Vec::new();
        for (c, mult) in &prev.vectors {
            for m in &mats {
                let mut out = vec![0.0; d];
                for &(s, t, wgt) in m {
                    out[s] += wgt * c[t];
                }
                if out.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let key: Vec<u64> = out.iter().map(|v| v.to_bits()).collect();
                match merged.get(&key) {
                    Some(&i) => vectors[i].1 += mult,
                    None => {
                        merged.insert(key, vectors.len());
                        vectors.push((out, *mult));
                    }
                }
            }
        }
        if vectors.len() > VECTOR_BUDGET {
            break;
        }
        let top = vectors
            .iter()
            .flat_map(|(c, _)| c.iter().copied())
            .fold(0.0, f64::max);
        for (c, _) in &mut vectors {
            for v in c.iter_mut() {
                *v /= top;
            }
        }
        let log_scale = prev.log_scale + top.ln();
        levels.push(Level { vectors, log_scale });
    }
    if levels.len() < 3 {
        return Ok(None);
    }
    let depth = levels.len() - 2;
    let g0 = &levels[depth];
    let g1 = &levels[depth + 1];
    let shift = w * (g1.log_scale - g0.log_scale);

    // fiber vectors after reading v live on states whose image ends like v
    let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (i, word) in ctx.iter().enumerate() {
        let image: Vec<usize> = word.iter().map(|&a| pair.label(a)).collect();
        groups.entry(image).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
    groups.sort();
    if groups.iter().any(|g| g.len() > MAX_DIM) {
        return Ok(None);
    }
    let charts: Vec<(Vec<f64>, Vec<f64>, Vec<usize>)> = groups
        .iter()
        .flat_map(|g| {
            g.iter().map(move |&j| {
                let mut lo = vec![0.0; d];
                let mut hi = vec![0.0; d];
                lo[j] = 1.0;
                for &i in g {
                    hi[i] = 1.0;
                }
                let free: Vec<usize> = g.iter().copied().filter(|&i| i != j).collect();
                (lo, hi, free)
            })
        })
        .collect();

    // affine over multilinear is monotone in each coordinate, so the extreme
    // ratio of the bounding functions is attained at a vertex
    let enclose = |lo: &[f64], hi: &[f64], free: &[usize]| {
        let s0 = sample(g0, lo, hi, free, w);
        let s1 = sample(g1, lo, hi, free, w);
        let mut up = f64::NEG_INFINITY;
        let mut low = f64::INFINITY;
        for i in 0..s0.vertices.len() {
            up = up.max(s1.tangent[i] / s0.vertices[i]);
            low = low.min(s1.vertices[i] / s0.tangent[i]);
        }
        let min0 = s0.vertices.iter().copied().fold(f64::INFINITY, f64::min);
        let min1 = s1.vertices.iter().copied().fold(f64::INFINITY, f64::min);
        up = up.min(g1.eval(hi, w) / min0);
        low = low.max(min1 / g0.eval(hi, w));
        (low, up, s1.centre / s0.centre)
    };
    let upper = search(
        &charts,
        |lo, hi, free| {
            let (_, up, at) = enclose(lo, hi, free);
            (up, at)
        },
        true,
    );
    let lower = search(
        &charts,
        |lo, hi, free| {
            let (low, _, at) = enclose(lo, hi, free);
            (low, at)
        },
        false,
    );
    let (Some(upper), Some(lower)) = (upper, lower) else {
        return Ok(None);
    };
    log::debug!(
        "projective depth {depth}: {} / {} vectors, bounds [{lower}, {upper}]",
        g0.vectors.len(),
        g1.vectors.len()
    );
    Ok(Some(ProjectiveBounds {
        lower: lower.ln() + shift + w * fmax,
        upper: upper.ln() + shift + w * fmax,
        depth,
    }))
}

/// Refines the box with the most extreme enclosure until it is tight or the
/// budget runs out; returns the extreme enclosure (max if `maximize`).
/// `bounds(lo, hi, free)` returns the one-sided enclosure on the box and the
/// ratio at its centre.
fn search(
    charts: &[(Vec<f64>, Vec<f64>, Vec<usize>)],
    bounds: impl Fn(&[f64], &[f64], &[usize]) -> (f64, f64),
    maximize: bool,
) -> Option<f64> {
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut heap = BinaryHeap::new();
    let make = |lo: Vec<f64>, hi: Vec<f64>, free: Vec<usize>| -> Option<Cell> {
        let (outer, inner) = bounds(&lo, &hi, &free);
        if outer.is_nan() || inner.is_nan() || (maximize && outer.is_infinite()) {
            return None;
        }
        Some(Cell {
            lo,
            hi,
            free,
            key: sign * outer,
            other: inner,
        })
    };
    for (lo, hi, free) in charts {
        heap.push(make(lo.clone(), hi.clone(), free.clone())?);
    }
    for _ in 0..BOX_BUDGET {
        let cell = heap.pop()?;
        let outer = sign * cell.key;
        if (outer - cell.other).abs() <= REL_TOL * outer.abs() {
            return Some(outer);
        }
        let axis = cell
            .free
            .iter()
            .copied()
            .max_by(|&a, &b| (cell.hi[a] - cell.lo[a]).total_cmp(&(cell.hi[b] - cell.lo[b])));
        let Some(axis) = axis else {
            return Some(outer);
        };
        let mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
        let mut left_hi = cell.hi.clone();
        left_hi[axis] = mid;
        let mut right_lo = cell.lo.clone();
        right_lo[axis] = mid;
        heap.push(make(cell.lo.clone(), left_hi, cell.free.clone())?);
        heap.push(make(right_lo, cell.hi, cell.free)?);
    }
    heap.peek().map(|c| sign * c.key)
}
