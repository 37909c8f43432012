// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::partition::{boundary_sums, check_weight, partition_sums, BoundarySums, CoverOptions};
use super::potential::Potential;
use super::projective::projective_bounds;
use crate::error::Result;
use crate::numeric::{spectral_bracket, SparseMatrix};
use crate::symbolic::{enumerate_words, FactorPair};

/// Largest alphabet for which the boundary transfer matrix is formed.
const TRANSFER_MAX_ALPHABET: usize = 24;
const PROJECTIVE_MAX_DEPTH: usize = 40;
const SPECTRAL_TOL: f64 = 1e-13;
const SPECTRAL_ITERS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LowerKind {
    /// A rigorous bound (up to floating-point rounding).
    Certified,
    /// An estimate carrying no guarantee.
    Heuristic,
}

/// Which argument produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSource {
    /// `min_N log Z_N / N` (sub-multiplicativity).
    Fekete,
    /// Super-multiplicativity of sums glued through connecting words.
    Gluing,
    /// Spectral radius of the boundary-symbol transfer matrix.
    Transfer,
    /// Exact Perron root, available at `w = 0` and `w = 1`.
    Spectral,
    /// Ratio bounds for the transfer operator on directions of fiber vectors.
    Projective,
    /// Difference `log Z_N - log Z_{N-1}`.
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub w: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "logZ")]
    pub log_z: f64,
    pub upper: f64,
    pub lower: f64,
    pub lower_kind: LowerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthBounds {
    pub w: f64,
    pub resolution: usize,
    pub n_max: usize,
    pub upper: f64,
    pub lower: f64,
    pub lower_kind: LowerKind,
    pub estimate: f64,
    pub upper_source: BoundSource,
    pub lower_source: BoundSource,
    pub records: Vec<GrowthRecord>,
}

impl GrowthBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }
}

/// Encloses `lim log Z_N / N` using `N = 1 ..= n_max`.
pub fn growth_limit_bounds(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    n_max: usize,
    opts: &CoverOptions,
) -> Result<GrowthBounds> {
    check_weight(w)?;
    if n_max == 0 {
        return Err(crate::Error::invalid("nmax", "must be at least 1"));
    }
    f.validate_for(pair.x(), opts.limits.word_cap)?;
    let x = pair.x();
    let m = opts.resolution;
    let use_transfer = m == 0 && x.size() <= TRANSFER_MAX_ALPHABET;

    let mut logs = Vec::with_capacity(n_max);
    let mut boundary: Option<BoundarySums> = None;
    for n in 1..=n_max {
        if use_transfer && n == n_max {
            let (sums, b) = boundary_sums(pair, w, f, n, opts)?;
            logs.push(sums.log_z);
            boundary = Some(b);
        } else {
            logs.push(partition_sums(pair, w, f, n, opts)?.log_z);
        }
    }

    let (fmin, fmax) = f.range_on(x, opts.limits.word_cap)?;
    let osc = fmax - fmin;
    let k = f.window() as f64;
    // gap g and log c in Z_{N+M+g} >= c Z_N Z_M, resolution 0
    let gluing = x.primitivity_exponent().map(|p| {
        let g = p - 1;
        let log_c = if g == 0 {
            -w * (k - 1.0) * osc
        } else {
            w * (g as f64 * fmin - (k - 1.0) * osc)
        };
        (g, log_c)
    });
    // log Z^{(0)}_{j+m} >= log Z^{(m)}_j + w m min f
    let shift = w * m as f64 * fmin;

    let mut records = Vec::with_capacity(n_max);
    let mut upper = f64::INFINITY;
    let mut glued = f64::NEG_INFINITY;
    for (i, &a) in logs.iter().enumerate() {
        let n = i + 1;
        upper = upper.min(a / n as f64);
        if let Some((g, log_c)) = gluing {
            glued = glued.max((a + shift + log_c) / (n + m + g) as f64);
        }
        let (lower, lower_kind) = if glued > f64::NEG_INFINITY {
            (glued.min(upper), LowerKind::Certified)
        } else {
            (cauchy(&logs[..n]).min(upper), LowerKind::Heuristic)
        };
        records.push(GrowthRecord {
            w,
            n,
            log_z: a,
            upper,
            lower,
            lower_kind,
        });
    }

    let mut upper_source = BoundSource::Fekete;
    let (mut lower, mut lower_source) = if glued > f64::NEG_INFINITY {
        (glued, BoundSource::Gluing)
    } else {
        (f64::NEG_INFINITY, BoundSource::Cauchy)
    };

    if let Some(b) = &boundary {
        let (up, low) = transfer_bounds(pair, w, b);
        if up < upper {
            upper = up;
            upper_source = BoundSource::Transfer;
        }
        if low > lower {
            lower = low;
            lower_source = BoundSource::Transfer;
        }
    }

    if w > 0.0 && w < 1.0 {
        let depth = n_max.min(PROJECTIVE_MAX_DEPTH);
        if let Some(p) = projective_bounds(pair, w, f, depth, opts.limits.state_cap as u64)? {
            if p.upper < upper {
                upper = p.upper;
                upper_source = BoundSource::Projective;
            }
            if p.lower > lower {
                lower = p.lower;
                lower_source = BoundSource::Projective;
            }
        }
    }

    if w == 0.0 || w == 1.0 {
        let (lo, hi) = exact_log_bracket(pair, w, f, opts)?;
        if hi <= upper {
            upper = hi;
            upper_source = BoundSource::Spectral;
        }
        if lo >= lower {
            lower = lo;
            lower_source = BoundSource::Spectral;
        }
    }

    let cauchy_estimate = cauchy(&logs);
    let (lower, lower_kind) = if lower > f64::NEG_INFINITY {
        (lower.min(upper), LowerKind::Certified)
    } else {
        (cauchy_estimate.min(upper), LowerKind::Heuristic)
    };
    let estimate = if matches!(lower_source, BoundSource::Spectral | BoundSource::Projective)
        && matches!(upper_source, BoundSource::Spectral | BoundSource::Projective)
    {
        0.5 * (lower + upper)
    } else {
        cauchy_estimate.clamp(lower, upper)
    };
    if let Some(last) = records.last_mut() {
        last.upper = upper;
        last.lower = lower;
        last.lower_kind = lower_kind;
    }

    Ok(GrowthBounds {
        w,
        resolution: m,
        n_max,
        upper,
        lower,
        lower_kind,
        estimate,
        upper_source,
        lower_source,
        records,
    })
}

fn cauchy(logs: &[f64]) -> f64 {
    match logs {
        [] => f64::NAN,
        [a] => *a,
        [.., a, b] => b - a,
    }
}

/// `(upper, lower)` from the boundary transfer matrices built on `L_N` blocks.
fn transfer_bounds(pair: &FactorPair, w: f64, b: &BoundarySums) -> (f64, f64) {
    let x = pair.x();
    let n = b.n as f64;
    let nx = x.size();
    let cells = |grid: &[Vec<f64>]| -> Vec<(usize, usize, f64)> {
        (0..nx)
            .flat_map(|i| (0..nx).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = grid[i][j];
                (v > f64::NEG_INFINITY).then_some((i, j, v))
            })
            .collect()
    };
    let block_matrix = |states: &[(usize, usize, f64)], weighted: bool| -> (SparseMatrix, f64) {
        let top = states
            .iter()
            .map(|s| s.2)
            .fold(f64::NEG_INFINITY, f64::max);
        let rows = states
            .iter()
            .map(|&(_, e, _)| {
                states
                    .iter()
                    .enumerate()
                    .filter(|(_, &(b2, _, _))| x.allows(e, b2))
                    .map(|(j, &(_, _, v))| (j, if weighted { (v - top).exp() } else { 1.0 }))
                    .collect()
            })
            .collect();
        (
            SparseMatrix {
                n: states.len(),
                rows,
            },
            if weighted { top } else { 0.0 },
        )
    };

    let sup_states = cells(&b.sup);
    let (t_sup, shift_sup) = block_matrix(&sup_states, true);
    let br_sup = spectral_bracket(&t_sup, SPECTRAL_TOL, SPECTRAL_ITERS);
    let upper = (br_sup.upper.ln() + shift_sup) / n;

    let inf_states = cells(&b.inf);
    let (t_inf, shift_inf) = block_matrix(&inf_states, true);
    let (m_p, _) = block_matrix(&inf_states, false);
    let br_inf = spectral_bracket(&t_inf, SPECTRAL_TOL, SPECTRAL_ITERS);
    let br_count = spectral_bracket(&m_p, SPECTRAL_TOL, SPECTRAL_ITERS);
    let lower = if br_inf.lower > 0.0 && br_count.upper > 0.0 {
        (br_inf.lower.ln() + shift_inf - (1.0 - w) * br_count.upper.ln()) / n
    } else {
        f64::NEG_INFINITY
    };
    (upper, lower)
}

/// Log of the Perron-root bracket for the growth rate at `w = 1` (weighted
/// transitions of `x`) or `w = 0` (the presentation of `y`).
fn exact_log_bracket(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    opts: &CoverOptions,
) -> Result<(f64, f64)> {
    if w == 0.0 {
        let b = spectral_bracket(&pair.y().adjacency(), SPECTRAL_TOL, SPECTRAL_ITERS);
        return Ok((b.lower.ln(), b.upper.ln()));
    }
    let x = pair.x();
    let k = f.window();
    let ctx_len = (k - 1).max(1);
    let ctx: Vec<Vec<usize>> =
        enumerate_words(x, ctx_len, opts.limits.state_cap as u64)?.map(|w| w.0).collect();
    let index: std::collections::HashMap<&[usize], usize> =
        ctx.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let (_, fmax) = f.range_on(x, opts.limits.word_cap)?;
    let mut rows = vec![Vec::new(); ctx.len()];
    for (s, word) in ctx.iter().enumerate() {
        let last = *word.last().expect("nonempty");
        for &a in x.successors(last) {
            let mut window: Vec<usize> = if k == 1 { Vec::new() } else { word.clone() };
            window.push(a);
            let next = if ctx_len == 1 {
                index[&[a][..]]
            } else {
                index[&window[1..]]
            };
            rows[s].push((next, (f.value(&window) - fmax).exp()));
        }
    }
    let m = SparseMatrix {
        n: ctx.len(),
        rows,
    };
    let b = spectral_bracket(&m, SPECTRAL_TOL, SPECTRAL_ITERS);
    Ok((b.lower.ln() + fmax, b.upper.ln() + fmax))
}

/// Pairs `(N, M, excess)` with `log Z_{N+M} > log Z_N + log Z_M + tol`.
pub fn submultiplicativity_violations(records: &[GrowthRecord], tol: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for a in records {
        for b in records {
            if a.n > b.n {
                continue;
            }
            if let Some(c) = records.iter().find(|r| r.n == a.n + b.n) {
                let excess = c.log_z - a.log_z - b.log_z;
                let scale = 1.0f64.max(c.log_z.abs());
                if excess > tol * scale {
                    out.push((a.n, b.n, excess));
                }
            }
        }
    }
    out
}
