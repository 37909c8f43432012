// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{check_weight, Potential};
use crate::error::{Error, Result};
use crate::measures::{weighted_measure_value, MarkovMeasure, MeasureValue};
use crate::numeric::project_to_simplex;
use crate::symbolic::{FactorPair, Sft};
use crate::Limits;

/// Parametric family searched by [`optimize_weighted_value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// i.i.d. symbols; needs a full shift.
    Bernoulli,
    /// One-step Markov chains on the allowed transitions.
    Markov,
}

impl Family {
    /// Bernoulli on full shifts, Markov otherwise.
    pub fn default_for(x: &Sft) -> Family {
        if x.is_full() {
            Family::Bernoulli
        } else {
            Family::Markov
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(Family::Bernoulli),
            "markov" => Ok(Family::Markov),
            other => Err(Error::invalid("family", format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// `None` picks [`Family::default_for`].
    pub family: Option<Family>,
    pub restarts: usize,
    pub max_iters: usize,
    /// `c` in the step size `c / sqrt(t)`.
    pub step: f64,
    /// Stop after ten consecutive iterations improving by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Horizon of the image-entropy bounds during the search.
    pub search_n_max: usize,
    /// Horizon of the reported interval.
    pub final_n_max: usize,
    #[serde(skip)]
    pub limits: Limits,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            family: None,
            restarts: 4,
            max_iters: 2000,
            step: 0.5,
            tol: 1e-8,
            seed: 0,
            search_n_max: 6,
            final_n_max: 12,
            limits: Limits::default(),
        }
    }
}

impl OptimizerConfig {
    fn check(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "must be at least 1"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid("tol", format!("{} is not positive", self.tol)));
        }
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::invalid("step", format!("{} is not positive", self.step)));
        }
        if self.search_n_max == 0 || self.final_n_max == 0 {
            return Err(Error::invalid("nmax", "must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartReport {
    pub index: usize,
    pub objective: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub family: Family,
    pub measure: MarkovMeasure,
    /// Best lower value seen during the search.
    pub objective: f64,
    /// Value interval of `measure` at the final horizon.
    pub value: MeasureValue,
    pub best_restart: usize,
    pub restarts: Vec<RestartReport>,
}

const FD_STEP: f64 = 1e-5;
const FLOOR: f64 = 2e-5;
const PATIENCE: usize = 10;
const MAX_HALVINGS: usize = 30;

/// Free coordinates: one simplex per row of the transition matrix, or a single
/// simplex for Bernoulli weights.
struct Layout {
    family: Family,
    sft: Sft,
    rows: Vec<Vec<usize>>,
}

impl Layout {
    fn new(sft: &Sft, family: Family) -> Result<Self> {
        let rows = match family {
            Family::Bernoulli => {
                if !sft.is_full() {
                    return Err(Error::invalid("family", "Bernoulli measures need a full shift"));
                }
                vec![(0..sft.size()).collect()]
            }
            Family::Markov => (0..sft.size()).map(|i| sft.successors(i).to_vec()).collect(),
        };
        if rows.iter().any(|r| 1.0 - FLOOR * r.len() as f64 <= 0.0) {
            return Err(Error::invalid("alphabet", "too large for the simplex floor"));
        }
        Ok(Layout {
            family,
            sft: sft.clone(),
            rows,
        })
    }

    fn uniform(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| vec![1.0 / r.len() as f64; r.len()])
            .collect()
    }

    fn dirichlet(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let e: Vec<f64> = (0..r.len())
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let s: f64 = e.iter().sum();
                project_to_simplex(&e.iter().map(|v| v / s).collect::<Vec<_>>(), FLOOR)
            })
            .collect()
    }

    /// Rows are renormalised so that off-simplex probes stay meaningful.
    fn measure(&self, theta: &[Vec<f64>]) -> Result<MarkovMeasure> {
        let normalise = |v: &[f64]| {
            let s: f64 = v.iter().sum();
            v.iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        match self.family {
            Family::Bernoulli => MarkovMeasure::bernoulli(self.sft.clone(), normalise(&theta[0])),
            Family::Markov => {
                let n = self.sft.size();
                let mut p = vec![vec![0.0; n]; n];
                for (i, (succ, t)) in self.rows.iter().zip(theta).enumerate() {
                    for (&j, q) in succ.iter().zip(normalise(t)) {
                        p[i][j] = q;
                    }
                }
                MarkovMeasure::new(self.sft.clone(), p)
            }
        }
    }
}

struct Problem<'a> {
    pair: &'a FactorPair,
    w: f64,
    f: &'a Potential,
    layout: Layout,
    n_max: usize,
    cap: u64,
}

impl Problem<'_> {
    fn objective(&self, theta: &[Vec<f64>]) -> Result<f64> {
        let m = self.layout.measure(theta)?;
        let v = weighted_measure_value(self.pair, &m, self.w, self.f, self.n_max, self.cap)?;
        if !v.lower.is_finite() {
            return Err(Error::NonFinite(format!("objective {}", v.lower)));
        }
        Ok(v.lower)
    }

    fn gradient(&self, theta: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let mut probe = theta.to_vec();
        let mut g = Vec::with_capacity(theta.len());
        for r in 0..theta.len() {
            let mut row = vec![0.0; theta[r].len()];
            if theta[r].len() > 1 {
                for (j, slot) in row.iter_mut().enumerate() {
                    let base = theta[r][j];
                    probe[r][j] = base + FD_STEP;
                    let up = self.objective(&probe)?;
                    probe[r][j] = base - FD_STEP;
                    let down = self.objective(&probe)?;
                    probe[r][j] = base;
                    *slot = (up - down) / (2.0 * FD_STEP);
                }
            }
            g.push(row);
        }
        Ok(g)
    }

    fn ascend(&self, start: Vec<Vec<f64>>, cfg: &OptimizerConfig) -> Result<(Vec<Vec<f64>>, f64, usize, bool)> {
        let mut theta = start;
        let mut value = self.objective(&theta)?;
        let mut quiet = 0;
        for t in 1..=cfg.max_iters {
            let g = self.gradient(&theta)?;
            let mut eta = cfg.step / (t as f64).sqrt();
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let cand: Vec<Vec<f64>> = theta
                    .iter()
                    .zip(&g)
                    .map(|(row, gr)| {
                        if row.len() == 1 {
                            return row.clone();
                        }
                        let moved: Vec<f64> = row.iter().zip(gr).map(|(x, d)| x + eta * d).collect();
                        project_to_simplex(&moved, FLOOR)
                    })
                    .collect();
                let v = self.objective(&cand)?;
                if v >= value {
                    accepted = Some((cand, v));
                    break;
                }
                eta *= 0.5;
            }
            let delta = match accepted {
                Some((cand, v)) => {
                    let d = v - value;
                    theta = cand;
                    value = v;
                    d
                }
                None => 0.0,
            };
            if delta.abs() < cfg.tol {
                quiet += 1;
                if quiet >= PATIENCE {
                    return Ok((theta, value, t, true));
                }
            } else {
                quiet = 0;
            }
        }
        Ok((theta, value, cfg.max_iters, false))
    }
}

/// Projected gradient ascent of the lower end of [`weighted_measure_value`]
/// over a measure family, best of several restarts.
///
/// Restart 0 starts from uniform rows; restart `i > 0` from a Dirichlet(1)
/// draw seeded with `seed + i`. The result does not depend on thread count.
pub fn optimize_weighted_value(
    pair: &FactorPair,
    w: f64,
    f: &Potential,
    cfg: &OptimizerConfig,
) -> Result<Optimum> {
    check_weight(w)?;
    cfg.check()?;
    let cap = cfg.limits.word_cap;
    f.validate_for(pair.x(), cap)?;
    let family = cfg.family.unwrap_or_else(|| Family::default_for(pair.x()));
    let problem = Problem {
        pair,
        w,
        f,
        layout: Layout::new(pair.x(), family)?,
        n_max: cfg.search_n_max,
        cap,
    };

    let runs: Vec<(RestartReport, Option<Vec<Vec<f64>>>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|index| {
            let start = if index == 0 {
                problem.layout.uniform()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
                problem.layout.dirichlet(&mut rng)
            };
            match problem.ascend(start, cfg) {
                Ok((theta, value, iterations, converged)) => (
                    RestartReport {
                        index,
                        objective: Some(value),
                        iterations,
                        converged,
                        error: None,
                    },
                    Some(theta),
                ),
                Err(e) => {
                    log::warn!("restart {index} aborted: {e}");
                    (
                        RestartReport {
                            index,
                            objective: None,
                            iterations: 0,
                            converged: false,
                            error: Some(e.to_string()),
                        },
                        None,
                    )
                }
            }
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (report, _) in &runs {
        if let Some(v) = report.objective {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((report.index, v));
            }
        }
    }
    let (best_restart, objective) = best.ok_or_else(|| {
        Error::NonFinite(format!(
            "every restart failed: {}",
            runs.iter()
                .filter_map(|(r, _)| r.error.clone())
                .collect::<Vec<_>>()
                .join("; ")
        ))
    })?;
    let theta = runs[best_restart].1.as_ref().expect("successful restart keeps its point");
    let measure = problem.layout.measure(theta)?;
    let value = weighted_measure_value(pair, &measure, w, f, cfg.final_n_max, cap)?;
    Ok(Optimum {
        family,
        measure,
        objective,
        value,
        best_restart,
        restarts: runs.into_iter().map(|(r, _)| r).collect(),
    })
}
