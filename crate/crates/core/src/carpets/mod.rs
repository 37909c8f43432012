// SPDX-License-Identifier: Apache-2.0

//! Bedford–McMullen carpets and their sofic generalisations.
//!
//! A carpet in base `(a, b)` with digit set `R` is coded by the full shift on
//! `R`; projecting each digit to its row gives a factor map onto the full
//! shift on the occupied rows `R'`. With `w = log_a b` and `t(y)` the number
//! of digits in row `y`, the Hausdorff dimension is `log_b sum_y t(y)^w`.

use serde::Serialize;

use crate::cover::{growth_limit_bounds, CoverOptions, GrowthBounds, LowerKind, Potential};
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, neumaier_sum};
use crate::symbolic::{Alphabet, BlockCode, FactorPair, Sft};

/// Digit set `R` in base `(a, b)`, `a >= b >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarpetSpec {
    a: u32,
    b: u32,
    digits: Vec<(u32, u32)>,
}

impl CarpetSpec {
    /// Digits keep their input order, which fixes the symbol numbering of the
    /// coding shift.
    pub fn new(a: u32, b: u32, digits: Vec<(u32, u32)>) -> Result<Self> {
        if b < 2 {
            return Err(Error::invalid("b", format!("{b} is below 2")));
        }
        if a < b {
            return Err(Error::invalid("a", format!("{a} is smaller than b = {b}")));
        }
        if digits.is_empty() {
            return Err(Error::invalid("R", "must be nonempty"));
        }
        for (i, &(x, y)) in digits.iter().enumerate() {
            if x >= a || y >= b {
                return Err(Error::invalid(
                    format!("R[{i}]"),
                    format!("({x}, {y}) is outside {a} x {b}"),
                ));
            }
            if digits[..i].contains(&(x, y)) {
                return Err(Error::invalid(format!("R[{i}]"), format!("({x}, {y}) is repeated")));
            }
        }
        Ok(CarpetSpec { a, b, digits })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn digits(&self) -> &[(u32, u32)] {
        &self.digits
    }

    /// Occupied rows `R'`, ascending.
    pub fn rows(&self) -> Vec<u32> {
        let mut rows: Vec<u32> = self.digits.iter().map(|d| d.1).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// `t(y)` for each `y` in [`CarpetSpec::rows`].
    pub fn row_counts(&self) -> Vec<u32> {
        self.rows()
            .iter()
            .map(|&y| self.digits.iter().filter(|d| d.1 == y).count() as u32)
            .collect()
    }

    /// `w = log_a b`.
    pub fn weight(&self) -> f64 {
        (self.b as f64).ln() / (self.a as f64).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarpetDimension {
    pub dimension_dim: f64,
    pub w: f64,
    /// `log sum_y t(y)^w`, the weighted entropy in nats.
    pub entropy: f64,
    /// Whether the value was obtained in exact integer arithmetic.
    pub exact: bool,
}

/// Closed-form Hausdorff dimension.
pub fn carpet_dimension(c: &CarpetSpec) -> CarpetDimension {
    let w = c.weight();
    let counts = c.row_counts();
    let ln_b = (c.b as f64).ln();
    // t = 1 gives 1 and t = a gives a^w = b exactly
    if counts.iter().all(|&t| t == 1 || t == c.a) {
        let total: u64 = counts.iter().map(|&t| if t == 1 { 1 } else { c.b as u64 }).sum();
        if let Some((p, q)) = rational_log(total, c.b as u64) {
            let dimension_dim = p as f64 / q as f64;
            return CarpetDimension {
                dimension_dim,
                w,
                entropy: dimension_dim * ln_b,
                exact: true,
            };
        }
        let entropy = (total as f64).ln();
        return CarpetDimension {
            dimension_dim: entropy / ln_b,
            w,
            entropy,
            exact: false,
        };
    }
    let logs: Vec<f64> = counts.iter().map(|&t| w * (t as f64).ln()).collect();
    let entropy = log_sum_exp(&logs);
    CarpetDimension {
        dimension_dim: entropy / ln_b,
        w,
        entropy,
        exact: false,
    }
}

/// `(p, q)` with `n^q = base^p`, `q` as small as possible.
fn rational_log(n: u64, base: u64) -> Option<(u32, u32)> {
    let (n, base) = (n as u128, base as u128);
    let mut nq = 1u128;
    for q in 1..=32u32 {
        nq = nq.checked_mul(n)?;
        let mut v = 1u128;
        let mut p = 0;
        while v < nq {
            v = v.checked_mul(base)?;
            p += 1;
        }
        if v == nq {
            return Some((p, q));
        }
    }
    None
}

fn digit_labels(c: &CarpetSpec) -> Vec<String> {
    c.digits.iter().map(|(x, y)| format!("({x},{y})")).collect()
}

fn row_code(c: &CarpetSpec) -> Result<BlockCode> {
    let rows = c.rows();
    let table = c
        .digits
        .iter()
        .map(|d| rows.binary_search(&d.1).expect("row present"))
        .collect();
    let labels = rows.iter().map(|y| y.to_string()).collect();
    BlockCode::new(c.digits.len(), Alphabet::with_labels(labels)?, table)
}

/// Full shift on `R` over the full shift on `R'`, via the row projection.
pub fn carpet_to_factor_pair(c: &CarpetSpec) -> Result<FactorPair> {
    let n = c.digits.len();
    let x = Sft::new(Alphabet::with_labels(digit_labels(c))?, vec![vec![true; n]; n])?;
    FactorPair::new(x, row_code(c)?, &crate::Limits::default())
}

/// Carpet whose digit sequences are restricted by a transition matrix over `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoficCarpetSpec {
    pub carpet: CarpetSpec,
    /// `transitions[i][j]`: digit `j` may follow digit `i`, in the order of `R`.
    pub transitions: Vec<Vec<bool>>,
}

impl SoficCarpetSpec {
    pub fn new(carpet: CarpetSpec, transitions: Vec<Vec<bool>>) -> Result<Self> {
        let n = carpet.digits.len();
        if transitions.len() != n {
            return Err(Error::invalid(
                "digit_transitions",
                format!("{} rows for {n} digits", transitions.len()),
            ));
        }
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(
                    format!("digit_transitions[{i}]"),
                    format!("row length {} differs from {n}", row.len()),
                ));
            }
        }
        Ok(SoficCarpetSpec { carpet, transitions })
    }

    /// The coding pair: digit SFT (essential part) over its row image.
    pub fn factor_pair(&self, opts: &CoverOptions) -> Result<FactorPair> {
        let x = Sft::new(
            Alphabet::with_labels(digit_labels(&self.carpet))?,
            self.transitions.clone(),
        )?;
        let code = row_code(&self.carpet)?.restrict_domain(x.origin());
        FactorPair::new(x, code, &opts.limits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoficCarpetDimension {
    pub lower_dim: f64,
    pub upper_dim: f64,
    pub estimate_dim: f64,
    pub lower_kind: LowerKind,
    pub w: f64,
    pub bounds: GrowthBounds,
}

/// Dimension interval from the weighted entropy of the coding pair at `w = log_a b`.
pub fn sofic_carpet_dimension(
    c: &SoficCarpetSpec,
    n_max: usize,
    opts: &CoverOptions,
) -> Result<SoficCarpetDimension> {
    let pair = c.factor_pair(opts)?;
    let w = c.carpet.weight();
    let bounds = growth_limit_bounds(&pair, w, &Potential::zero(), n_max, opts)?;
    let ln_b = (c.carpet.b as f64).ln();
    Ok(SoficCarpetDimension {
        lower_dim: bounds.lower / ln_b,
        upper_dim: bounds.upper / ln_b,
        estimate_dim: bounds.estimate / ln_b,
        lower_kind: bounds.lower_kind,
        w,
        bounds,
    })
}

/// `log sum_y t(y)^w` for an arbitrary weight.
pub fn carpet_weighted_entropy(c: &CarpetSpec, w: f64) -> f64 {
    let logs: Vec<f64> = c.row_counts().iter().map(|&t| w * (t as f64).ln()).collect();
    log_sum_exp(&logs)
}

/// Bernoulli weights `t(y)^{w-1} / sum t^w` in the order of `R`.
pub fn carpet_optimal_weights(c: &CarpetSpec, w: f64) -> Vec<f64> {
    let rows = c.rows();
    let counts = c.row_counts();
    let z = carpet_weighted_entropy(c, w);
    let raw: Vec<f64> = c
        .digits
        .iter()
        .map(|d| {
            let t = counts[rows.binary_search(&d.1).expect("row present")] as f64;
            ((w - 1.0) * t.ln() - z).exp()
        })
        .collect();
    let total = neumaier_sum(raw.iter().copied());
    raw.iter().map(|p| p / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_dimensions_are_exact() {
        let full: Vec<(u32, u32)> = (0..3).flat_map(|x| (0..2).map(move |y| (x, y))).collect();
        let d = carpet_dimension(&CarpetSpec::new(3, 2, full).unwrap());
        assert!(d.exact);
        assert_eq!(d.dimension_dim, 2.0);
        let d = carpet_dimension(&CarpetSpec::new(3, 2, vec![(1, 1)]).unwrap());
        assert_eq!(d.dimension_dim, 0.0);
        assert!(d.exact);
    }

    #[test]
    fn spec_validation() {
        assert!(CarpetSpec::new(2, 3, vec![(0, 0)]).is_err());
        assert!(CarpetSpec::new(3, 1, vec![(0, 0)]).is_err());
        assert!(CarpetSpec::new(3, 2, vec![]).is_err());
        let e = CarpetSpec::new(3, 2, vec![(0, 0), (3, 1)]).unwrap_err();
        assert!(e.to_string().contains("R[1]"));
        assert!(CarpetSpec::new(3, 2, vec![(0, 0), (0, 0)]).is_err());
    }

    #[test]
    fn row_profile() {
        let c = CarpetSpec::new(3, 2, vec![(0, 0), (1, 1), (2, 0)]).unwrap();
        assert_eq!(c.rows(), vec![0, 1]);
        assert_eq!(c.row_counts(), vec![2, 1]);
        let p = carpet_optimal_weights(&c, c.weight());
        let w = c.weight();
        let z = 2f64.powf(w) + 1.0;
        assert!((p[0] - 2f64.powf(w - 1.0) / z).abs() < 1e-15);
        assert!((p[1] - 1.0 / z).abs() < 1e-15);
    }
}
