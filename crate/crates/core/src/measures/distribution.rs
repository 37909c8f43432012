// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, neg_xlogx, neumaier_sum};

const MASS_TOL: f64 = 1e-12;

/// Probability vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_mass("weights", &weights, MASS_TOL)?;
        Ok(Distribution { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("weights", "must be nonempty"));
        }
        Ok(Distribution {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

pub(crate) fn check_mass(field: &str, weights: &[f64], tol: f64) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::invalid(field, "must be nonempty"));
    }
    if let Some((i, p)) = weights.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
        return Err(Error::invalid(format!("{field}[{i}]"), format!("{p} is not a probability")));
    }
    let total = neumaier_sum(weights.iter().copied());
    if (total - 1.0).abs() > tol {
        return Err(Error::invalid(field, format!("masses sum to {total}, not 1")));
    }
    Ok(())
}

/// `-sum p ln p` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(d: &Distribution) -> f64 {
    entropy_of(&d.weights)
}

/// Entropy of any nonnegative mass vector (no normalisation check).
pub fn entropy_of(masses: &[f64]) -> f64 {
    neumaier_sum(masses.iter().map(|&p| neg_xlogx(p)))
}

/// `H(fine | coarse)`, where cell `i` of the fine partition, of mass
/// `fine[i]`, lies in coarse cell `coarse[i]`. Coarse cells of zero mass are skipped.
pub fn conditional_entropy(fine: &[f64], coarse: &[usize]) -> Result<f64> {
    if fine.len() != coarse.len() {
        return Err(Error::invalid(
            "coarse",
            format!("{} labels for {} cells", coarse.len(), fine.len()),
        ));
    }
    check_mass("joint", fine, 1e-10)?;
    let cells = coarse.iter().copied().max().map_or(0, |m| m + 1);
    let mut mass = vec![0.0; cells];
    for (&p, &c) in fine.iter().zip(coarse) {
        mass[c] += p;
    }
    Ok(neumaier_sum(fine.iter().zip(coarse).filter(|(&p, &c)| p > 0.0 && mass[c] > 0.0)
        .map(|(&p, &c)| -p * (p / mass[c]).ln())))
}

/// `(x + y)^w <= x^w + y^w` for `x, y >= 0`, `w` in `[0, 1]`: returns the
/// right side minus the left.
pub fn power_subadditivity_slack(x: f64, y: f64, w: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    x.powf(w) + y.powf(w) - (x + y).powf(w)
}

/// `sum p_i (x_i - ln p_i) <= ln sum e^{x_i}`: returns the right side minus the left.
pub fn gibbs_slack(p: &[f64], x: &[f64]) -> f64 {
    let lhs = neumaier_sum(p.iter().zip(x).map(|(&p, &x)| neg_xlogx(p) + if p > 0.0 { p * x } else { 0.0 }));
    log_sum_exp(x) - lhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        let u = Distribution::uniform(4).unwrap();
        assert!((shannon_entropy(&u) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(shannon_entropy(&Distribution::new(vec![1.0, 0.0, 0.0]).unwrap()), 0.0);
        let d = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((shannon_entropy(&d) - 1.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }

    #[test]
    fn conditional_entropy_examples() {
        // fine = coarse
        assert_eq!(conditional_entropy(&[0.3, 0.7], &[0, 1]).unwrap(), 0.0);
        // independent uniform pair: cell (a, b) at index 2a + b, coarse = a
        let h = conditional_entropy(&[0.25; 4], &[0, 0, 1, 1]).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);
        assert!(conditional_entropy(&[0.25; 4], &[0, 0, 1]).is_err());
        assert!(conditional_entropy(&[0.25; 3], &[0, 0, 1]).is_err());
    }

    #[test]
    fn slack_functions() {
        assert!(power_subadditivity_slack(2.0, 3.0, 0.5) > 0.0);
        assert_eq!(power_subadditivity_slack(2.0, 3.0, 1.0), 0.0);
        assert_eq!(power_subadditivity_slack(0.0, 3.0, 0.3), 0.0);
        // equality at the Gibbs distribution
        let x = [0.1, -2.0, 1.3];
        let z: f64 = x.iter().map(|v: &f64| v.exp()).sum();
        let p: Vec<f64> = x.iter().map(|v| v.exp() / z).collect();
        assert!(gibbs_slack(&p, &x).abs() < 1e-14);
        assert!(gibbs_slack(&[1.0, 0.0, 0.0], &x) > 0.0);
    }
}
