// SPDX-License-Identifier: Apache-2.0

//! Seeded generators for test and verification batches.

use rand::Rng;

use crate::carpets::CarpetSpec;
use crate::cover::Potential;
use crate::error::Result;
use crate::measures::MarkovMeasure;
use crate::symbolic::{Alphabet, BlockCode, FactorPair, Sft};
use crate::Limits;

/// Primitive SFT on `size` symbols, rejection-sampled from 0/1 matrices.
pub fn random_primitive_sft<R: Rng>(rng: &mut R, size: usize) -> Sft {
    let density = 0.6;
    loop {
        let t: Vec<Vec<bool>> = (0..size)
            .map(|_| (0..size).map(|_| rng.gen_bool(density)).collect())
            .collect();
        let covered = (0..size).all(|i| t[i].iter().any(|&b| b) && t.iter().any(|row| row[i]));
        if !covered {
            continue;
        }
        if let Ok(x) = Sft::new(Alphabet::new(size).expect("size >= 1"), t) {
            if x.size() == size && x.is_primitive() {
                return x;
            }
        }
    }
}

/// Primitive `X` on 2 to `max_size` symbols with a random onto code to
/// between 1 and `|X|` labels.
pub fn random_pair<R: Rng>(rng: &mut R, max_size: usize, limits: &Limits) -> Result<FactorPair> {
    let n = rng.gen_range(2..=max_size.max(2));
    let x = random_primitive_sft(rng, n);
    let labels = rng.gen_range(1..=n);
    let mut table: Vec<usize> = (0..n).map(|i| if i < labels { i } else { rng.gen_range(0..labels) }).collect();
    for i in (1..n).rev() {
        table.swap(i, rng.gen_range(0..=i));
    }
    let code = BlockCode::new(n, Alphabet::new(labels)?, table)?;
    FactorPair::new(x, code, limits)
}

/// Window-1 potential with values uniform in `[-scale, scale]`.
pub fn random_potential<R: Rng>(rng: &mut R, x: &Sft, scale: f64) -> Potential {
    let values: Vec<f64> = (0..x.size()).map(|_| rng.gen_range(-scale..=scale)).collect();
    Potential::symbolwise(&values)
}

/// Markov measure with random positive weights on the allowed transitions.
pub fn random_markov_measure<R: Rng>(rng: &mut R, x: &Sft) -> Result<MarkovMeasure> {
    let n = x.size();
    let p = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            for &j in x.successors(i) {
                row[j] = rng.gen_range(0.05..1.0);
            }
            let s: f64 = row.iter().sum();
            row.iter().map(|v| v / s).collect()
        })
        .collect();
    MarkovMeasure::new(x.clone(), p)
}

/// Carpet with `2 <= b <= a <= max_a` and each digit present with probability 1/2.
pub fn random_carpet<R: Rng>(rng: &mut R, max_a: u32) -> CarpetSpec {
    let b = rng.gen_range(2..=max_a.max(2));
    let a = rng.gen_range(b..=max_a.max(2));
    let mut digits: Vec<(u32, u32)> = (0..a)
        .flat_map(|x| (0..b).map(move |y| (x, y)))
        .collect();
    digits.retain(|_| rng.gen_bool(0.5));
    if digits.is_empty() {
        digits.push((rng.gen_range(0..a), rng.gen_range(0..b)));
    }
    CarpetSpec::new(a, b, digits).expect("digits in range")
}
