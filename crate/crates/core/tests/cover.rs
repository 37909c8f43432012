// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use wentro::cover::{
    amplification_check, growth_limit_bounds, partition_sums, submultiplicativity_violations,
    CoverOptions, LowerKind, Potential,
};
use wentro::symbolic::{Alphabet, BlockCode, FactorPair, Sft};
use wentro::{Error, Limits};

/// Every word over `0..n` of length `len` allowed by `adj`, by plain recursion.
fn naive_words(adj: &[Vec<bool>], len: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out: Vec<Vec<usize>> = (0..n).map(|a| vec![a]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                (0..n).filter(move |&b| adj[last][b]).map(move |b| {
                    let mut v = w.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    // keep only words that extend to the right forever (all rows here have a successor)
    out
}

/// `(log Z, log Z_separated)` by direct enumeration.
fn oracle(
    adj: &[Vec<bool>],
    code: &[usize],
    f: &dyn Fn(&[usize]) -> f64,
    k: usize,
    w: f64,
    n: usize,
    m: usize,
) -> (f64, f64) {
    let len = n + m;
    let ext = (n + k - 1).saturating_sub(len);
    let mut fibers: BTreeMap<Vec<usize>, (f64, f64)> = BTreeMap::new();
    for u in naive_words(adj, len) {
        let mut best = f64::NEG_INFINITY;
        let mut worst = f64::INFINITY;
        // all continuations of u of length ext
        let mut conts = vec![u.clone()];
        for _ in 0..ext {
            conts = conts
                .into_iter()
                .flat_map(|c| {
                    let last = *c.last().unwrap();
                    (0..adj.len()).filter(move |&b| adj[last][b]).map(move |b| {
                        let mut v = c.clone();
                        v.push(b);
                        v
                    })
                })
                .collect();
        }
        for c in conts {
            let s: f64 = (0..n).map(|i| f(&c[i..i + k])).sum();
            best = best.max(s);
            worst = worst.min(s);
        }
        let image: Vec<usize> = u.iter().map(|&a| code[a]).collect();
        let e = fibers.entry(image).or_insert((0.0, 0.0));
        e.0 += best.exp();
        e.1 += worst.exp();
    }
    let z: f64 = fibers.values().map(|v| if w == 0.0 { 1.0 } else { v.0.powf(w) }).sum();
    let zs: f64 = fibers.values().map(|v| if w == 0.0 { 1.0 } else { v.1.powf(w) }).sum();
    (z.ln(), zs.ln())
}

struct Case {
    adj: Vec<Vec<bool>>,
    code: Vec<usize>,
    labels: usize,
}

impl Case {
    fn pair(&self) -> FactorPair {
        let x = Sft::new(Alphabet::new(self.adj.len()).unwrap(), self.adj.clone()).unwrap();
        let code = BlockCode::new(x.size(), Alphabet::new(self.labels).unwrap(), self.code.clone()).unwrap();
        FactorPair::new(x, code, &Limits::default()).unwrap()
    }
}

fn cases() -> Vec<Case> {
    let t = true;
    let o = false;
    vec![
        Case { adj: vec![vec![t, t], vec![t, o]], code: vec![0, 1], labels: 2 },
        Case { adj: vec![vec![t, t], vec![t, o]], code: vec![0, 0], labels: 1 },
        Case {
            adj: vec![vec![t, t, o], vec![o, t, t], vec![t, o, t]],
            code: vec![0, 1, 1],
            labels: 2,
        },
        Case {
            adj: vec![vec![t, t, t, o], vec![t, o, t, t], vec![o, t, t, t], vec![t, t, o, t]],
            code: vec![0, 0, 1, 2],
            labels: 3,
        },
        // even shift presented as a factor of a 3-state SFT
        Case {
            adj: vec![vec![t, t, o], vec![o, o, t], vec![t, t, o]],
            code: vec![0, 1, 1],
            labels: 2,
        },
    ]
}

fn potential_for(case: &Case, k: usize) -> (Potential, impl Fn(&[usize]) -> f64) {
    let g = move |w: &[usize]| -> f64 {
        w.iter()
            .enumerate()
            .map(|(i, &a)| ((a * 7 + i * 3 + 1) % 5) as f64 * 0.37 - 0.6)
            .sum::<f64>()
            .sin()
    };
    let x = case.pair().x().clone();
    let f = Potential::tabulate(&x, k, 1 << 20, g).unwrap();
    (f, g)
}

#[test]
fn partition_sums_match_direct_enumeration() {
    for (ci, case) in cases().iter().enumerate() {
        let pair = case.pair();
        for k in 1..=3 {
            let (f, g) = potential_for(case, k);
            for m in 0..=2 {
                for &w in &[0.0, 0.3, 0.75, 1.0] {
                    for n in [1, 2, 5] {
                        let opts = CoverOptions::default().with_resolution(m);
                        let got = partition_sums(&pair, w, &f, n, &opts).unwrap();
                        let (z, zs) = oracle(&case.adj, &case.code, &g, k, w, n, m);
                        let tol = 1e-10 * (1.0 + z.abs());
                        assert!(
                            (got.log_z - z).abs() < tol,
                            "case {ci} k={k} m={m} w={w} n={n}: {} vs {z}",
                            got.log_z
                        );
                        assert!(
                            (got.log_z_separated - zs).abs() < tol,
                            "separated case {ci} k={k} m={m} w={w} n={n}: {} vs {zs}",
                            got.log_z_separated
                        );
                        assert!(got.log_z_separated <= got.log_z + tol);
                    }
                }
            }
        }
    }
}

#[test]
fn short_cylinders_use_direct_enumeration() {
    // window 4 makes the context longer than a cylinder of length 2
    let case = &cases()[2];
    let pair = case.pair();
    let (f, g) = potential_for(case, 4);
    for n in 1..=2 {
        let got = partition_sums(&pair, 0.4, &f, n, &CoverOptions::default()).unwrap();
        let (z, zs) = oracle(&case.adj, &case.code, &g, 4, 0.4, n, 0);
        assert!((got.log_z - z).abs() < 1e-10);
        assert!((got.log_z_separated - zs).abs() < 1e-10);
    }
}

#[test]
fn serial_and_parallel_agree_bitwise() {
    let case = &cases()[3];
    let pair = case.pair();
    let (f, _) = potential_for(case, 2);
    let par = CoverOptions::default();
    let ser = CoverOptions { parallel: false, ..par };
    let a = partition_sums(&pair, 0.6, &f, 9, &par).unwrap();
    let b = partition_sums(&pair, 0.6, &f, 9, &ser).unwrap();
    assert_eq!(a.log_z.to_bits(), b.log_z.to_bits());
    assert_eq!(a.log_z_separated.to_bits(), b.log_z_separated.to_bits());
}

fn carpet_pair() -> FactorPair {
    // digits (0,0), (1,0), (0,1): two of them sit in row 0
    let x = Sft::full(3).unwrap();
    let code = BlockCode::new(3, Alphabet::new(2).unwrap(), vec![0, 0, 1]).unwrap();
    FactorPair::new(x, code, &Limits::default()).unwrap()
}

#[test]
fn product_fibers_have_closed_form() {
    let pair = carpet_pair();
    for &w in &[0.0, 0.2, 0.5, 0.9, 1.0] {
        for n in 1..=8 {
            let z = partition_sums(&pair, w, &Potential::zero(), n, &CoverOptions::default())
                .unwrap()
                .log_z;
            let exact = n as f64 * (2f64.powf(w) + 1.0).ln();
            assert!((z - exact).abs() < 1e-12 * (1.0 + exact), "w={w} n={n}");
        }
    }
}

#[test]
fn bounds_enclose_closed_form_values() {
    let pair = carpet_pair();
    for &w in &[0.0, 0.3, 0.631, 1.0] {
        let b = growth_limit_bounds(&pair, w, &Potential::zero(), 6, &CoverOptions::default()).unwrap();
        let exact = (2f64.powf(w) + 1.0).ln();
        assert_eq!(b.lower_kind, LowerKind::Certified);
        assert!(b.contains(exact, 1e-12), "w={w}: [{}, {}] vs {exact}", b.lower, b.upper);
        assert!(b.width() < 1e-9, "w={w} width {}", b.width());
    }
}

#[test]
fn golden_mean_pressure_is_bracketed() {
    let x = Sft::golden_mean();
    let pair = FactorPair::new(x.clone(), BlockCode::identity(2), &Limits::default()).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let b = growth_limit_bounds(&pair, 1.0, &Potential::zero(), 10, &CoverOptions::default()).unwrap();
    assert!(b.contains(phi.ln(), 1e-12));
    assert!(b.width() < 1e-10);
    // collapse to a point: w = 1 still gives ln(phi), w = 0 gives 0
    let point = FactorPair::new(x, BlockCode::collapse(2), &Limits::default()).unwrap();
    let b1 = growth_limit_bounds(&point, 1.0, &Potential::zero(), 8, &CoverOptions::default()).unwrap();
    assert!(b1.contains(phi.ln(), 1e-12) && b1.width() < 1e-10);
    let b0 = growth_limit_bounds(&point, 0.0, &Potential::zero(), 8, &CoverOptions::default()).unwrap();
    assert!(b0.contains(0.0, 1e-12) && b0.width() < 1e-10);
}

#[test]
fn weighted_potential_at_w_one_is_classical_pressure() {
    // P(f) for f = c * 1_{x_0 = 1} on the golden mean shift: largest root of t^2 = t + e^c
    let c: f64 = 0.8;
    let x = Sft::golden_mean();
    let pair = FactorPair::new(x, BlockCode::collapse(2), &Limits::default()).unwrap();
    let f = Potential::symbolwise(&[0.0, c]);
    let exact = ((1.0 + (1.0 + 4.0 * c.exp()).sqrt()) / 2.0).ln();
    let b = growth_limit_bounds(&pair, 1.0, &f, 6, &CoverOptions::default()).unwrap();
    assert!(b.contains(exact, 1e-12));
}

#[test]
fn bounds_from_different_horizons_are_consistent() {
    for case in cases() {
        let pair = case.pair();
        let (f, _) = potential_for(&case, 2);
        for &w in &[0.25, 0.5, 0.8] {
            let short = growth_limit_bounds(&pair, w, &f, 5, &CoverOptions::default()).unwrap();
            let long = growth_limit_bounds(&pair, w, &f, 11, &CoverOptions::default()).unwrap();
            for (a, b) in [(&short, &long), (&long, &short)] {
                if a.lower_kind == LowerKind::Certified {
                    assert!(a.lower <= b.upper + 1e-12, "w={w}: {} > {}", a.lower, b.upper);
                }
            }
            assert!(long.upper <= short.upper + 1e-12);
            assert!(submultiplicativity_violations(&long.records, 1e-12).is_empty());
        }
    }
}

#[test]
fn power_system_reproduces_longer_sums() {
    for case in cases() {
        let pair = case.pair();
        let (f, _) = potential_for(&case, 2);
        for m in 1..=3 {
            let r = amplification_check(&pair, 0.45, &f, m, 3, &CoverOptions::default()).unwrap();
            assert!(r.residual < 1e-9, "m={m}: {r:?}");
        }
    }
}

#[test]
fn invalid_weight_and_cap() {
    let pair = carpet_pair();
    let opts = CoverOptions::default();
    assert!(matches!(
        partition_sums(&pair, 1.5, &Potential::zero(), 2, &opts),
        Err(Error::InvalidInput { .. })
    ));
    assert!(matches!(
        partition_sums(&pair, f64::NAN, &Potential::zero(), 2, &opts),
        Err(Error::InvalidInput { .. })
    ));
    let tight = opts.with_limits(Limits::default().with_word_cap(100));
    assert!(matches!(
        partition_sums(&pair, 0.5, &Potential::zero(), 10, &tight),
        Err(Error::CapExceeded { .. })
    ));
}

/// `log rho(B)` for `B[i][j] = adj[i][j] * exp(g(i, j))`, by plain power iteration.
fn dense_pressure(adj: &[Vec<bool>], g: &dyn Fn(usize, usize) -> f64) -> f64 {
    let n = adj.len();
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if adj[i][j] { g(i, j).exp() } else { 0.0 }).collect())
        .collect();
    let mut v = vec![1.0; n];
    let mut log_growth = 0.0;
    for _ in 0..20_000 {
        let next: Vec<f64> = (0..n).map(|i| (0..n).map(|j| b[i][j] * v[j]).sum::<f64>() + v[i]).collect();
        let norm = next.iter().cloned().fold(0.0, f64::max);
        log_growth = norm.ln();
        v = next.iter().map(|x| x / norm).collect();
    }
    // the iteration ran on B + I
    (log_growth.exp() - 1.0).ln()
}

#[test]
fn general_weight_matches_closed_forms() {
    for case in cases().iter().filter(|c| c.adj.len() <= 3) {
        let x = case.pair().x().clone();
        for k in 1..=2 {
            let (f, g) = potential_for(case, k);
            let edge = |i: usize, j: usize| if k == 1 { g(&[j]) } else { g(&[i, j]) };
            let point = FactorPair::new(x.clone(), BlockCode::collapse(x.size()), &Limits::default()).unwrap();
            let ident = FactorPair::new(x.clone(), BlockCode::identity(x.size()), &Limits::default()).unwrap();
            for &w in &[0.2, 0.55, 0.9] {
                let p_point = w * dense_pressure(&case.adj, &edge);
                let p_ident = dense_pressure(&case.adj, &|i, j| w * edge(i, j));
                for (pair, exact) in [(&point, p_point), (&ident, p_ident)] {
                    let b = growth_limit_bounds(pair, w, &f, 10, &CoverOptions::default()).unwrap();
                    assert_eq!(b.lower_kind, LowerKind::Certified);
                    assert!(b.contains(exact, 1e-9), "k={k} w={w}: [{}, {}] vs {exact}", b.lower, b.upper);
                }
            }
        }
    }
}

#[test]
fn sofic_fibers_are_enclosed_tightly() {
    // carpet digits (0,0), (1,1), (2,0) with (1,1) never repeated
    let mut t = vec![vec![true; 3]; 3];
    t[1][1] = false;
    let x = Sft::new(Alphabet::new(3).unwrap(), t).unwrap();
    let code = BlockCode::new(3, Alphabet::new(2).unwrap(), vec![0, 1, 0]).unwrap();
    let pair = FactorPair::new(x, code, &Limits::default()).unwrap();
    let w = 2f64.ln() / 3f64.ln();
    let b = growth_limit_bounds(&pair, w, &Potential::zero(), 14, &CoverOptions::default()).unwrap();
    assert_eq!(b.lower_kind, LowerKind::Certified);
    assert!(b.width() < 1e-6, "width {}", b.width());
    // independent enclosure from the raw sums at a longer horizon
    let long = growth_limit_bounds(&pair, w, &Potential::zero(), 18, &CoverOptions::default()).unwrap();
    let fekete = long.records.iter().map(|r| r.log_z / r.n as f64).fold(f64::INFINITY, f64::min);
    assert!(b.upper <= fekete + 1e-12);
    assert!((b.estimate - long.estimate).abs() < 1e-6);
}
