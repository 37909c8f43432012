// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wentro::carpets::{carpet_dimension, carpet_to_factor_pair, CarpetSpec};
use wentro::cover::{growth_limit_bounds, weighted_partition_sum, CoverOptions, Potential};
use wentro::measures::weighted_measure_value;
use wentro::symbolic::{Alphabet, BlockCode, FactorPair, Sft};
use wentro::variational::*;
use wentro::Limits;

const LOG_GOLDEN: f64 = 0.481_211_825_059_603_4;
const VALUE_32: f64 = 0.935_529_534_615_940_8;

fn example() -> CarpetSpec {
    CarpetSpec::new(3, 2, vec![(0, 0), (1, 1), (2, 0)]).unwrap()
}

fn pair_of(adj: Vec<Vec<bool>>, code: Vec<usize>) -> FactorPair {
    let n = adj.len();
    let labels = code.iter().max().unwrap() + 1;
    let x = Sft::new(Alphabet::new(n).unwrap(), adj).unwrap();
    let code = BlockCode::new(n, Alphabet::new(labels).unwrap(), code).unwrap();
    FactorPair::new(x, code, &Limits::default()).unwrap()
}

fn random_primitive_pair(rng: &mut ChaCha8Rng) -> FactorPair {
    loop {
        let n = rng.gen_range(2..=4);
        let adj: Vec<Vec<bool>> = (0..n).map(|_| (0..n).map(|_| rng.gen_bool(0.6)).collect()).collect();
        let Ok(x) = Sft::new(Alphabet::new(n).unwrap(), adj.clone()) else { continue };
        if x.size() != n || !x.is_primitive() {
            continue;
        }
        let labels = rng.gen_range(1..=n);
        let mut code: Vec<usize> = (0..n).map(|i| if i < labels { i } else { rng.gen_range(0..labels) }).collect();
        code.rotate_left(rng.gen_range(0..n));
        return pair_of(adj, code);
    }
}

fn golden_collapsed() -> FactorPair {
    pair_of(vec![vec![true, true], vec![true, false]], vec![0, 0])
}

fn words(x: &Sft, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..x.size()).map(|a| vec![a]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().unwrap();
                (0..x.size()).filter(move |&b| x.allows(last, b)).map(move |b| {
                    let mut v = w.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

/// `sigma_N` masses from scratch: suprema over all continuations, grouped by image.
fn sigma_oracle(pair: &FactorPair, w: f64, f: &dyn Fn(&[usize]) -> f64, k: usize, n: usize) -> (BTreeMap<Vec<usize>, f64>, f64) {
    let x = pair.x();
    let mut sups = BTreeMap::new();
    for long in words(x, n + k - 1) {
        let s: f64 = (0..n).map(|i| f(&long[i..i + k])).sum();
        let e = sups.entry(long[..n].to_vec()).or_insert(f64::NEG_INFINITY);
        *e = f64::max(*e, s);
    }
    let mut fiber: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (u, &s) in &sups {
        let v: Vec<usize> = u.iter().map(|&a| pair.label(a)).collect();
        *fiber.entry(v).or_default() += s.exp();
    }
    let z: f64 = fiber.values().map(|z| z.powf(w)).sum();
    let sigma = sups
        .iter()
        .map(|(u, &s)| {
            let v: Vec<usize> = u.iter().map(|&a| pair.label(a)).collect();
            (u.clone(), fiber[&v].powf(w - 1.0) * s.exp() / z)
        })
        .collect();
    (sigma, z.ln())
}

#[test]
fn sigma_matches_direct_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let limits = Limits::default();
    for case in 0..12 {
        let pair = random_primitive_pair(&mut rng);
        let k = 1 + case % 2;
        let d = pair.x().size();
        let table: BTreeMap<Vec<usize>, f64> = words(pair.x(), k)
            .into_iter()
            .map(|u| (u, rng.gen_range(-1.0..1.0)))
            .collect();
        let f = Potential::from_table(k, table.clone()).unwrap();
        let w = [0.0, 0.3, 0.7, 1.0][case % 4];
        let n = 1 + case % 5;
        let state = misiurewicz_sigma(&pair, w, &f, n, &limits).unwrap();
        let (sigma, log_z) = sigma_oracle(&pair, w, &|u| table[u], k, n);
        assert!((state.log_z - log_z).abs() < 1e-12);
        assert_eq!(state.sigma.len(), sigma.len());
        for (u, p) in &sigma {
            assert!((state.sigma.get(u) - p).abs() < 1e-12, "d={d} {u:?}");
        }
        assert!((state.sigma.total() - 1.0).abs() < 1e-12);
        let direct = weighted_partition_sum(&pair, w, &f, n, &CoverOptions::default()).unwrap();
        assert!((state.log_z - direct).abs() < 1e-10);
        for r in &state.representatives {
            assert_eq!(r.point().len(), n + k - 1);
        }
    }
}

#[test]
fn identity_residual_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let limits = Limits::default();
    for case in 0..40 {
        let pair = random_primitive_pair(&mut rng);
        let values: Vec<f64> = (0..pair.x().size()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = Potential::symbolwise(&values);
        let w = rng.gen_range(0.0..=1.0);
        let n = 1 + case % 8;
        let state = misiurewicz_sigma(&pair, w, &f, n, &limits).unwrap();
        assert!(misiurewicz_identity_residual(&state, w) <= 1e-10);
    }
}

#[test]
fn sigma_special_cases() {
    let limits = Limits::default();
    // f = 0, w = 1: uniform on L_N(X)
    let pair = golden_collapsed();
    let state = misiurewicz_sigma(&pair, 1.0, &Potential::zero(), 6, &limits).unwrap();
    assert_eq!(state.sigma.len(), 21);
    for &p in &state.sigma.probs {
        assert!((p - 1.0 / 21.0).abs() < 1e-15);
    }
    assert!(misiurewicz_identity_residual(&state, 1.0) < 1e-14);

    // carpet: pushforward masses Z_{N,A}^w / Z_N
    let c = example();
    let pair = carpet_to_factor_pair(&c).unwrap();
    let w = c.weight();
    let state = misiurewicz_sigma(&pair, w, &Potential::zero(), 5, &limits).unwrap();
    for (mass, lz) in state.pushforward().iter().zip(&state.log_z_image) {
        assert!((mass - (w * lz - state.log_z).exp()).abs() < 1e-14);
    }
    // sigma(B) is the product of t(y)^{w-1} / sum t^w over the rows of B
    let t = [2.0f64, 1.0];
    let z = 2f64.powf(w) + 1.0;
    for (word, &p) in state.sigma.words.iter().zip(&state.sigma.probs) {
        let q: f64 = word.symbols().iter().map(|&s| t[pair.label(s)].powf(w - 1.0) / z).product();
        assert!((p - q).abs() < 1e-14);
    }

    // N = 1 by hand: X full on {0,1,2}, code (0,0,1), f = (0, ln 2, 0), w = 1/2.
    // Z_{1,0} = 1 + 2 = 3, Z_{1,1} = 1, Z_1 = sqrt 3 + 1.
    let pair = pair_of(vec![vec![true; 3]; 3], vec![0, 0, 1]);
    let f = Potential::symbolwise(&[0.0, 2f64.ln(), 0.0]);
    let state = misiurewicz_sigma(&pair, 0.5, &f, 1, &limits).unwrap();
    let z = 3f64.sqrt() + 1.0;
    let expect = [1.0 / (3f64.sqrt() * z), 2.0 / (3f64.sqrt() * z), 1.0 / z];
    for (p, e) in state.sigma.probs.iter().zip(expect) {
        assert!((p - e).abs() < 1e-15);
    }
}

#[test]
fn lower_bound_checks() {
    let limits = Limits::default();
    let r = misiurewicz_lower_bound_check(&golden_collapsed(), 1.0, &Potential::zero(), 6, 6, &limits).unwrap();
    assert!(r.holds);
    assert!((r.upstairs_rhs - (21f64.ln() / 6.0 - 2.0 * 2f64.ln())).abs() < 1e-12);

    let r = misiurewicz_lower_bound_check(&golden_collapsed(), 0.5, &Potential::zero(), 12, 3, &limits).unwrap();
    assert!(r.holds);
    assert!(r.upstairs_lhs - r.upstairs_rhs > 0.0);
    assert!((r.mu.total() - 1.0).abs() < 1e-12);

    let c = example();
    let pair = carpet_to_factor_pair(&c).unwrap();
    let r = misiurewicz_lower_bound_check(&pair, c.weight(), &Potential::zero(), 10, 2, &limits).unwrap();
    assert!(r.holds);
    assert!(r.downstairs_lhs >= r.downstairs_rhs);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let pair = random_primitive_pair(&mut rng);
        let f = Potential::symbolwise(&(0..pair.x().size()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let r = misiurewicz_lower_bound_check(&pair, rng.gen_range(0.0..1.0), &f, 7, 3, &limits).unwrap();
        assert!(r.holds, "{r:?}");
    }
    assert!(misiurewicz_lower_bound_check(&golden_collapsed(), 1.0, &Potential::zero(), 3, 4, &limits).is_err());
}

#[test]
fn carpet_measure_realizes_the_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let cases = (0..15).map(|_| {
        let b = rng.gen_range(2..=5u32);
        let a = rng.gen_range(b..=5u32);
        let mut digits: Vec<(u32, u32)> = (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).collect();
        digits.retain(|_| rng.gen_bool(0.5));
        if digits.is_empty() {
            digits.push((0, 0));
        }
        CarpetSpec::new(a, b, digits).unwrap()
    });
    for c in cases.chain([example()]) {
        let w = c.weight();
        let pair = carpet_to_factor_pair(&c).unwrap();
        let m = carpet_optimal_measure(&c, w).unwrap();
        let v = weighted_measure_value(&pair, &m, w, &Potential::zero(), 4, 1 << 20).unwrap();
        let d = carpet_dimension(&c);
        assert!((v.lower - d.entropy).abs() < 1e-10 && (v.upper - d.entropy).abs() < 1e-10);
        let g = growth_limit_bounds(&pair, w, &Potential::zero(), 3, &CoverOptions::default()).unwrap();
        assert!((v.lower - g.lower).abs() < 1e-9 && (v.upper - g.upper).abs() < 1e-9);
    }
    let c = example();
    let p = carpet_optimal_measure(&c, c.weight()).unwrap().stationary().to_vec();
    let w = c.weight();
    let z = 2f64.powf(w) + 1.0;
    assert!((p[0] - 2f64.powf(w - 1.0) / z).abs() < 1e-15);
    assert!((p[2] - p[0]).abs() < 1e-15);
    assert!((p[1] - 1.0 / z).abs() < 1e-15);

    // full digit set: uniform, value log b + w log a
    let full = CarpetSpec::new(4, 2, (0..4).flat_map(|x| (0..2).map(move |y| (x, y))).collect()).unwrap();
    let p = carpet_optimal_measure(&full, full.weight()).unwrap();
    assert!(p.stationary().iter().all(|&q| (q - 0.125).abs() < 1e-15));
    // one row: uniform over its cells
    let row = CarpetSpec::new(5, 3, vec![(0, 1), (2, 1), (4, 1)]).unwrap();
    let p = carpet_optimal_measure(&row, row.weight()).unwrap();
    assert!(p.stationary().iter().all(|&q| (q - 1.0 / 3.0).abs() < 1e-15));
}

/// `w H(p) + (1 - w) H(row marginal)` on the 2-simplex of the reference carpet.
fn grid_optimum(w: f64, steps: usize) -> (f64, [f64; 3]) {
    let h = |v: &[f64]| -> f64 { v.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum() };
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for i in 0..=steps {
        for j in 0..=steps - i {
            let p = [i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
            let v = w * h(&p) + (1.0 - w) * h(&[p[0] + p[2], p[1]]);
            if v > best.0 {
                best = (v, p);
            }
        }
    }
    best
}

fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[test]
fn optimizer_recovers_the_carpet_optimum() {
    let c = example();
    let w = c.weight();
    let pair = carpet_to_factor_pair(&c).unwrap();
    let opt = optimize_weighted_value(&pair, w, &Potential::zero(), &OptimizerConfig::default()).unwrap();
    assert_eq!(opt.family, Family::Bernoulli);
    assert!((opt.value.lower - VALUE_32).abs() < 1e-4, "{}", opt.value.lower);
    let (gv, gp) = grid_optimum(w, 600);
    assert!(gv <= VALUE_32 + 1e-12 && gv > VALUE_32 - 1e-4);
    assert!(tv(opt.measure.stationary(), &gp) < 5e-3);
    let exact = carpet_optimal_measure(&c, w).unwrap();
    assert!(tv(opt.measure.stationary(), exact.stationary()) < 1e-3);
}

#[test]
fn optimizer_finds_the_parry_measure() {
    let opt = optimize_weighted_value(&golden_collapsed(), 1.0, &Potential::zero(), &OptimizerConfig::default()).unwrap();
    assert_eq!(opt.family, Family::Markov);
    assert!((opt.value.lower - LOG_GOLDEN).abs() < 1e-5, "{}", opt.value.lower);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((opt.measure.transition()[0][0] - 1.0 / phi).abs() < 1e-2);
}

#[test]
fn single_point_system_has_value_zero() {
    let pair = pair_of(vec![vec![true]], vec![0]);
    for w in [0.0, 0.4, 1.0] {
        let opt = optimize_weighted_value(&pair, w, &Potential::zero(), &OptimizerConfig::default()).unwrap();
        assert_eq!(opt.value.lower, 0.0);
        assert_eq!(opt.value.upper, 0.0);
    }
}

#[test]
fn optimizer_is_deterministic_and_monotone_in_restarts() {
    let pair = pair_of(
        vec![vec![true, true, false], vec![false, true, true], vec![true, true, true]],
        vec![0, 1, 1],
    );
    let f = Potential::symbolwise(&[0.3, -0.2, 0.1]);
    let cfg = |restarts| OptimizerConfig {
        restarts,
        seed: 7,
        max_iters: 200,
        ..OptimizerConfig::default()
    };
    let a = optimize_weighted_value(&pair, 0.6, &f, &cfg(3)).unwrap();
    let b = optimize_weighted_value(&pair, 0.6, &f, &cfg(3)).unwrap();
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    assert_eq!(a.measure, b.measure);
    let mut last = f64::NEG_INFINITY;
    for r in 1..=4 {
        let o = optimize_weighted_value(&pair, 0.6, &f, &cfg(r)).unwrap().objective;
        assert!(o >= last);
        last = o;
    }
}

#[test]
fn constant_shift_moves_only_the_value() {
    let pair = golden_collapsed();
    let f = Potential::symbolwise(&[0.2, -0.4]);
    let c = 0.75;
    let w = 0.5;
    let cfg = OptimizerConfig {
        restarts: 2,
        max_iters: 400,
        ..OptimizerConfig::default()
    };
    let a = optimize_weighted_value(&pair, w, &f, &cfg).unwrap();
    let b = optimize_weighted_value(&pair, w, &f.shifted(c), &cfg).unwrap();
    assert!((b.objective - a.objective - w * c).abs() < 1e-6);
    for (ra, rb) in a.measure.transition().iter().zip(b.measure.transition()) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() < 1e-3);
        }
    }
}

#[test]
fn optimum_stays_below_the_cover_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = OptimizerConfig {
        restarts: 2,
        max_iters: 150,
        ..OptimizerConfig::default()
    };
    for _ in 0..6 {
        let pair = random_primitive_pair(&mut rng);
        let f = Potential::symbolwise(&(0..pair.x().size()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let w = rng.gen_range(0.0..=1.0);
        let opt = optimize_weighted_value(&pair, w, &f, &cfg).unwrap();
        let g = growth_limit_bounds(&pair, w, &f, 10, &CoverOptions::default()).unwrap();
        assert!(opt.value.lower <= g.upper + 1e-6, "{} > {}", opt.value.lower, g.upper);
    }
}

#[test]
fn config_and_family_errors() {
    let pair = golden_collapsed();
    let bad = OptimizerConfig {
        restarts: 0,
        ..OptimizerConfig::default()
    };
    assert!(optimize_weighted_value(&pair, 0.5, &Potential::zero(), &bad).is_err());
    let bad = OptimizerConfig {
        tol: 0.0,
        ..OptimizerConfig::default()
    };
    assert!(optimize_weighted_value(&pair, 0.5, &Potential::zero(), &bad).is_err());
    let bern = OptimizerConfig {
        family: Some(Family::Bernoulli),
        ..OptimizerConfig::default()
    };
    let e = optimize_weighted_value(&pair, 0.5, &Potential::zero(), &bern).unwrap_err();
    assert!(e.to_string().contains("family"));
    assert!("markov".parse::<Family>().is_ok() && "gauss".parse::<Family>().is_err());
}
