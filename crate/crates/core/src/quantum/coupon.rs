//! Flag-distillation bookkeeping: how many copies of the star state are
//! needed before every link has delivered its entangled pair at least once.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{input, Result};
use crate::seed::SeedStream;

/// Probability that `k` uniform draws from `m` links cover all of them,
/// `sum_j (-1)^j C(m, j) (1 - j/m)^k`.
pub fn coupon_collector_prob(m: u64, k: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if k < m {
        return 0.0;
    }
    let mf = m as f64;
    let mut binom = 1.0f64;
    let mut total = 0.0;
    for j in 0..=m {
        if j > 0 {
            binom *= (m - j + 1) as f64 / j as f64;
        }
        let term = binom * (1.0 - j as f64 / mf).powf(k as f64);
        total += if j % 2 == 0 { term } else { -term };
    }
    total.clamp(0.0, 1.0)
}

/// Smallest `k` with `coupon_collector_prob(m, k) >= p`.
pub fn copies_for_success(m: u64, p: f64) -> Result<u64> {
    if m == 0 {
        return input("need at least one link");
    }
    if !(p > 0.0 && p < 1.0) {
        return input(format!("target probability {p} must lie in (0, 1)"));
    }
    // Expected coverage time is about m ln m; the tail decays geometrically past it.
    let cap = 1_000 * m * (64 - m.leading_zeros() as u64 + 1) + 1_000;
    (m..=cap)
        .find(|&k| coupon_collector_prob(m, k) >= p)
        .ok_or_else(|| crate::Error::Capacity(format!("no k <= {cap} reaches probability {p} for m={m}")))
}

/// Links hit by `k` uniform draws; `covered[i]` is true if link `i` was drawn.
pub fn simulate_flag_protocol<R: Rng + ?Sized>(m: usize, k: u64, rng: &mut R) -> Vec<bool> {
    let mut covered = vec![false; m];
    if m == 0 {
        return covered;
    }
    for _ in 0..k {
        covered[rng.gen_range(0..m)] = true;
    }
    covered
}

const TRIALS_PER_STREAM: u64 = 4096;

/// Fraction of `trials` simulated protocols covering all links, with its
/// binomial standard error.
pub fn estimate_coverage(m: usize, k: u64, trials: u64, seeds: &SeedStream) -> Result<(f64, f64)> {
    if trials == 0 {
        return input("need at least one trial");
    }
    let chunks = trials.div_ceil(TRIALS_PER_STREAM);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeds.rng("flag-protocol", c);
            let n = TRIALS_PER_STREAM.min(trials - c * TRIALS_PER_STREAM);
            (0..n).filter(|_| simulate_flag_protocol(m, k, &mut rng).iter().all(|&b| b)).count() as u64
        })
        .sum();
    let p = hits as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}
