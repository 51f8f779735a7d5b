use rayon::prelude::*;

use super::{sample_round, KVParams, KVStrategy, Method, ScoreEstimate};
use crate::error::{capacity, input, Result};
use crate::seed::SeedStream;

/// Samples handled by one deterministic sub-stream in [`mc_score`].
pub const MC_CHUNK: u64 = 4096;

/// Limit on the representative-pair sum of [`exact_score`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactBudget {
    /// Maximum `|{a(x)}| * |{b(y)}|`.
    pub max_pairs: u128,
}

impl Default for ExactBudget {
    fn default() -> Self {
        Self { max_pairs: 1 << 26 }
    }
}

/// Exact winning probability of a strategy pair.
///
/// Uses `P_W = |H|^L 2^{-nL} sum_{a in A} sum_{b in B} eta^{|a+b|} (1-eta)^{nL-|a+b|}`
/// where `A`, `B` are the sets of chosen orbit elements, i.e. one term per
/// pair of orbits rather than per `(x, z)`.
pub fn exact_score(a: &KVStrategy, b: &KVStrategy, params: &KVParams) -> Result<ScoreEstimate> {
    exact_score_with_budget(a, b, params, ExactBudget::default())
}

pub fn exact_score_with_budget(
    a: &KVStrategy,
    b: &KVStrategy,
    params: &KVParams,
    budget: ExactBudget,
) -> Result<ScoreEstimate> {
    check_compatible(a, params)?;
    check_compatible(b, params)?;
    let pairs = a.chosen_count().saturating_mul(b.chosen_count());
    if pairs > budget.max_pairs {
        return capacity(format!(
            "exact score needs {pairs} orbit pairs (budget {}); use mc_score instead",
            budget.max_pairs
        ));
    }
    let bits = params.input_bits();
    let hist = if bits <= 64 {
        distance_histogram(&pack::<u64>(a, params)?, &pack::<u64>(b, params)?, bits)
    } else if bits <= 128 {
        distance_histogram(&pack::<u128>(a, params)?, &pack::<u128>(b, params)?, bits)
    } else {
        return capacity(format!("{bits} input bits exceed the 128-bit packing"));
    };
    let weights = pair_weights(params);
    let value = hist.iter().zip(&weights).map(|(&c, &w)| c as f64 * w).sum();
    Ok(ScoreEstimate::exact(value))
}

/// `|H|^L 2^{-nL} eta^d (1-eta)^{nL-d}` for `d = 0..=nL`.
fn pair_weights(params: &KVParams) -> Vec<f64> {
    let bits = params.input_bits();
    let eta = params.eta();
    let l = f64::from(params.repetitions());
    let n = f64::from(params.word_len());
    if bits > 32 {
        let base = l * n.ln() - f64::from(bits) * std::f64::consts::LN_2;
        (0..=bits)
            .map(|d| (base + f64::from(d) * eta.ln() + f64::from(bits - d) * (1.0 - eta).ln()).exp())
            .collect()
    } else {
        let scale = n.powi(params.repetitions() as i32) / 2f64.powi(bits as i32);
        (0..=bits).map(|d| scale * eta.powi(d as i32) * (1.0 - eta).powi((bits - d) as i32)).collect()
    }
}

trait Packed: Copy + Send + Sync + std::ops::BitXor<Output = Self> {
    fn from_u64(v: u64) -> Self;
    fn shl_or(self, shift: u32, v: u64) -> Self;
    fn popcount(self) -> u32;
}

impl Packed for u64 {
    fn from_u64(v: u64) -> Self {
        v
    }
    fn shl_or(self, shift: u32, v: u64) -> Self {
        if shift == 64 { v } else { (self << shift) | v }
    }
    fn popcount(self) -> u32 {
        self.count_ones()
    }
}

impl Packed for u128 {
    fn from_u64(v: u64) -> Self {
        u128::from(v)
    }
    fn shl_or(self, shift: u32, v: u64) -> Self {
        (self << shift) | u128::from(v)
    }
    fn popcount(self) -> u32 {
        self.count_ones()
    }
}

fn pack<T: Packed>(s: &KVStrategy, params: &KVParams) -> Result<Vec<T>> {
    let n = params.word_len();
    Ok(s.chosen_tuples()?
        .into_iter()
        .map(|t| t.iter().fold(T::from_u64(0), |acc, w| acc.shl_or(n, w.bits())))
        .collect())
}

fn distance_histogram<T: Packed>(a: &[T], b: &[T], bits: u32) -> Vec<u64> {
    let len = bits as usize + 1;
    a.par_chunks(64)
        .map(|chunk| {
            let mut hist = vec![0u64; len];
            for &x in chunk {
                for &y in b {
                    hist[(x ^ y).popcount() as usize] += 1;
                }
            }
            hist
        })
        .reduce(
            || vec![0u64; len],
            |mut acc, h| {
                acc.iter_mut().zip(h).for_each(|(a, b)| *a += b);
                acc
            },
        )
}

/// Monte Carlo estimate of the winning probability.
///
/// Samples are split into chunks of [`MC_CHUNK`]; chunk `c` draws from the
/// `("kv-mc", c)` sub-stream of `seeds`, so the estimate does not depend on the
/// number of worker threads.
pub fn mc_score(
    a: &KVStrategy,
    b: &KVStrategy,
    params: &KVParams,
    samples: u64,
    seeds: &SeedStream,
) -> Result<ScoreEstimate> {
    if samples == 0 {
        return input("mc_score needs at least one sample");
    }
    check_compatible(a, params)?;
    check_compatible(b, params)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    let wins = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<u64> {
            let mut rng = seeds.rng("kv-mc", c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut wins = 0u64;
            for _ in 0..count {
                let round = sample_round(params, &mut rng);
                let ra = a.respond_unchecked(&round.x)?;
                let rb = b.respond_unchecked(&round.y)?;
                let ok = ra.iter().zip(&rb).zip(&round.z).all(|((p, q), z)| p.xor_unchecked(q) == *z);
                wins += u64::from(ok);
            }
            Ok(wins)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<u64>();
    let p = wins as f64 / samples as f64;
    Ok(ScoreEstimate {
        value: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        method: Method::MonteCarlo,
    })
}

fn check_compatible(s: &KVStrategy, params: &KVParams) -> Result<()> {
    if s.code().word_len() != params.word_len() || s.repetitions() != params.repetitions() {
        return input(format!(
            "strategy is for n={}, L={} but the game has n={}, L={}",
            s.code().word_len(),
            s.repetitions(),
            params.word_len(),
            params.repetitions()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::kvgame::{classical_bound, max_weight_strategy, random_strategy};

    #[test]
    fn n4_max_weight_matches_frozen_oracle() {
        // 9/16 from exhaustive (x, z) enumeration in exact rationals.
        let p = KVParams::new(2, 1, 0.25).unwrap();
        let s = max_weight_strategy(p.code(), 1);
        let v = exact_score(&s, &s, &p).unwrap();
        assert!((v.value - 0.5625).abs() < 1e-12);
        assert_eq!(v.std_error, 0.0);
        assert_eq!(v.samples, 0);
    }

    #[test]
    fn product_strategies_factorize() {
        let seeds = SeedStream::new(3);
        let p1 = KVParams::new(2, 1, 0.3).unwrap();
        let p2 = KVParams::new(2, 2, 0.3).unwrap();
        let a = random_strategy(p1.code(), 2, &mut seeds.rng("a", 0)).unwrap();
        let b = random_strategy(p1.code(), 2, &mut seeds.rng("b", 0)).unwrap();
        let slot = |s: &KVStrategy, i: usize| match s {
            KVStrategy::Product { code, slots } => KVStrategy::Product { code: code.clone(), slots: vec![slots[i].clone()] },
            _ => unreachable!(),
        };
        let s0 = exact_score(&slot(&a, 0), &slot(&b, 0), &p1).unwrap().value;
        let s1 = exact_score(&slot(&a, 1), &slot(&b, 1), &p1).unwrap().value;
        let joint = exact_score(&a, &b, &p2).unwrap().value;
        assert!((joint - s0 * s1).abs() < 1e-12);
    }

    #[test]
    fn budget_and_shape_errors() {
        let p = KVParams::new(4, 1, 0.25).unwrap();
        let s = max_weight_strategy(p.code(), 1);
        let tight = ExactBudget { max_pairs: 1000 };
        assert!(matches!(exact_score_with_budget(&s, &s, &p, tight), Err(Error::Capacity(_))));
        let p2 = KVParams::new(4, 2, 0.25).unwrap();
        let s2 = max_weight_strategy(p2.code(), 2);
        assert!(matches!(exact_score(&s2, &s2, &p2), Err(Error::Capacity(_))));
        assert!(matches!(exact_score(&s, &s, &p2), Err(Error::Input(_))));
        let big = KVParams::new(5, 1, 0.25).unwrap();
        let sb = max_weight_strategy(big.code(), 1);
        assert!(matches!(exact_score(&sb, &sb, &big), Err(Error::Capacity(_))));
    }

    #[test]
    fn mc_single_sample_and_reproducibility() {
        let p = KVParams::new(2, 1, 0.25).unwrap();
        let s = max_weight_strategy(p.code(), 1);
        let seeds = SeedStream::new(17);
        let one = mc_score(&s, &s, &p, 1, &seeds).unwrap();
        assert!(one.value == 0.0 || one.value == 1.0);
        let a = mc_score(&s, &s, &p, 10_000, &seeds).unwrap();
        let b = mc_score(&s, &s, &p, 10_000, &seeds).unwrap();
        assert_eq!(a, b);
        assert!(mc_score(&s, &s, &p, 0, &seeds).is_err());
    }

    #[test]
    fn mc_agrees_with_exact() {
        let p = KVParams::new(2, 1, 0.25).unwrap();
        let s = max_weight_strategy(p.code(), 1);
        let exact = exact_score(&s, &s, &p).unwrap().value;
        let mc = mc_score(&s, &s, &p, 100_000, &SeedStream::new(2024)).unwrap();
        assert!((mc.value - exact).abs() <= 4.0 * mc.std_error);
    }

    #[test]
    fn n64_uses_log_weights_without_underflow() {
        // 64 * 3 = 192 bits exceeds the packing, but the weights themselves are fine.
        let p = KVParams::new(6, 3, 0.1).unwrap();
        let w = pair_weights(&p);
        assert!(w.iter().all(|x| x.is_finite() && *x >= 0.0));
        assert!(classical_bound(&p) > 0.0);
    }
}
