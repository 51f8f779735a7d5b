//! The orbit-basis quantum strategy.
//!
//! An orbit element `u` (an `L`-tuple of words) maps to the real unit vector
//! `v_u = (x)_s [(-1)^{u_s,i} / sqrt(n)]_i` of dimension `n^L`. Distinct
//! elements of one orbit differ by a nonzero codeword of weight `n/2`, so the
//! `n^L` vectors of an orbit form an orthonormal basis. Both players share the
//! maximally entangled state of local dimension `n^L`, measure in the basis of
//! their input orbit and output the element they observe.

use rayon::prelude::*;

use super::{sample_round, KVParams, Method, ScoreEstimate, MC_CHUNK};
use crate::bitcode::{BitString, HadamardCode};
use crate::error::{capacity, input, Result};
use crate::seed::SeedStream;

use super::strategy::product;

/// Input-bit limit `n * L` for exhaustive `(x, z)` enumeration.
pub const EXACT_INPUT_BITS: u32 = 8;

/// Largest local dimension `n^L` for which basis vectors are built.
const MAX_LOCAL_DIM: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumMethod {
    Exact,
    MonteCarlo { samples: u64, seeds: SeedStream },
}

/// Basis vector of the orbit element `u`, slot 0 as the most significant factor.
pub fn orbit_basis_vector(u: &[BitString]) -> Result<Vec<f64>> {
    let dim = local_dim(u)?;
    let mut v = vec![1.0f64];
    for w in u {
        let n = w.len();
        let s = 1.0 / f64::from(n).sqrt();
        let mut next = Vec::with_capacity(v.len() * n as usize);
        for &c in &v {
            for i in 0..n {
                next.push(if w.coord(i) { -c * s } else { c * s });
            }
        }
        v = next;
    }
    debug_assert_eq!(v.len(), dim);
    Ok(v)
}

fn local_dim(u: &[BitString]) -> Result<usize> {
    if u.is_empty() {
        return input("orbit element must have at least one slot");
    }
    let mut dim = 1usize;
    for w in u {
        dim = dim.saturating_mul(w.len() as usize);
    }
    if dim > MAX_LOCAL_DIM {
        return capacity(format!("local dimension {dim} exceeds {MAX_LOCAL_DIM}"));
    }
    Ok(dim)
}

/// Born amplitude `<v_a (x) v_b | Phi+>` for the maximally entangled state of
/// local dimension `dim`.
fn amplitude(va: &[f64], vb: &[f64]) -> f64 {
    let dim = va.len() as f64;
    va.iter().zip(vb).map(|(p, q)| p * q).sum::<f64>() / dim.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub a: Vec<BitString>,
    pub b: Vec<BitString>,
    pub probability: f64,
}

/// Joint distribution of `(a, b)` when Alice measures in the orbit basis of
/// `x` and Bob in that of `y`.
pub fn outcome_distribution(code: &HadamardCode, x: &[BitString], y: &[BitString]) -> Result<Vec<Outcome>> {
    if x.len() != y.len() {
        return input(format!("slot count mismatch: {} vs {}", x.len(), y.len()));
    }
    let orbit_a = joint_orbit(code, x)?;
    let orbit_b = joint_orbit(code, y)?;
    let vb: Vec<Vec<f64>> = orbit_b.iter().map(|b| orbit_basis_vector(b)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(orbit_a.len() * orbit_b.len());
    for a in orbit_a {
        let va = orbit_basis_vector(&a)?;
        for (b, vb) in orbit_b.iter().zip(&vb) {
            let amp = amplitude(&va, vb);
            out.push(Outcome { a: a.clone(), b: b.clone(), probability: amp * amp });
        }
    }
    Ok(out)
}

fn joint_orbit(code: &HadamardCode, x: &[BitString]) -> Result<Vec<Vec<BitString>>> {
    let per_slot = x
        .iter()
        .map(|w| crate::bitcode::orbit_of(w, code).map(|o| o.elements().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(product(&per_slot))
}

/// Probability that `a + b = z` given inputs `x` and `y = x + z`: the sum of
/// the Born probabilities of the pairs `(x + h, y + h)`.
fn conditional_win(shifts: &[Vec<BitString>], x: &[BitString], y: &[BitString]) -> Result<f64> {
    let mut total = 0.0;
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    for h in shifts {
        for s in 0..x.len() {
            a[s] = x[s].xor_unchecked(&h[s]);
            b[s] = y[s].xor_unchecked(&h[s]);
        }
        let amp = amplitude(&orbit_basis_vector(&a)?, &orbit_basis_vector(&b)?);
        total += amp * amp;
    }
    Ok(total)
}

/// Winning probability of the orbit-basis strategy on the maximally entangled state.
pub fn quantum_orbit_strategy_score(params: &KVParams, method: QuantumMethod) -> Result<ScoreEstimate> {
    let code = params.code();
    let n = params.word_len();
    let l = params.repetitions() as usize;
    let shifts = product(&vec![code.codewords().to_vec(); l]);
    local_dim(&vec![BitString::from_raw(n, 0); l])?;
    match method {
        QuantumMethod::Exact => {
            let bits = params.input_bits();
            if bits > EXACT_INPUT_BITS {
                return capacity(format!(
                    "exact quantum score enumerates 2^{} inputs; limit is n*L <= {EXACT_INPUT_BITS}",
                    2 * bits
                ));
            }
            let eta = params.eta();
            let slot_mask = (1u64 << n) - 1;
            let split = |v: u64| -> Vec<BitString> {
                (0..l).map(|s| BitString::from_raw(n, (v >> (n as usize * (l - 1 - s))) & slot_mask)).collect()
            };
            let count = 1u64 << bits;
            let norm = 1.0 / count as f64;
            let value = (0..count)
                .into_par_iter()
                .map(|xv| -> Result<f64> {
                    let x = split(xv);
                    let mut acc = 0.0;
                    for zv in 0..count {
                        let z = split(zv);
                        let d = zv.count_ones() as i32;
                        let weight = eta.powi(d) * (1.0 - eta).powi(bits as i32 - d);
                        let y: Vec<BitString> = x.iter().zip(&z).map(|(p, q)| p.xor_unchecked(q)).collect();
                        acc += weight * conditional_win(&shifts, &x, &y)?;
                    }
                    Ok(acc * norm)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum();
            Ok(ScoreEstimate::exact(value))
        }
        QuantumMethod::MonteCarlo { samples, seeds } => {
            if samples == 0 {
                return input("Monte Carlo needs at least one sample");
            }
            let chunks = samples.div_ceil(MC_CHUNK);
            let sums = (0..chunks)
                .into_par_iter()
                .map(|c| -> Result<(f64, f64)> {
                    let mut rng = seeds.rng("kv-quantum", c);
                    let count = MC_CHUNK.min(samples - c * MC_CHUNK);
                    let (mut s1, mut s2) = (0.0, 0.0);
                    for _ in 0..count {
                        let r = sample_round(params, &mut rng);
                        let p = conditional_win(&shifts, &r.x, &r.y)?;
                        s1 += p;
                        s2 += p * p;
                    }
                    Ok((s1, s2))
                })
                .collect::<Result<Vec<_>>>()?;
            let (s1, s2) = sums.into_iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
            let m = samples as f64;
            let mean = s1 / m;
            let var = if samples > 1 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
            Ok(ScoreEstimate { value: mean, std_error: (var / m).sqrt(), samples, method: Method::MonteCarlo })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcode::{hadamard_code, orbit_of};
    use crate::error::Error;

    fn w(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn orbit_vectors_are_orthonormal() {
        for k in 2..=4 {
            let code = hadamard_code(k).unwrap();
            let x = BitString::from_raw(code.word_len(), 0b1011 % (1 << code.word_len()));
            let orbit = orbit_of(&x, &code).unwrap();
            let vs: Vec<_> = orbit.elements().iter().map(|u| orbit_basis_vector(&[*u]).unwrap()).collect();
            for (i, vi) in vs.iter().enumerate() {
                for (j, vj) in vs.iter().enumerate() {
                    let g: f64 = vi.iter().zip(vj).map(|(a, b)| a * b).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn outcome_distribution_normalizes() {
        let code = hadamard_code(2).unwrap();
        let dist = outcome_distribution(&code, &[w("1000"), w("0110")], &[w("1010"), w("0111")]).unwrap();
        assert_eq!(dist.len(), 256);
        let total: f64 = dist.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn n4_exact_score_matches_frozen_oracle() {
        // 0.4375 = E_z[(1 - 2|z|/4)^2] at eta = 1/4, from a separate Born-rule enumeration.
        let p = KVParams::new(2, 1, 0.25).unwrap();
        let q = quantum_orbit_strategy_score(&p, QuantumMethod::Exact).unwrap();
        assert!((q.value - 0.4375).abs() < 1e-12);
    }

    #[test]
    fn limits() {
        let p = KVParams::new(4, 1, 0.25).unwrap();
        assert!(matches!(quantum_orbit_strategy_score(&p, QuantumMethod::Exact), Err(Error::Capacity(_))));
        let mc = quantum_orbit_strategy_score(&p, QuantumMethod::MonteCarlo { samples: 2000, seeds: SeedStream::new(1) })
            .unwrap();
        assert!(mc.value > 0.0 && mc.value < 1.0);
    }
}
