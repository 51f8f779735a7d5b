//! The L-fold parallel Khot-Vishnoi game.
//!
//! Alice receives `L` uniformly random words `x_1..x_L` of length `n = 2^k`,
//! Bob receives `y = x + z` where every bit of `z` is independently 1 with
//! probability `eta`. Each player must answer with an element of the
//! `H_n^L`-orbit of their input that depends on the input only through its
//! orbit; they win iff `a + b = z` in every slot.

mod quantum;
mod score;
mod strategy;

use std::fmt;

use rand::Rng;

use crate::bitcode::{BitString, HadamardCode};
use crate::error::{input, Result};

pub use quantum::{orbit_basis_vector, outcome_distribution, quantum_orbit_strategy_score, QuantumMethod, EXACT_INPUT_BITS};
pub use score::{exact_score, exact_score_with_budget, mc_score, ExactBudget, MC_CHUNK};
pub use strategy::{max_weight_strategy, random_joint_strategy, random_strategy, KVStrategy, SlotRule};

#[derive(Clone, Debug, PartialEq)]
pub struct KVParams {
    code: HadamardCode,
    repetitions: u32,
    eta: f64,
}

impl KVParams {
    pub fn new(k: u32, repetitions: u32, eta: f64) -> Result<Self> {
        if repetitions == 0 {
            return input("number of parallel repetitions must be positive");
        }
        if !(eta > 0.0 && eta < 0.5) {
            return input(format!("noise bias eta={eta} must lie strictly inside (0, 1/2)"));
        }
        Ok(Self { code: HadamardCode::new(k)?, repetitions, eta })
    }

    /// Uses the noise bias `eta = 1/2 - 1/log2(n)`, which is only inside the
    /// open interval for `n >= 8`.
    pub fn with_default_noise(k: u32, repetitions: u32) -> Result<Self> {
        let eta = default_eta(k);
        if eta <= 0.0 {
            return input(format!("default noise 1/2 - 1/log2(n) is {eta} for n={}; pass eta explicitly", 1u64 << k));
        }
        Self::new(k, repetitions, eta)
    }

    pub fn code(&self) -> &HadamardCode {
        &self.code
    }

    pub fn word_len(&self) -> u32 {
        self.code.word_len()
    }

    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Total number of input bits per player, `n * L`.
    pub fn input_bits(&self) -> u32 {
        self.word_len() * self.repetitions
    }
}

/// `1/2 - 1/log2(n)` for `n = 2^k`.
pub fn default_eta(k: u32) -> f64 {
    0.5 - 1.0 / f64::from(k)
}

/// One round of inputs: `y = x + z` slotwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub x: Vec<BitString>,
    pub y: Vec<BitString>,
    pub z: Vec<BitString>,
}

pub fn sample_round<R: Rng + ?Sized>(params: &KVParams, rng: &mut R) -> Round {
    let n = params.word_len();
    let l = params.repetitions as usize;
    let mut round = Round { x: Vec::with_capacity(l), y: Vec::with_capacity(l), z: Vec::with_capacity(l) };
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for _ in 0..l {
        let x = BitString::from_raw(n, rng.gen::<u64>() & mask);
        let mut z = 0u64;
        for _ in 0..n {
            z = (z << 1) | u64::from(rng.gen_bool(params.eta));
        }
        let z = BitString::from_raw(n, z);
        round.y.push(x.xor_unchecked(&z));
        round.x.push(x);
        round.z.push(z);
    }
    round
}

/// 1 iff `a + b = z` in every slot.
pub fn win(a: &[BitString], b: &[BitString], z: &[BitString]) -> Result<bool> {
    if a.len() != b.len() || a.len() != z.len() {
        return input(format!("slot count mismatch: {} / {} / {}", a.len(), b.len(), z.len()));
    }
    let mut all = true;
    for ((a, b), z) in a.iter().zip(b).zip(z) {
        all &= a.xor(b)? == *z;
    }
    Ok(all)
}

/// Hypercontractive upper bound on the classical winning probability,
/// `n^(-L * eta / (1 - eta))`.
pub fn classical_bound(params: &KVParams) -> f64 {
    let n = f64::from(params.word_len());
    let exponent = f64::from(params.repetitions) * params.eta / (1.0 - params.eta);
    n.powf(-exponent)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

/// A winning probability, exact (`std_error = 0`, `samples = 0`) or estimated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub method: Method,
}

impl ScoreEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, samples: 0, method: Method::Exact }
    }

    /// `value +- width * std_error`, clamped to `[0, 1]`. The flag reports
    /// whether clamping changed either end.
    pub fn interval(&self, width: f64) -> (f64, f64, bool) {
        let lo = self.value - width * self.std_error;
        let hi = self.value + width * self.std_error;
        let (clo, chi) = (lo.max(0.0), hi.min(1.0));
        (clo, chi, clo != lo || chi != hi)
    }

    pub const CSV_HEADER: &'static str = "value,std_error,samples,method";

    pub fn to_csv_row(&self) -> String {
        format!("{:.16e},{:.16e},{},{}", self.value, self.std_error, self.samples, self.method)
    }
}
