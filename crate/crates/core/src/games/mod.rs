//! Bipartite Bell games, their k-repetitions and network extensions.
//!
//! A [`BellGame`] stores the winning weights `G[a,b,x,y]` and the input
//! distribution `p(x,y)` in floating point, plus an exact rational copy when
//! every entry is representable (dyadic doubles, or rationals read from CSV).
//! The exact copy is what lets brute-force bounds such as 3/4 and 5/8 come out
//! exactly.

mod behavior;
mod bruteforce;
mod csv;
mod network;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{capacity, input, Error, Result};

pub use behavior::Behavior;
pub use bruteforce::{local_bound_bruteforce, local_bound_with_budget, LocalBound};
pub use csv::parse_number;
pub use network::{
    biseparable_bound_bruteforce, network_game, network_score, theorem1_certify, BiseparableBound, NetworkGame,
    Slot, Theorem1Verdict, Threshold, MAX_NETWORK_PARTIES,
};

/// Exact rational used for game tables.
pub type Rational = Ratio<u128>;

/// Default limit on enumerated deterministic strategies and on table sizes.
pub const ENUMERATION_BUDGET: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub struct BellGame {
    nx: usize,
    ny: usize,
    na: usize,
    nb: usize,
    /// Indexed by [`BellGame::index`].
    weights: Vec<f64>,
    /// Indexed by `x * ny + y`.
    probs: Vec<f64>,
    exact: Option<ExactTables>,
}

#[derive(Clone, Debug, PartialEq)]
struct ExactTables {
    weights: Vec<Rational>,
    probs: Vec<Rational>,
}

impl BellGame {
    /// Builds a game from floating-point tables. Entries that are exact
    /// dyadic fractions also populate the exact tables.
    pub fn new(sizes: [usize; 4], weights: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let exact = match (
            weights.iter().map(|&w| dyadic(w)).collect::<Option<Vec<_>>>(),
            probs.iter().map(|&p| dyadic(p)).collect::<Option<Vec<_>>>(),
        ) {
            (Some(w), Some(p)) => Some(ExactTables { weights: w, probs: p }),
            _ => None,
        };
        Self::build(sizes, weights, probs, exact)
    }

    pub fn new_exact(sizes: [usize; 4], weights: Vec<Rational>, probs: Vec<Rational>) -> Result<Self> {
        let wf = weights.iter().map(to_f64).collect();
        let pf = probs.iter().map(to_f64).collect();
        Self::build(sizes, wf, pf, Some(ExactTables { weights, probs }))
    }

    fn build(sizes: [usize; 4], weights: Vec<f64>, probs: Vec<f64>, exact: Option<ExactTables>) -> Result<Self> {
        let [nx, ny, na, nb] = sizes;
        if sizes.contains(&0) {
            return input(format!("alphabet sizes must be positive, got {sizes:?}"));
        }
        let table = checked_product(&[nx, ny, na, nb])?;
        if weights.len() != table {
            return input(format!("weight table has {} entries, expected {table}", weights.len()));
        }
        if probs.len() != nx * ny {
            return input(format!("input distribution has {} entries, expected {}", probs.len(), nx * ny));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return input(format!("weight {w} outside [0, 1]"));
        }
        if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return input(format!("negative or NaN input probability {p}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("input distribution sums to {total}, not 1"));
        }
        // A rational copy that does not sum to exactly one is dropped rather than trusted.
        let exact = exact.filter(|e| e.probs.iter().fold(Rational::zero(), |acc, p| acc + p) == Rational::one());
        Ok(Self { nx, ny, na, nb, weights, probs, exact })
    }

    /// `[|X|, |Y|, |A|, |B|]`.
    pub fn sizes(&self) -> [usize; 4] {
        [self.nx, self.ny, self.na, self.nb]
    }

    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.ny + y) * self.na + a) * self.nb + b
    }

    pub fn weight(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.weights[self.index(a, b, x, y)]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny + y]
    }

    pub fn exact_weight(&self, a: usize, b: usize, x: usize, y: usize) -> Option<Rational> {
        self.exact.as_ref().map(|e| e.weights[self.index(a, b, x, y)])
    }

    pub fn exact_prob(&self, x: usize, y: usize) -> Option<Rational> {
        self.exact.as_ref().map(|e| e.probs[x * self.ny + y])
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Same alphabets on both sides, `G[a,b,x,y] = G[b,a,y,x]` and `p(x,y) = p(y,x)`.
    pub fn is_symmetric(&self) -> bool {
        if self.nx != self.ny || self.na != self.nb {
            return false;
        }
        let close = |u: f64, v: f64| (u - v).abs() <= 1e-12;
        for x in 0..self.nx {
            for y in 0..self.ny {
                if !close(self.prob(x, y), self.prob(y, x)) {
                    return false;
                }
                for a in 0..self.na {
                    for b in 0..self.nb {
                        if !close(self.weight(a, b, x, y), self.weight(b, a, y, x)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The game with the roles of the two players exchanged.
    pub fn transpose(&self) -> Self {
        let [nx, ny, na, nb] = self.sizes();
        let mut weights = vec![0.0; self.weights.len()];
        let mut probs = vec![0.0; self.probs.len()];
        let mut ew = self.exact.as_ref().map(|_| vec![Rational::zero(); self.weights.len()]);
        let mut ep = self.exact.as_ref().map(|_| vec![Rational::zero(); self.probs.len()]);
        for x in 0..nx {
            for y in 0..ny {
                probs[y * nx + x] = self.prob(x, y);
                if let (Some(ep), Some(e)) = (ep.as_mut(), self.exact.as_ref()) {
                    ep[y * nx + x] = e.probs[x * ny + y];
                }
                for a in 0..na {
                    for b in 0..nb {
                        let to = ((y * nx + x) * nb + b) * na + a;
                        let from = self.index(a, b, x, y);
                        weights[to] = self.weights[from];
                        if let (Some(ew), Some(e)) = (ew.as_mut(), self.exact.as_ref()) {
                            ew[to] = e.weights[from];
                        }
                    }
                }
            }
        }
        let exact = ew.zip(ep).map(|(weights, probs)| ExactTables { weights, probs });
        Self { nx: ny, ny: nx, na: nb, nb: na, weights, probs, exact }
    }
}

/// CHSH: binary alphabets, uniform inputs, win iff `a + b = x * y (mod 2)`.
pub fn chsh() -> BellGame {
    let mut weights = vec![0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    weights[((x * 2 + y) * 2 + a) * 2 + b] = f64::from(u8::from((a ^ b) == (x & y)));
                }
            }
        }
    }
    BellGame::new([2, 2, 2, 2], weights, vec![0.25; 4]).expect("CHSH tables are valid")
}

/// The game with every weight equal to one.
pub fn trivial_game(sizes: [usize; 4]) -> Result<BellGame> {
    let [nx, ny, ..] = sizes;
    let table = checked_product(&sizes)?;
    let probs = vec![Rational::new(1, (nx * ny) as u128); nx * ny];
    BellGame::new_exact(sizes, vec![Rational::one(); table], probs)
}

/// `k` independent copies played in parallel. Tuples are indexed in mixed
/// radix with the first copy as the most significant digit.
pub fn krep(game: &BellGame, k: u32) -> Result<BellGame> {
    if k == 0 {
        return input("repetition count must be positive");
    }
    let [nx, ny, na, nb] = game.sizes();
    let pow = |b: usize| -> Result<usize> {
        b.checked_pow(k).ok_or_else(|| Error::Capacity(format!("alphabet size {b}^{k} overflows")))
    };
    let sizes = [pow(nx)?, pow(ny)?, pow(na)?, pow(nb)?];
    let table = checked_product(&sizes)?;
    if table as u128 > ENUMERATION_BUDGET {
        return capacity(format!("{k}-repetition table has {table} entries; budget is {ENUMERATION_BUDGET}"));
    }
    let k = k as usize;
    let [kx, ky, ka, kb] = sizes;
    let digits = |v: usize, base: usize| -> Vec<usize> { mixed_digits(v, &vec![base; k]) };
    let dx: Vec<_> = (0..kx).map(|v| digits(v, nx)).collect();
    let dy: Vec<_> = (0..ky).map(|v| digits(v, ny)).collect();
    let da: Vec<_> = (0..ka).map(|v| digits(v, na)).collect();
    let db: Vec<_> = (0..kb).map(|v| digits(v, nb)).collect();

    let mut weights = vec![0.0; table];
    let mut probs = vec![0.0; kx * ky];
    let mut exact = game.exact.as_ref().map(|_| (vec![Rational::zero(); table], vec![Rational::zero(); kx * ky]));
    let mut overflow = false;
    for x in 0..kx {
        for y in 0..ky {
            let pi = x * ky + y;
            probs[pi] = (0..k).map(|i| game.prob(dx[x][i], dy[y][i])).product();
            if let Some((_, ep)) = exact.as_mut() {
                match checked_prod((0..k).map(|i| game.exact_prob(dx[x][i], dy[y][i]).unwrap())) {
                    Some(v) => ep[pi] = v,
                    None => overflow = true,
                }
            }
            for a in 0..ka {
                for b in 0..kb {
                    let wi = ((x * ky + y) * ka + a) * kb + b;
                    weights[wi] = (0..k).map(|i| game.weight(da[a][i], db[b][i], dx[x][i], dy[y][i])).product();
                    if let Some((ew, _)) = exact.as_mut() {
                        let terms = (0..k).map(|i| game.exact_weight(da[a][i], db[b][i], dx[x][i], dy[y][i]).unwrap());
                        match checked_prod(terms) {
                            Some(v) => ew[wi] = v,
                            None => overflow = true,
                        }
                    }
                }
            }
        }
    }
    let exact = if overflow { None } else { exact.map(|(weights, probs)| ExactTables { weights, probs }) };
    BellGame::build(sizes, weights, probs, exact)
}

/// Bipartite score `S = sum G[a,b,x,y] P(a,b|x,y) p(x,y)`.
pub fn score(game: &BellGame, behavior: &Behavior) -> Result<f64> {
    let [nx, ny, na, nb] = game.sizes();
    if behavior.inputs() != [nx, ny] || behavior.outputs() != [na, nb] {
        return input(format!(
            "behavior alphabets inputs={:?} outputs={:?} do not match game {:?}",
            behavior.inputs(),
            behavior.outputs(),
            game.sizes()
        ));
    }
    let mut s = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let p = game.prob(x, y);
            if p == 0.0 {
                continue;
            }
            let row = behavior.row(x * ny + y);
            let mut inner = 0.0;
            for a in 0..na {
                for b in 0..nb {
                    inner += game.weight(a, b, x, y) * row[a * nb + b];
                }
            }
            s += p * inner;
        }
    }
    Ok(s)
}

/// Digits of `v` in the mixed radix `radix`, most significant first.
pub(crate) fn mixed_digits(mut v: usize, radix: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radix.len()];
    for i in (0..radix.len()).rev() {
        out[i] = v % radix[i];
        v /= radix[i];
    }
    out
}

pub(crate) fn mixed_index(digits: &[usize], radix: &[usize]) -> usize {
    digits.iter().zip(radix).fold(0, |acc, (&d, &r)| acc * r + d)
}

pub(crate) fn checked_product(xs: &[usize]) -> Result<usize> {
    xs.iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or_else(|| Error::Capacity(format!("table of shape {xs:?} overflows")))
}

fn checked_prod(mut it: impl Iterator<Item = Rational>) -> Option<Rational> {
    it.try_fold(Rational::one(), |acc, v| checked_mul(&acc, &v))
}

pub(crate) fn checked_mul(a: &Rational, b: &Rational) -> Option<Rational> {
    use num_integer::Integer;
    if a.is_zero() || b.is_zero() {
        return Some(Rational::zero());
    }
    // Cross-cancel before multiplying to keep the numbers small.
    let g1 = a.numer().gcd(b.denom());
    let g2 = b.numer().gcd(a.denom());
    let n = (a.numer() / g1).checked_mul(b.numer() / g2)?;
    let d = (a.denom() / g2).checked_mul(b.denom() / g1)?;
    Some(Rational::new(n, d))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The exact value of a double in `[0, 1]` when it is a short dyadic fraction
/// (denominator at most `2^24`); longer expansions such as `0.1` stay inexact.
pub(crate) fn dyadic(v: f64) -> Option<Rational> {
    if !(0.0..=1.0).contains(&v) {
        return None;
    }
    let mut scaled = v;
    for shift in 0..=24u32 {
        if scaled.fract() == 0.0 {
            return Some(Rational::new(scaled as u128, 1u128 << shift));
        }
        scaled *= 2.0;
    }
    None
}
