//! Exhaustive local bounds.
//!
//! Every deterministic strategy of the player with fewer of them is
//! enumerated; for each one the other player's best response is computed
//! input by input. This visits the same maximum as enumerating all strategy
//! pairs, at a cost of `min(|A|^|X|, |B|^|Y|) * |X| * |Y| * max(|A|, |B|)`.

use std::ops::Add;

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use super::{checked_mul, to_f64, BellGame, Rational, ENUMERATION_BUDGET};
use crate::error::{capacity, Result};

/// The maximum over deterministic strategies, with an optimal pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBound {
    pub value: f64,
    /// Present when the game carries exact tables.
    pub exact: Option<Rational>,
    /// `alice[x]` is Alice's answer to `x`.
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

pub fn local_bound_bruteforce(game: &BellGame) -> Result<LocalBound> {
    local_bound_with_budget(game, ENUMERATION_BUDGET)
}

/// `budget` limits the number of strategies enumerated on the smaller side.
pub fn local_bound_with_budget(game: &BellGame, budget: u128) -> Result<LocalBound> {
    let [nx, ny, na, nb] = game.sizes();
    let count_a = strategy_count(na, nx);
    let count_b = strategy_count(nb, ny);
    let smaller = count_a.unwrap_or(u128::MAX).min(count_b.unwrap_or(u128::MAX));
    if smaller > budget {
        return capacity(format!(
            "local bound needs {} deterministic strategies (|A|^|X| = {}, |B|^|Y| = {}); budget is {budget}",
            smaller,
            show(count_a),
            show(count_b)
        ));
    }
    if count_a.unwrap_or(u128::MAX) <= count_b.unwrap_or(u128::MAX) {
        enumerate_side(game, smaller as usize)
    } else {
        let t = enumerate_side(&game.transpose(), smaller as usize)?;
        Ok(LocalBound { value: t.value, exact: t.exact, alice: t.bob, bob: t.alice })
    }
}

fn show(c: Option<u128>) -> String {
    c.map_or_else(|| "overflow".into(), |v| v.to_string())
}

fn strategy_count(outputs: usize, inputs: usize) -> Option<u128> {
    (outputs as u128).checked_pow(u32::try_from(inputs).ok()?)
}

fn enumerate_side(game: &BellGame, count: usize) -> Result<LocalBound> {
    let [nx, ny, na, nb] = game.sizes();
    if let Some(table) = integer_table(game) {
        let (ints, denom) = table;
        let (best, idx) = search(&ints, [nx, ny, na, nb], count);
        let (alice, bob) = strategies(&ints, [nx, ny, na, nb], idx);
        let exact = Rational::new(best, denom);
        return Ok(LocalBound { value: to_f64(&exact), exact: Some(exact), alice, bob });
    }
    let mut t = vec![0.0; nx * ny * na * nb];
    for x in 0..nx {
        for y in 0..ny {
            for a in 0..na {
                for b in 0..nb {
                    t[game.index(a, b, x, y)] = game.prob(x, y) * game.weight(a, b, x, y);
                }
            }
        }
    }
    let (best, idx) = search(&t, [nx, ny, na, nb], count);
    let (alice, bob) = strategies(&t, [nx, ny, na, nb], idx);
    Ok(LocalBound { value: best, exact: None, alice, bob })
}

/// `p(x,y) G[a,b,x,y]` scaled by a common denominator, or `None` when the
/// game has no exact tables or the scaling overflows.
fn integer_table(game: &BellGame) -> Option<(Vec<u128>, u128)> {
    let [nx, ny, na, nb] = game.sizes();
    let mut terms = vec![Rational::zero(); nx * ny * na * nb];
    let mut denom = 1u128;
    for x in 0..nx {
        for y in 0..ny {
            let p = game.exact_prob(x, y)?;
            for a in 0..na {
                for b in 0..nb {
                    let v = checked_mul(&p, &game.exact_weight(a, b, x, y)?)?;
                    denom = denom.checked_mul(v.denom() / denom.gcd(v.denom()))?;
                    terms[game.index(a, b, x, y)] = v;
                }
            }
        }
    }
    let ints = terms.iter().map(|v| v.numer().checked_mul(denom / v.denom())).collect::<Option<Vec<_>>>()?;
    // Per-strategy sums have at most |X| * |Y| terms, each at most `denom`.
    denom.checked_mul((nx * ny) as u128)?;
    Some((ints, denom))
}

trait Score: Copy + PartialOrd + Add<Output = Self> + Zero + Send + Sync {}
impl<T: Copy + PartialOrd + Add<Output = T> + Zero + Send + Sync> Score for T {}

/// Value of Alice's strategy `a` against Bob's best response.
fn respond<T: Score>(t: &[T], [nx, ny, na, nb]: [usize; 4], a: &[usize], bob: Option<&mut Vec<usize>>) -> T {
    let mut total = T::zero();
    let mut choices = Vec::new();
    for y in 0..ny {
        let mut best = T::zero();
        let mut best_b = 0;
        for b in 0..nb {
            let mut s = T::zero();
            for (x, &ax) in a.iter().enumerate() {
                s = s + t[((x * ny + y) * na + ax) * nb + b];
            }
            if b == 0 || s > best {
                best = s;
                best_b = b;
            }
        }
        total = total + best;
        choices.push(best_b);
    }
    debug_assert_eq!(a.len(), nx);
    if let Some(out) = bob {
        *out = choices;
    }
    total
}

/// Strategy indices are read in base `|A|` with `x = 0` most significant.
fn decode(mut idx: usize, nx: usize, na: usize) -> Vec<usize> {
    let mut a = vec![0; nx];
    for x in (0..nx).rev() {
        a[x] = idx % na;
        idx /= na;
    }
    a
}

const CHUNK: usize = 1 << 12;

/// Maximum over all Alice strategies; ties go to the smallest index.
fn search<T: Score>(t: &[T], sizes: [usize; 4], count: usize) -> (T, usize) {
    let [nx, _, na, _] = sizes;
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(count);
            let mut a = decode(start, nx, na);
            let mut best = (respond(t, sizes, &a, None), start);
            for idx in start + 1..end {
                // Odometer increment, last input fastest.
                for x in (0..nx).rev() {
                    a[x] += 1;
                    if a[x] < na {
                        break;
                    }
                    a[x] = 0;
                }
                let v = respond(t, sizes, &a, None);
                if v > best.0 {
                    best = (v, idx);
                }
            }
            best
        })
        .reduce_with(|p, q| if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p })
        .expect("at least one strategy")
}

fn strategies<T: Score>(t: &[T], sizes: [usize; 4], idx: usize) -> (Vec<usize>, Vec<usize>) {
    let alice = decode(idx, sizes[0], sizes[2]);
    let mut bob = Vec::new();
    respond(t, sizes, &alice, Some(&mut bob));
    (alice, bob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::games::{chsh, krep, score, trivial_game, Behavior};

    #[test]
    fn chsh_bounds_are_exact() {
        let b1 = local_bound_bruteforce(&chsh()).unwrap();
        assert_eq!(b1.exact, Some(Rational::new(3, 4)));
        assert_eq!(b1.value, 0.75);
        let b2 = local_bound_bruteforce(&krep(&chsh(), 2).unwrap()).unwrap();
        assert_eq!(b2.exact, Some(Rational::new(5, 8)));
    }

    #[test]
    fn optimal_pair_attains_the_bound() {
        let g = krep(&chsh(), 2).unwrap();
        let lb = local_bound_bruteforce(&g).unwrap();
        let beh = Behavior::local_deterministic(&[4, 4], &[4, 4], &[lb.alice.clone(), lb.bob.clone()]).unwrap();
        assert!((score(&g, &beh).unwrap() - lb.value).abs() < 1e-15);
    }

    #[test]
    fn float_path_and_transpose() {
        // Alice has 3^3 strategies, Bob 2^1: Bob's side is enumerated.
        let mut w = vec![0.0; 3 * 3 * 2];
        for x in 0..3 {
            for a in 0..3 {
                w[(x * 3 + a) * 2 + (a + x) % 2] = 0.3;
            }
        }
        let g = BellGame::new([3, 1, 3, 2], w, vec![0.2, 0.3, 0.5]).unwrap();
        let lb = local_bound_bruteforce(&g).unwrap();
        assert!(lb.exact.is_none());
        assert!((lb.value - 0.3).abs() < 1e-15);
        assert_eq!(lb.alice.len(), 3);
        assert_eq!(lb.bob.len(), 1);
    }

    #[test]
    fn trivial_and_budget() {
        assert_eq!(local_bound_bruteforce(&trivial_game([3, 2, 2, 3]).unwrap()).unwrap().exact, Some(Rational::new(1, 1)));
        let g = krep(&chsh(), 2).unwrap();
        assert!(matches!(local_bound_with_budget(&g, 255), Err(Error::Capacity(_))));
        assert!(local_bound_with_budget(&g, 256).is_ok());
    }
}
