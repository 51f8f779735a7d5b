//! Library results against naive, independently written computations and
//! frozen reference values.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gmnl::bitcode::{hadamard_code, BitString};
use gmnl::games::{chsh, krep, local_bound_bruteforce, Rational};
use gmnl::kvgame::{
    classical_bound, exact_score, max_weight_strategy, quantum_orbit_strategy_score, random_strategy, KVParams,
    KVStrategy, QuantumMethod,
};
use gmnl::quantum::{entanglement_fraction_magic, random_state, DensityOperator, Matrix};
use gmnl::verify::oracle;

/// Sums over every input word and noise pattern directly.
fn naive_kv(a: &KVStrategy, b: &KVStrategy, n: u32, eta: f64) -> f64 {
    let mut total = 0.0;
    for x in 0..1u64 << n {
        for z in 0..1u64 << n {
            let w = z.count_ones() as i32;
            let pz = eta.powi(w) * (1.0 - eta).powi(n as i32 - w);
            let xs = BitString::new(n, x).unwrap();
            let ys = BitString::new(n, x ^ z).unwrap();
            let ax = a.respond(&[xs]).unwrap()[0].bits();
            let by = b.respond(&[ys]).unwrap()[0].bits();
            if ax ^ by == z {
                total += pz;
            }
        }
    }
    total / (1u64 << n) as f64
}

#[test]
fn kv_max_weight_matches_frozen_values() {
    for &(k, eta, want) in &oracle::KV_MAXWEIGHT {
        let p = KVParams::new(k, 1, eta).unwrap();
        let s = max_weight_strategy(p.code(), 1);
        assert_abs_diff_eq!(exact_score(&s, &s, &p).unwrap().value, want, epsilon = 1e-12);
        assert_abs_diff_eq!(naive_kv(&s, &s, 1 << k, eta), want, epsilon = 1e-12);
    }
}

#[test]
fn kv_random_strategies_match_naive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [2u32, 3] {
        let code = hadamard_code(k).unwrap();
        for _ in 0..4 {
            let a = random_strategy(&code, 1, &mut rng).unwrap();
            let b = random_strategy(&code, 1, &mut rng).unwrap();
            for eta in [0.1, 0.3] {
                let p = KVParams::new(k, 1, eta).unwrap();
                let got = exact_score(&a, &b, &p).unwrap().value;
                assert_abs_diff_eq!(got, naive_kv(&a, &b, 1 << k, eta), epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn classical_bound_values() {
    let b = |k, l, eta| classical_bound(&KVParams::new(k, l, eta).unwrap());
    assert_abs_diff_eq!(b(4, 1, 0.25), 0.396_850_262_992_049_9, epsilon = 1e-15);
    assert_abs_diff_eq!(b(4, 2, 0.25), 0.157_490_131_236_859_15, epsilon = 1e-15);
    assert_abs_diff_eq!(b(1, 1, 0.4), 0.629_960_524_947_436_6, epsilon = 1e-15);
}

#[test]
fn quantum_strategy_frozen_value() {
    let p = KVParams::new(2, 1, 0.25).unwrap();
    let q = quantum_orbit_strategy_score(&p, QuantumMethod::Exact).unwrap();
    assert_abs_diff_eq!(q.value, oracle::KV_N4_QUANTUM_ETA_QUARTER, epsilon = 1e-12);
}

#[test]
fn chsh_by_hand() {
    // All 16 deterministic strategies, written out without the game tables.
    let mut best = 0;
    for alice in 0..4usize {
        for bob in 0..4usize {
            let wins = (0..4usize)
                .filter(|&xy| {
                    let (x, y) = (xy >> 1, xy & 1);
                    let a = (alice >> x) & 1;
                    let b = (bob >> y) & 1;
                    a ^ b == x & y
                })
                .count();
            best = best.max(wins);
        }
    }
    assert_eq!(best, 3);
    assert_eq!(local_bound_bruteforce(&chsh()).unwrap().exact, Some(Rational::new(best as u128, 4)));
    assert_eq!(local_bound_bruteforce(&krep(&chsh(), 2).unwrap()).unwrap().exact, Some(Rational::new(5, 8)));
}

fn su2(alpha: f64, beta: f64, gamma: f64) -> Matrix {
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let (c, s) = (beta.cos(), beta.sin());
    Matrix::from_row_slice(
        2,
        2,
        &[e(alpha + gamma) * c, -e(alpha - gamma) * s, e(gamma - alpha) * s, e(-alpha - gamma) * c],
    )
}

/// `<Phi+| (1 x U) rho (1 x U^dag) |Phi+>` maximised by grid search plus
/// compass refinement over Euler angles.
fn fraction_by_search(rho: &DensityOperator) -> f64 {
    let phi = [1.0, 0.0, 0.0, 1.0].map(|v| Complex64::new(v / 2f64.sqrt(), 0.0));
    let value = |t: [f64; 3]| {
        let full = Matrix::identity(2, 2).kronecker(&su2(t[0], t[1], t[2]));
        let m = &full.adjoint() * rho.matrix() * &full;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                s += phi[i] * m[(i, j)] * phi[j];
            }
        }
        s.re
    };
    let steps = 12;
    let grid = |i: usize| std::f64::consts::PI * i as f64 / steps as f64;
    let mut best = ([0.0; 3], f64::MIN);
    for i in 0..2 * steps {
        for j in 0..steps {
            for l in 0..2 * steps {
                let t = [grid(i), grid(j), grid(l)];
                let v = value(t);
                if v > best.1 {
                    best = (t, v);
                }
            }
        }
    }
    let mut h = 0.2;
    while h > 1e-10 {
        let mut moved = false;
        for d in 0..3 {
            for sign in [1.0, -1.0] {
                let mut t = best.0;
                t[d] += sign * h;
                let v = value(t);
                if v > best.1 {
                    best = (t, v);
                    moved = true;
                }
            }
        }
        if !moved {
            h /= 2.0;
        }
    }
    best.1
}

#[test]
fn magic_basis_fraction_matches_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let rho = random_state(vec![2, 2], &mut rng).unwrap();
        let closed = entanglement_fraction_magic(&rho).unwrap();
        assert_abs_diff_eq!(closed, fraction_by_search(&rho), epsilon = 1e-7);
    }
}
