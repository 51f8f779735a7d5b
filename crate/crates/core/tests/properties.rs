use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gmnl::bitcode::{hadamard_code, max_weight_element, orbit_of, BitString};
use gmnl::games::{krep, local_bound_bruteforce, score, Behavior, BellGame};
use gmnl::kvgame::{classical_bound, exact_score, random_strategy, KVParams, KVStrategy};
use gmnl::netgraph::{cut_capacity, min_cut, min_cut_bruteforce, NetworkGraph};
use gmnl::quantum::{coupon_collector_prob, fidelity_phi_plus, random_state, twirl_pair};
use gmnl::SeedStream;

fn graph() -> impl Strategy<Value = NetworkGraph> {
    (2usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m).prop_filter_map("disconnected", move |keep| {
            let edges: Vec<_> = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e).collect();
            NetworkGraph::new(n, &edges).ok()
        })
    })
}

fn behavior(inputs: [usize; 2], outputs: [usize; 2]) -> impl Strategy<Value = Behavior> {
    let rows = inputs[0] * inputs[1];
    let cols = outputs[0] * outputs[1];
    proptest::collection::vec(proptest::collection::vec(0.01f64..1.0, cols), rows).prop_map(move |raw| {
        let table = raw
            .into_iter()
            .flat_map(|row| {
                let s: f64 = row.iter().sum();
                row.into_iter().map(move |v| v / s)
            })
            .collect();
        Behavior::new(&inputs, &outputs, table).unwrap()
    })
}

fn small_game() -> impl Strategy<Value = BellGame> {
    proptest::collection::vec(0u8..=4, 16).prop_map(|w| {
        let weights = w.into_iter().map(|v| f64::from(v) / 4.0).collect();
        BellGame::new([2, 2, 2, 2], weights, vec![0.25; 4]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbits_are_cosets(k in 2u32..=4, raw in any::<u64>()) {
        let code = hadamard_code(k).unwrap();
        let n = code.word_len();
        let x = BitString::new(n, raw & ((1u64 << n) - 1)).unwrap();
        let orbit = orbit_of(&x, &code).unwrap();
        prop_assert_eq!(orbit.len(), n as usize);
        prop_assert!(orbit.contains(&x));
        for h in code.codewords() {
            let y = x.xor(h).unwrap();
            prop_assert_eq!(code.canonical(&y).unwrap(), code.canonical(&x).unwrap());
        }
        let heavy = max_weight_element(&orbit);
        prop_assert!(orbit.elements().iter().all(|e| e.hamming_weight() <= heavy.hamming_weight()));
    }

    #[test]
    fn stoer_wagner_is_optimal(g in graph()) {
        let sw = min_cut(&g).unwrap();
        let bf = min_cut_bruteforce(&g).unwrap();
        prop_assert_eq!(sw.capacity, bf.capacity);
        prop_assert_eq!(cut_capacity(&g, &sw.subset).unwrap(), sw.capacity);
        prop_assert_eq!(cut_capacity(&g, &sw.complement(g.parties())).unwrap(), sw.capacity);
        prop_assert!(sw.capacity <= (0..g.parties()).map(|i| g.degree(i)).min().unwrap());
    }

    #[test]
    fn score_is_affine(p in 0.0f64..=1.0, b1 in behavior([2, 2], [2, 2]), b2 in behavior([2, 2], [2, 2]), g in small_game()) {
        let mix = Behavior::mixture(&[(p, b1.clone()), (1.0 - p, b2.clone())]).unwrap();
        let lhs = score(&g, &mix).unwrap();
        let rhs = p * score(&g, &b1).unwrap() + (1.0 - p) * score(&g, &b2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&lhs));
    }

    #[test]
    fn repetition_dominates_power(g in small_game()) {
        let one = local_bound_bruteforce(&g).unwrap();
        let two = local_bound_bruteforce(&krep(&g, 2).unwrap()).unwrap();
        prop_assert!(two.value >= one.value * one.value - 1e-12);
        prop_assert!(two.value <= one.value + 1e-12);
        if let (Some(a), Some(b)) = (one.exact, two.exact) {
            prop_assert!(b >= a * a);
        }
    }

    #[test]
    fn twirl_invariants(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(vec![d, d], &mut rng).unwrap();
        let t = twirl_pair(&rho, 0, 1).unwrap();
        prop_assert!((t.trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(t.min_eigenvalue() >= -1e-12);
        prop_assert!(twirl_pair(&t, 0, 1).unwrap().max_abs_diff(&t) <= 1e-12);
        let before = fidelity_phi_plus(&rho, 0, 1).unwrap();
        let after = fidelity_phi_plus(&t, 0, 1).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn coupon_probability_is_monotone(m in 1u64..=8, k in 0u64..=40) {
        let p = coupon_collector_prob(m, k);
        let q = coupon_collector_prob(m, k + 1);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(q >= p - 1e-15);
    }

    #[test]
    fn seed_streams_are_reproducible(root in any::<u64>(), counter in any::<u64>()) {
        use rand::RngCore;
        let s = SeedStream::new(root);
        prop_assert_eq!(s.rng("x", counter).next_u64(), s.rng("x", counter).next_u64());
        prop_assert_ne!(s.rng("x", counter).next_u64(), s.rng("y", counter).next_u64());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn product_strategies_multiply(seed in any::<u64>(), eta in 0.05f64..0.45) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = hadamard_code(2).unwrap();
        let a = random_strategy(&code, 2, &mut rng).unwrap();
        let b = random_strategy(&code, 2, &mut rng).unwrap();
        let slot = |s: &KVStrategy, i: usize| match s {
            KVStrategy::Product { code, slots } => KVStrategy::Product { code: code.clone(), slots: vec![slots[i].clone()] },
            KVStrategy::Joint { .. } => unreachable!(),
        };
        let p1 = KVParams::new(2, 1, eta).unwrap();
        let p2 = KVParams::new(2, 2, eta).unwrap();
        let joint = exact_score(&a, &b, &p2).unwrap().value;
        let s0 = exact_score(&slot(&a, 0), &slot(&b, 0), &p1).unwrap().value;
        let s1 = exact_score(&slot(&a, 1), &slot(&b, 1), &p1).unwrap().value;
        prop_assert!((joint - s0 * s1).abs() <= 1e-12);
        prop_assert!(joint <= classical_bound(&p2) + 1e-12);
        let b1 = classical_bound(&p1);
        prop_assert!((classical_bound(&p2) - b1 * b1).abs() <= 1e-15);
    }
}
