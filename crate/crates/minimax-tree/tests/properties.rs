//! Cross-module property tests: algebraic invariances of the builders,
//! exact agreement between independent implementations, and structural
//! guarantees of the emitted codes and plans.

use minimax_tree::coding::{
    group_test_plan, huffman_code, minimax_code, redundancy_report, shannon_code, Distribution,
};
use minimax_tree::integer::{
    build_minimax_heap, build_minimax_int, build_minimax_sorted_instrumented, clamp_weights,
};
use minimax_tree::kraft::{check_kraft_depths, tree_from_sorted_depths, FixedPointFraction};
use minimax_tree::real::build_minimax_real;
use minimax_tree::select::select_nth_by;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn weights_i64() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-60i64..=60, 1..40)
}

fn weights_f64() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..0.0, 1..24)
}

fn positive_dist() -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.02f64..1.0, 2..24).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
        Distribution::from_probs(&probs).unwrap()
    })
}

/// Kraft-tight depth profile grown by random leaf splits, optionally with
/// one leaf removed so strict inequality (and unary padding) is exercised.
fn depth_profile() -> impl Strategy<Value = Vec<u32>> {
    (1usize..24, any::<u64>(), prop::bool::ANY).prop_map(|(splits, seed, drop_one)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut depths = vec![0u32];
        for _ in 0..splits {
            let at = rng.gen_range(0..depths.len());
            let d = depths.swap_remove(at);
            depths.push(d + 1);
            depths.push(d + 1);
        }
        if drop_one && depths.len() > 1 {
            let at = rng.gen_range(0..depths.len());
            depths.swap_remove(at);
        }
        depths.sort_unstable();
        depths
    })
}

proptest! {
    #[test]
    fn int_cost_is_permutation_invariant(ws in weights_i64(), seed in any::<u64>()) {
        let base = build_minimax_int(&ws).unwrap().cost();
        let mut shuffled = ws.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(build_minimax_int(&shuffled).unwrap().cost(), base);
    }

    #[test]
    fn int_cost_translates_additively(ws in weights_i64(), shift in -1000i64..=1000) {
        let base = build_minimax_int(&ws).unwrap().cost();
        let moved: Vec<i64> = ws.iter().map(|w| w + shift).collect();
        prop_assert_eq!(build_minimax_int(&moved).unwrap().cost(), base + shift);
    }

    #[test]
    fn int_cost_is_monotone_in_each_weight(ws in weights_i64(), pick in any::<prop::sample::Index>(), bump in 0i64..=40) {
        let base = build_minimax_int(&ws).unwrap().cost();
        let mut larger = ws.clone();
        let at = pick.index(larger.len());
        larger[at] += bump;
        prop_assert!(build_minimax_int(&larger).unwrap().cost() >= base);
    }

    #[test]
    fn linear_and_heap_builders_agree(ws in weights_i64()) {
        let linear = build_minimax_int(&ws).unwrap();
        let heap = build_minimax_heap(&ws).unwrap();
        prop_assert_eq!(linear.cost(), heap.cost());
        prop_assert!(linear.validate(&ws).is_empty());
        prop_assert!(heap.validate(&ws).is_empty());
    }

    #[test]
    fn clamping_preserves_the_optimum(ws in weights_i64()) {
        let clamped = clamp_weights(&ws).unwrap();
        let before = build_minimax_heap(&ws).unwrap().cost();
        let after = build_minimax_heap(clamped.clamped()).unwrap().cost();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn real_builder_matches_int_on_integer_weights(ws in prop::collection::vec(-40i64..=0, 1..24)) {
        let exact = build_minimax_int(&ws).unwrap().cost();
        let reals: Vec<f64> = ws.iter().map(|&w| w as f64).collect();
        let approx = build_minimax_real(&reals).unwrap().cost();
        prop_assert!((approx - exact as f64).abs() <= 1e-9, "{approx} vs {exact}");
    }

    #[test]
    fn real_tree_validates_and_dominates_no_profile(ws in weights_f64()) {
        let tree = build_minimax_real(&ws).unwrap();
        prop_assert!(tree.validate(&ws).is_empty());
    }

    #[test]
    fn sorted_merge_stays_within_pointer_budget(mut ws in weights_i64()) {
        ws.sort_unstable();
        let n = ws.len();
        let (_, stats) = build_minimax_sorted_instrumented(&ws).unwrap();
        prop_assert_eq!(stats.insertions, n.saturating_sub(1) as u64);
        prop_assert!(stats.advances <= (2 * n).saturating_sub(1) as u64);
    }

    #[test]
    fn depth_profiles_round_trip_through_trees(depths in depth_profile()) {
        prop_assert!(check_kraft_depths(&depths));
        let weights: Vec<i64> = (0..depths.len() as i64).collect();
        let tree = tree_from_sorted_depths(&depths, &weights).unwrap();
        prop_assert_eq!(tree.leaf_depths(), depths);
    }

    #[test]
    fn fraction_tracks_biguint_mirror(ops in prop::collection::vec((1u32..=96, prop::bool::ANY), 1..48)) {
        let capacity = 96u32;
        let mut fraction = FixedPointFraction::new(capacity);
        let mut mirror = BigUint::from(0u32); // value scaled by 2^capacity
        let one = BigUint::from(1u32) << capacity;
        for &(k, probe) in &ops {
            fraction.add_pow2(k).unwrap();
            mirror += BigUint::from(1u32) << (capacity - k);
            let mut rebuilt = BigUint::from(0u32);
            for (i, &limb) in fraction.limbs().iter().enumerate() {
                rebuilt += BigUint::from(limb) << (64 * i);
            }
            rebuilt += BigUint::from(fraction.overflow_units()) << capacity;
            prop_assert_eq!(&rebuilt, &mirror);
            if probe {
                prop_assert_eq!(fraction.at_most_one(), mirror <= one);
            }
        }
    }

    #[test]
    fn minimax_code_dominates_the_alternatives(q in positive_dist()) {
        let minimax = minimax_code(&q).unwrap();
        let shannon = shannon_code(&q).unwrap();
        let huffman = huffman_code(&q).unwrap();
        let worst = |code| redundancy_report(&q, &q, code).unwrap().max_pointwise;
        let m = worst(&minimax);
        prop_assert!(m < 1.0, "max pointwise {m}");
        prop_assert!(m <= worst(&shannon) + 1e-12);
        prop_assert!(m <= worst(&huffman) + 1e-12);
    }

    #[test]
    fn shannon_lengths_are_ceil_log_inverse(q in positive_dist()) {
        let code = shannon_code(&q).unwrap();
        for (&p, &len) in q.probs().iter().zip(code.lengths()) {
            prop_assert_eq!(len, (-p.log2()).ceil().max(1.0) as u32);
        }
        let mut sorted_lengths = code.lengths().to_vec();
        sorted_lengths.sort_unstable();
        prop_assert!(check_kraft_depths(&sorted_lengths));
    }

    #[test]
    fn codewords_are_prefix_free_and_round_trip(q in positive_dist(), stream_seed in any::<u64>()) {
        let code = minimax_code(&q).unwrap();
        let words: Vec<String> = (0..code.len()).map(|i| code.codeword_string(i)).collect();
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                if i != j {
                    prop_assert!(!b.starts_with(a.as_str()), "{a} prefixes {b}");
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed);
        let stream: Vec<u32> = (0..rng.gen_range(0..60))
            .map(|_| rng.gen_range(0..code.len() as u32))
            .collect();
        let bits = code.encode(&stream).unwrap();
        prop_assert_eq!(code.decode(&bits).unwrap(), stream);
    }

    #[test]
    fn group_test_expected_checks_equal_code_average_length(q in positive_dist()) {
        let plan = group_test_plan(&q).unwrap();
        let code = minimax_code(&q).unwrap();
        let avg = redundancy_report(&q, &q, &code).unwrap().avg_length;
        prop_assert!((plan.expected_checks(&q).unwrap() - avg).abs() < 1e-12);
    }

    #[test]
    fn selection_matches_full_sort(mut xs in prop::collection::vec(any::<i32>(), 1..80), pick in any::<prop::sample::Index>()) {
        let k = pick.index(xs.len());
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        let cmp = |a: &i32, b: &i32| a.cmp(b);
        select_nth_by(&mut xs, k, &cmp);
        prop_assert_eq!(xs[k], sorted[k]);
    }
}
