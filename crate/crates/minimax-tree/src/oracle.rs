//! Brute-force references for property tests and the CLI verify mode.
//!
//! Everything here trades speed for independence: no code is shared with
//! the algorithms under test beyond the basic types. The minimax oracle
//! enumerates depth profiles outright, the threshold oracle evaluates every
//! candidate with exact big-integer arithmetic, and the length oracle tries
//! every Kraft-valid assignment.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::coding::Distribution;
use crate::error::{Error, Result};
use crate::real::Decomposition;
use crate::tree::Weight;

/// Exhaustive minimax-cost reference. Precomputes, per leaf count, every
/// depth profile of a strictly binary tree (the profile multisets grow
/// slowly: 1, 1, 1, 2, 3, 5, 9, 16, … for n = 1, 2, 3, …), then scores a
/// weight multiset against each profile. A profile's best score pairs
/// heavier weights with shallower depths — if a deeper leaf outweighed a
/// shallower one, swapping them could only lower the maximum.
pub struct ExhaustiveOracle {
    max_n: usize,
    /// `profiles[n]` = all nondecreasing depth profiles for `n` leaves.
    profiles: Vec<Vec<Vec<u32>>>,
}

impl ExhaustiveOracle {
    pub fn new(max_n: usize) -> Self {
        let mut profiles: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_n + 1];
        if max_n >= 1 {
            profiles[1] = vec![vec![0]];
        }
        for n in 2..=max_n {
            // Every strictly binary tree on n leaves is a tree on n - 1
            // leaves with one leaf split in two.
            let mut grown = BTreeSet::new();
            for profile in &profiles[n - 1] {
                for (i, &d) in profile.iter().enumerate() {
                    if i > 0 && profile[i - 1] == d {
                        continue; // splitting an equal-depth leaf repeats
                    }
                    let mut next = Vec::with_capacity(n);
                    next.extend_from_slice(&profile[..i]);
                    next.extend_from_slice(&profile[i + 1..]);
                    next.push(d + 1);
                    next.push(d + 1);
                    next.sort_unstable();
                    grown.insert(next);
                }
            }
            profiles[n] = grown.into_iter().collect();
        }
        ExhaustiveOracle { max_n, profiles }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Number of distinct depth profiles for `n` leaves.
    pub fn profile_count(&self, n: usize) -> usize {
        self.profiles.get(n).map_or(0, Vec::len)
    }

    /// Exact minimum of `max_i(w_i + depth_i)` over all strictly binary
    /// trees with one leaf per weight.
    pub fn minimax_cost<W: Weight>(&self, weights: &[W]) -> Result<W> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = weights.len();
        if n > self.max_n {
            return Err(Error::TooManySymbols { n, max: self.max_n });
        }
        let mut descending = weights.to_vec();
        descending.sort_unstable_by(|a, b| W::total_cmp(b, a));
        let mut best: Option<W> = None;
        for profile in &self.profiles[n] {
            let mut worst = descending[0].add_depth(profile[0]);
            for (w, &d) in descending.iter().zip(profile).skip(1) {
                worst = W::max_of(worst, w.add_depth(d));
            }
            best = Some(match best {
                None => worst,
                Some(b) if W::total_cmp(&worst, &b).is_lt() => worst,
                Some(b) => b,
            });
        }
        Ok(best.expect("at least one profile per n"))
    }
}

/// One-shot convenience around [`ExhaustiveOracle`].
pub fn oracle_minimax_cost<W: Weight>(weights: &[W], max_n: usize) -> Result<W> {
    ExhaustiveOracle::new(max_n).minimax_cost(weights)
}

/// Direct evaluation of the threshold search: sort the candidates
/// `{x_1, …, x_n} ∪ {0}`, maintain the exact Kraft numerator over `2^cap`
/// as a big integer while sweeping the threshold upward (each fraction
/// crossed flips its index from ceiling to floor, doubling one term), and
/// report the largest candidate whose sum stays at most one, along with the
/// lengths it implies. Mirrors the fallback of the fast path: if nothing
/// passes, threshold 0 with all-ceiling lengths.
pub fn oracle_threshold(d: &Decomposition) -> (f64, Vec<u32>) {
    let capacity = d.ceils().iter().copied().max().unwrap_or(0).max(1);
    let one = BigUint::from(1u32) << capacity;
    let term = |c: u32| BigUint::from(1u32) << (capacity - c);

    // Kraft numerator at threshold 0: every index at its ceiling (indices
    // with zero fraction have floor = ceiling, so this is also "floor where
    // x_j ≤ 0").
    let mut sum = BigUint::from(0u32);
    for &c in d.ceils() {
        sum += term(c);
    }

    let mut candidates: Vec<f64> = Vec::with_capacity(d.len() + 1);
    candidates.push(0.0);
    candidates.extend_from_slice(d.fracs());
    candidates.sort_unstable_by(f64::total_cmp);

    let mut fracs_sorted: Vec<(f64, u32)> = d
        .fracs()
        .iter()
        .copied()
        .zip(d.ceils().iter().copied())
        .filter(|&(x, _)| x > 0.0)
        .collect();
    fracs_sorted.sort_unstable_by(|a, b| f64::total_cmp(&a.0, &b.0));

    let mut best: Option<f64> = None;
    let mut crossed = fracs_sorted.iter().peekable();
    for &x in &candidates {
        while let Some(&&(frac, ceil)) = crossed.peek() {
            if frac <= x {
                sum += term(ceil); // ceiling term doubles into the floor term
                crossed.next();
            } else {
                break;
            }
        }
        if sum <= one {
            // The sum only grows with x, so passing candidates form a
            // prefix; keep overwriting with the largest.
            debug_assert!(best.is_none_or(|b| b <= x));
            best = Some(x);
        }
    }

    let threshold = best.unwrap_or(0.0);
    let lengths = d
        .fracs()
        .iter()
        .zip(d.floors())
        .zip(d.ceils())
        .map(|((&x, &floor), &ceil)| if x <= threshold { floor } else { ceil })
        .collect();
    (threshold, lengths)
}

/// Exhaustive minimum-max-pointwise-redundancy reference: tries every
/// nondecreasing Kraft-valid length multiset over `[1, max_len]` (or `{0}`
/// for a single symbol), assigns lengths to symbols by decreasing
/// probability (heaviest symbol gets the shortest length), and returns the
/// per-symbol lengths minimising `max_i(log2 q_i + length_i)`.
pub fn oracle_optimal_lengths(q: &Distribution, max_len: u32) -> Result<Vec<u32>> {
    const MAX_ORACLE_SYMBOLS: usize = 6;
    let n = q.len();
    if n > MAX_ORACLE_SYMBOLS {
        return Err(Error::TooManySymbols { n, max: MAX_ORACLE_SYMBOLS });
    }
    if let Some(index) = q.probs().iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroProbability { index });
    }
    if n == 1 {
        return Ok(vec![0]);
    }

    // Symbols ordered by decreasing probability (ties by index).
    let mut by_weight: Vec<usize> = (0..n).collect();
    by_weight.sort_by(|&a, &b| {
        f64::total_cmp(&q.probs()[b], &q.probs()[a]).then(a.cmp(&b))
    });
    let logs: Vec<f64> = q.probs().iter().map(|&p| p.log2()).collect();

    // Enumerate nondecreasing sequences with a Kraft budget in exact units
    // of 2^(-max_len).
    let budget = 1u64 << max_len;
    let mut lengths = vec![1u32; n];
    let mut best: Option<(f64, Vec<u32>)> = None;
    fn recurse(
        slot: usize,
        min_len: u32,
        used: u64,
        lengths: &mut Vec<u32>,
        ctx: &(usize, u32, u64, Vec<usize>, Vec<f64>),
        best: &mut Option<(f64, Vec<u32>)>,
    ) {
        let (n, max_len, budget, by_weight, logs) = ctx;
        if slot == *n {
            let mut worst = f64::NEG_INFINITY;
            for (rank, &symbol) in by_weight.iter().enumerate() {
                worst = worst.max(logs[symbol] + f64::from(lengths[rank]));
            }
            match best {
                Some((score, _)) if *score <= worst => {}
                _ => {
                    let mut per_symbol = vec![0u32; *n];
                    for (rank, &symbol) in by_weight.iter().enumerate() {
                        per_symbol[symbol] = lengths[rank];
                    }
                    *best = Some((worst, per_symbol));
                }
            }
            return;
        }
        for len in min_len..=*max_len {
            let unit = 1u64 << (max_len - len);
            if used + unit > *budget {
                continue; // even longer lengths cost less; keep trying
            }
            lengths[slot] = len;
            recurse(slot + 1, len, used + unit, lengths, ctx, best);
        }
    }
    let ctx = (n, max_len, budget, by_weight, logs);
    recurse(0, 1, 0, &mut lengths, &ctx, &mut best);
    Ok(best.expect("the uniform profile always fits").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integer::{build_minimax_heap, build_minimax_int};
    use crate::real::{decompose, normalize, select_threshold};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn profile_counts_match_known_sequence() {
        let oracle = ExhaustiveOracle::new(8);
        let expected = [0usize, 1, 1, 1, 2, 3, 5, 9, 16];
        for (n, &count) in expected.iter().enumerate() {
            assert_eq!(oracle.profile_count(n), count, "n = {n}");
        }
    }

    #[test]
    fn oracle_cost_fixed_cases() {
        assert_eq!(oracle_minimax_cost(&[1i64, 2, 3], 10).unwrap(), 4);
        assert_eq!(oracle_minimax_cost(&[0i64, 0], 10).unwrap(), 1);
        assert_eq!(oracle_minimax_cost(&[7i64], 10).unwrap(), 7);
        assert_eq!(oracle_minimax_cost(&[5i64, 0, -100], 10).unwrap(), 6);
        assert_eq!(oracle_minimax_cost(&[-1i64, -2, -2], 10).unwrap(), 0);
        assert!(matches!(
            oracle_minimax_cost(&[0i64; 12], 10),
            Err(Error::TooManySymbols { .. })
        ));
    }

    #[test]
    fn oracle_agrees_with_heap_reference_exhaustively() {
        // All multisets with n ≤ 5 over [-2, 2]: two independent routes to
        // the same optimum cross-validate each other.
        let oracle = ExhaustiveOracle::new(5);
        let mut multiset = Vec::new();
        fn walk(
            oracle: &ExhaustiveOracle,
            multiset: &mut Vec<i64>,
            min: i64,
        ) {
            if !multiset.is_empty() {
                let heap = build_minimax_heap(multiset).unwrap().cost();
                assert_eq!(oracle.minimax_cost(multiset).unwrap(), heap, "{multiset:?}");
            }
            if multiset.len() == 5 {
                return;
            }
            for w in min..=2 {
                multiset.push(w);
                walk(oracle, multiset, w);
                multiset.pop();
            }
        }
        walk(&oracle, &mut multiset, -2);
    }

    #[test]
    fn oracle_handles_real_weights() {
        let weights = [0.4f64.log2(), 0.3f64.log2(), 0.3f64.log2()];
        let cost = oracle_minimax_cost(&weights, 8).unwrap();
        assert!((cost - (0.3f64.log2() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn threshold_oracle_fixed_cases() {
        let norm = normalize(&[-1.0, -2.0, -2.0]).unwrap();
        let (x, lengths) = oracle_threshold(&decompose(&norm));
        assert_eq!(x, 0.0);
        assert_eq!(lengths, vec![1, 2, 2]);

        let norm = normalize(&[0.4f64.log2(), 0.3f64.log2(), 0.3f64.log2()]).unwrap();
        let (x, lengths) = oracle_threshold(&decompose(&norm));
        assert!((x - 0.321928094887362).abs() < 1e-12);
        assert_eq!(lengths, vec![1, 2, 2]);
    }

    #[test]
    fn threshold_oracle_agrees_with_fast_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..300 {
            let n = rng.gen_range(2..=60);
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-14.0..0.0)).collect();
            let d = decompose(&normalize(&weights).unwrap());
            let fast = select_threshold(&d);
            let (x, lengths) = oracle_threshold(&d);
            assert_eq!(fast.threshold, x, "weights {weights:?}");
            assert_eq!(fast.lengths, lengths, "weights {weights:?}");
        }
    }

    #[test]
    fn optimal_length_fixed_cases() {
        let dyadic = Distribution::from_probs(&[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(oracle_optimal_lengths(&dyadic, 2).unwrap(), vec![1, 2, 2]);

        let skew = Distribution::from_probs(&[0.4, 0.3, 0.3]).unwrap();
        assert_eq!(oracle_optimal_lengths(&skew, 2).unwrap(), vec![1, 2, 2]);

        let uniform = Distribution::from_probs(&[0.25; 4]).unwrap();
        assert_eq!(oracle_optimal_lengths(&uniform, 3).unwrap(), vec![2, 2, 2, 2]);

        let solo = Distribution::from_probs(&[1.0]).unwrap();
        assert_eq!(oracle_optimal_lengths(&solo, 1).unwrap(), vec![0]);
    }

    #[test]
    fn minimax_code_is_optimal_at_desk_scale() {
        use crate::coding::{minimax_code, redundancy_report};
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
            let q = Distribution::from_probs(&probs).unwrap();
            let code = minimax_code(&q).unwrap();
            let achieved = redundancy_report(&q, &q, &code).unwrap().max_pointwise;
            let lengths = oracle_optimal_lengths(&q, (n - 1) as u32).unwrap();
            let optimal = q
                .probs()
                .iter()
                .zip(&lengths)
                .map(|(&p, &l)| p.log2() + f64::from(l))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                (achieved - optimal).abs() < 1e-9,
                "achieved {achieved} vs optimal {optimal} for {probs:?}"
            );
        }
    }

    #[test]
    fn int_builder_matches_oracle_on_random_multisets() {
        let oracle = ExhaustiveOracle::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..500 {
            let n = rng.gen_range(1..=8);
            let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
            assert_eq!(
                build_minimax_int(&weights).unwrap().cost(),
                oracle.minimax_cost(&weights).unwrap(),
                "weights {weights:?}"
            );
        }
    }
}
