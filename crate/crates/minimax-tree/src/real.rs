//! Worst-case linear minimax trees for real weights.
//!
//! Pipeline: shift the weights so they become logs of a probability
//! distribution, split each absolute shifted weight into integer floor,
//! ceiling and fractional part, then find the largest fractional threshold
//! `x*` such that flooring exactly the indices with fraction `≤ x*` still
//! satisfies the Kraft inequality. The resulting integer lengths feed the
//! integer builder, whose tree becomes a minimax tree for the original
//! weights once the leaves get their real weights back.
//!
//! The threshold search is the delicate part: a generalized selection that
//! halves the candidate set per round around its median, maintaining the
//! tested Kraft sum in two exact fixed-point accumulators (`S1` holds
//! everything decided so far, `S2` stages the half under test). All Kraft
//! decisions are exact; floats only feed comparisons and the final leaf
//! weights.

use crate::error::Result;
use crate::integer::build_minimax_int;
use crate::kraft::FixedPointFraction;
use crate::select::select_nth_by;
use crate::tree::{MinimaxTree, Weight};

/// Weights shifted by `c = -log2(Σ 2^(w_i))` so that `Σ 2^(shifted_i) = 1`
/// up to float rounding. Every shifted weight is `≤ 0` machine-true.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights {
    shifted: Vec<f64>,
    shift: f64,
}

impl NormalizedWeights {
    pub fn shifted(&self) -> &[f64] {
        &self.shifted
    }

    /// The additive shift `c` applied to every weight.
    pub fn shift(&self) -> f64 {
        self.shift
    }
}

/// Shifts the multiset so it reads as `{log2 p_1, …, log2 p_n}` for a
/// probability distribution. Computed log-sum-exp style around the maximum,
/// so no intermediate overflows and every output is nonpositive even after
/// rounding: each shifted value is `(w - max) - log2(Σ 2^(w_i - max))`,
/// a nonpositive term minus a nonnegative one.
pub fn normalize(weights: &[f64]) -> Result<NormalizedWeights> {
    f64::validate_multiset(weights)?;
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = weights.iter().map(|&w| (w - max).exp2()).sum();
    let log_sum = sum.log2(); // sum ≥ 1, so log_sum ≥ 0
    let shifted = weights.iter().map(|&w| (w - max) - log_sum).collect();
    Ok(NormalizedWeights { shifted, shift: -max - log_sum })
}

/// Per-index split of `|shifted_j|` into floor, ceiling and fractional
/// part, with ceilings clamped to `n - 1`: a leaf weighing `-(n - 1)` or
/// less contributes at most zero at any depth `≤ n - 1`, which never
/// exceeds the minimax cost of a distribution, so the clamp is free.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    floors: Vec<u32>,
    ceils: Vec<u32>,
    fracs: Vec<f64>,
}

impl Decomposition {
    pub fn floors(&self) -> &[u32] {
        &self.floors
    }

    pub fn ceils(&self) -> &[u32] {
        &self.ceils
    }

    /// Fractional parts `x_j ∈ [0, 1)`; zero wherever the weight was an
    /// exact integer or got clamped.
    pub fn fracs(&self) -> &[f64] {
        &self.fracs
    }

    pub fn len(&self) -> usize {
        self.fracs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fracs.is_empty()
    }
}

/// Splits each `|shifted_j|` into integer and fractional parts. The
/// subtraction `a - floor(a)` is exact in binary64 (Sterbenz), so the
/// fractions carry no rounding error of their own; the guard against a
/// fraction landing on 1.0 is belt-and-braces for exotic rounding modes.
pub fn decompose(norm: &NormalizedWeights) -> Decomposition {
    let n = norm.shifted.len();
    let cap = (n - 1) as f64;
    let mut floors = Vec::with_capacity(n);
    let mut ceils = Vec::with_capacity(n);
    let mut fracs = Vec::with_capacity(n);
    for &s in &norm.shifted {
        let a = -s;
        if a >= cap {
            floors.push((n - 1) as u32);
            ceils.push((n - 1) as u32);
            fracs.push(0.0);
            continue;
        }
        let mut floor = a.floor();
        let mut frac = a - floor;
        if frac >= 1.0 {
            floor += 1.0;
            frac = 0.0;
        }
        let floor = floor as u32;
        floors.push(floor);
        ceils.push(if frac > 0.0 { floor + 1 } else { floor });
        fracs.push(frac);
    }
    Decomposition { floors, ceils, fracs }
}

/// Outcome of the threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// The largest fraction `x*` (0 if none) whose floor-set passes the
    /// Kraft test.
    pub threshold: f64,
    /// Chosen code length per index: the floor where `x_j ≤ x*`, the
    /// ceiling elsewhere.
    pub lengths: Vec<u32>,
    /// Selection rounds executed; at most `⌈log2(n + 1)⌉ + 1`.
    pub rounds: u32,
    /// Total candidates alive across all rounds; at most `2(n + 1)`.
    pub candidates_visited: u64,
}

/// Finds the largest `x*` in `{x_1, …, x_n} ∪ {0}` such that assigning the
/// floor to every index with `x_j ≤ x*` and the ceiling to the rest keeps
/// `Σ 2^(-length_j) ≤ 1`, then emits those lengths.
///
/// Each round selects the lower median of the surviving candidates with
/// deterministic (median-of-medians) selection and tests it: `S1` holds the
/// sum for "everything already decided" — all ceiling terms, plus a second
/// ceiling term for each index already accepted into the floor set, which
/// doubles `2^(-ceil)` into `2^(-floor)` — and `S2` stages the doubling
/// terms for the half under test. Indices with zero fraction have equal
/// floor and ceiling and are never doubled. Accepting merges `S2` into `S1`
/// and keeps candidates above the median; rejecting resets `S2` and keeps
/// those below. The test sum is monotone in the threshold, so the largest
/// accepted median is the answer.
///
/// For any machine-true log-distribution the zero threshold always passes.
/// If rounding ever produced ceilings that fail even that (conceivable only
/// for adversarial inputs whose exponentials underflow), the result falls
/// back to threshold 0 with all-ceiling lengths, which may then exceed the
/// Kraft bound — garbage in, deterministic garbage out.
pub fn select_threshold(d: &Decomposition) -> Selection {
    let n = d.len();
    let capacity = d.ceils.iter().copied().max().unwrap_or(0).max(1);
    let mut s1 = FixedPointFraction::new(capacity);
    for &c in &d.ceils {
        if c == 0 {
            s1.add_unit();
        } else {
            s1.add_pow2(c).expect("capacity covers every ceiling");
        }
    }
    let mut s2 = FixedPointFraction::new(capacity);

    // Candidates carry (fraction, ceiling); the ceiling is what S2 loads.
    // The extra zero is the sentinel ensuring a candidate always exists.
    let mut candidates: Vec<(f64, u32)> = Vec::with_capacity(n + 1);
    candidates.push((0.0, 0));
    candidates.extend(d.fracs.iter().copied().zip(d.ceils.iter().copied()));

    let mut best = 0.0f64;
    let mut rounds = 0u32;
    let mut visited = 0u64;
    while !candidates.is_empty() {
        rounds += 1;
        visited += candidates.len() as u64;
        #[cfg(debug_assertions)]
        debug_check_s1_invariant(d, &candidates, &s1);

        let k = candidates.len();
        select_nth_by(&mut candidates, (k - 1) / 2, &|a, b| f64::total_cmp(&a.0, &b.0));
        let median = candidates[(k - 1) / 2].0;
        for &(x, ceil) in &candidates {
            if x > 0.0 && x <= median {
                s2.add_pow2(ceil).expect("ceilings fit the capacity");
            }
        }
        if s1.pair_at_most_one(&s2).expect("equal capacities") {
            s1.merge(&s2).expect("equal capacities");
            s2.reset();
            best = median;
            candidates.retain(|&(x, _)| x > median);
        } else {
            s2.reset();
            candidates.retain(|&(x, _)| x < median);
        }
    }

    let lengths = d
        .fracs
        .iter()
        .zip(&d.floors)
        .zip(&d.ceils)
        .map(|((&x, &floor), &ceil)| if x <= best { floor } else { ceil })
        .collect();
    Selection { threshold: best, lengths, rounds, candidates_visited: visited }
}

/// Debug-build recheck of the S1 bookkeeping: recompute, with exact big
/// integers, "all ceiling terms plus a doubling term per already-accepted
/// index" and compare bit for bit. Skipped above 1024 weights to keep debug
/// sweeps usable.
#[cfg(debug_assertions)]
fn debug_check_s1_invariant(d: &Decomposition, candidates: &[(f64, u32)], s1: &FixedPointFraction) {
    use num_bigint::BigUint;
    if d.len() > 1024 {
        return;
    }
    let capacity = s1.capacity_bits();
    let term = |c: u32| BigUint::from(1u32) << (capacity - c);
    let window_min = candidates
        .iter()
        .map(|&(x, _)| x)
        .fold(f64::INFINITY, f64::min);
    let mut expected = BigUint::from(0u32);
    for (&x, &c) in d.fracs.iter().zip(&d.ceils) {
        expected += term(c);
        // Accepted below the current window: already doubled into S1.
        if x > 0.0 && x < window_min {
            expected += term(c);
        }
    }
    assert_eq!(crate::kraft::numerator_of(s1), expected, "S1 invariant violated");
}

/// Minimax tree for an arbitrary finite real multiset in worst-case O(n):
/// normalize, decompose, select the threshold, build the integer tree for
/// the negated lengths, then hang the original real weights back on the
/// leaves (each index keeps its identity throughout) and recompute internal
/// weights — which simultaneously undoes the normalization shift.
pub fn build_minimax_real(weights: &[f64]) -> Result<MinimaxTree<f64>> {
    f64::validate_multiset(weights)?;
    if weights.len() == 1 {
        return Ok(MinimaxTree::single_leaf(weights[0]));
    }
    let norm = normalize(weights)?;
    let decomposition = decompose(&norm);
    let selection = select_threshold(&decomposition);
    let ints: Vec<i64> = selection.lengths.iter().map(|&l| -i64::from(l)).collect();
    let int_tree = build_minimax_int(&ints)?;
    Ok(int_tree.map_leaf_weights(|j| weights[j as usize]))
}
