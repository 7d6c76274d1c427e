//! Randomised and exhaustive sweeps pitting the fast builders against the
//! brute-force oracles. Used by the `verify` CLI subcommand and the
//! acceptance suite; the sweeps are embarrassingly parallel, so each can
//! run on a rayon pool when the `parallel` feature is enabled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::integer::{build_minimax_heap, build_minimax_int};
use crate::oracle::{oracle_threshold, ExhaustiveOracle};
use crate::real::{build_minimax_real, decompose, normalize, select_threshold};

/// How a sweep distributes its cases. `Parallel` degrades to sequential
/// execution when the `parallel` feature is disabled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

/// Outcome of one sweep. `samples` keeps the first few mismatch
/// descriptions so a failure names a concrete reproducing input.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub cases: u64,
    pub mismatches: u64,
    pub samples: Vec<String>,
}

const SAMPLE_CAP: usize = 32;

impl SuiteReport {
    fn from_mismatches(cases: u64, mut all: Vec<String>) -> Self {
        let mismatches = all.len() as u64;
        all.truncate(SAMPLE_CAP);
        SuiteReport { cases, mismatches, samples: all }
    }

    pub fn all_passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn case_seed(base: u64, index: usize) -> u64 {
    base ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn collect_mismatches<F>(total: usize, par: Parallelism, per_case: F) -> Vec<String>
where
    F: Fn(usize) -> Vec<String> + Send + Sync,
{
    match par {
        #[cfg(feature = "parallel")]
        Parallelism::Parallel => (0..total).into_par_iter().flat_map_iter(per_case).collect(),
        _ => (0..total).flat_map(per_case).collect(),
    }
}

/// Every nondecreasing multiset of up to `n_max` weights drawn from
/// `[lo, hi]`, in lexicographic order.
fn all_multisets(n_max: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(out: &mut Vec<Vec<i64>>, current: &mut Vec<i64>, n_max: usize, min: i64, hi: i64) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == n_max {
            return;
        }
        for w in min..=hi {
            current.push(w);
            extend(out, current, n_max, w, hi);
            current.pop();
        }
    }
    extend(&mut out, &mut current, n_max, lo, hi);
    out
}

fn check_integer_case(weights: &[i64], oracle: &ExhaustiveOracle) -> Option<String> {
    let expected = match oracle.minimax_cost(weights) {
        Ok(c) => c,
        Err(e) => return Some(format!("oracle failed on {weights:?}: {e}")),
    };
    let tree = match build_minimax_int(weights) {
        Ok(t) => t,
        Err(e) => return Some(format!("linear builder failed on {weights:?}: {e}")),
    };
    if tree.cost() != expected {
        return Some(format!(
            "linear builder cost {} != oracle {expected} on {weights:?}",
            tree.cost()
        ));
    }
    let violations = tree.validate(weights);
    if !violations.is_empty() {
        return Some(format!("invalid tree for {weights:?}: {}", violations[0]));
    }
    match build_minimax_heap(weights) {
        Ok(h) if h.cost() == expected => None,
        Ok(h) => Some(format!(
            "heap builder cost {} != oracle {expected} on {weights:?}",
            h.cost()
        )),
        Err(e) => Some(format!("heap builder failed on {weights:?}: {e}")),
    }
}

/// Exhaustive integer check: every weight multiset with at most `n_max`
/// elements over `[lo, hi]`, each also re-run under `shuffles` random
/// permutations, compared against the depth-profile oracle and the
/// heap-based reference builder.
pub fn integer_sweep(
    n_max: usize,
    lo: i64,
    hi: i64,
    shuffles: u32,
    seed: u64,
    par: Parallelism,
) -> SuiteReport {
    let multisets = all_multisets(n_max, lo, hi);
    let oracle = ExhaustiveOracle::new(n_max);
    let per_multiset = 1 + shuffles as u64;
    let mismatches = collect_mismatches(multisets.len(), par, |i| {
        let mut found = Vec::new();
        let base = &multisets[i];
        if let Some(msg) = check_integer_case(base, &oracle) {
            found.push(msg);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, i));
        let mut shuffled = base.clone();
        for _ in 0..shuffles {
            shuffled.shuffle(&mut rng);
            if let Some(msg) = check_integer_case(&shuffled, &oracle) {
                found.push(msg);
            }
        }
        found
    });
    SuiteReport::from_mismatches(multisets.len() as u64 * per_multiset, mismatches)
}

/// Random real-weight trees versus the depth-profile oracle. Weights are
/// uniform on [-10, 0] with up to `n_max` per case (keep `n_max` small;
/// the oracle enumerates depth profiles).
pub fn real_sweep(trials: u64, n_max: usize, seed: u64, par: Parallelism) -> SuiteReport {
    const TOLERANCE: f64 = 1e-9;
    let oracle = ExhaustiveOracle::new(n_max);
    let mismatches = collect_mismatches(trials as usize, par, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, i));
        let n = rng.gen_range(1..=n_max);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..0.0)).collect();
        let expected = match oracle.minimax_cost(&weights) {
            Ok(c) => c,
            Err(e) => return vec![format!("oracle failed on {weights:?}: {e}")],
        };
        let tree = match build_minimax_real(&weights) {
            Ok(t) => t,
            Err(e) => return vec![format!("real builder failed on {weights:?}: {e}")],
        };
        let mut found = Vec::new();
        if (tree.cost() - expected).abs() > TOLERANCE {
            found.push(format!(
                "real builder cost {} != oracle {expected} on {weights:?}",
                tree.cost()
            ));
        }
        let violations = tree.validate(&weights);
        if !violations.is_empty() {
            found.push(format!("invalid tree for {weights:?}: {}", violations[0]));
        }
        found
    });
    SuiteReport::from_mismatches(trials, mismatches)
}

/// Random decompositions through both threshold searches — the fixed-point
/// binary search and the big-integer scan — demanding bit-exact agreement
/// on the chosen threshold and on every emitted length. Every fourth case
/// uses integer-valued weights so all-zero fractions get exercised.
pub fn threshold_sweep(trials: u64, n_max: usize, seed: u64, par: Parallelism) -> SuiteReport {
    let mismatches = collect_mismatches(trials as usize, par, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, i));
        let n = rng.gen_range(2..=n_max.max(2));
        let weights: Vec<f64> = if i % 4 == 3 {
            (0..n).map(|_| f64::from(rng.gen_range(-14..=0))).collect()
        } else {
            (0..n).map(|_| rng.gen_range(-14.0..0.0)).collect()
        };
        let norm = match normalize(&weights) {
            Ok(v) => v,
            Err(e) => return vec![format!("normalize failed on {weights:?}: {e}")],
        };
        let d = decompose(&norm);
        let fast = select_threshold(&d);
        let (threshold, lengths) = oracle_threshold(&d);
        let mut found = Vec::new();
        if fast.threshold != threshold {
            found.push(format!(
                "threshold {} != oracle {threshold} on {weights:?}",
                fast.threshold
            ));
        }
        if fast.lengths != lengths {
            found.push(format!(
                "lengths {:?} != oracle {lengths:?} on {weights:?}",
                fast.lengths
            ));
        }
        found
    });
    SuiteReport::from_mismatches(trials, mismatches)
}
