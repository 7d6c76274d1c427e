//! Worst-case linear minimax trees for integer weights.
//!
//! The pipeline: clamp every weight below `max - n + 1` up to that threshold
//! (which provably preserves the minimax cost), counting-sort the clamped
//! multiset over its length-`n` value window, run the sorted merge procedure
//! (a single forward pass over an array-backed list), then swap the original
//! weights back into the threshold leaves and recompute internal weights.
//! Every stage is O(n); [`build_minimax_heap`] provides the classic
//! O(n log n) priority-queue construction as an independent reference.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::tree::{MinimaxTree, Node, NodeId, Weight};

/// Result of the cost-preserving clamp: weights below
/// `threshold = max - n + 1` are raised to it, and the affected input
/// positions are recorded so the originals can be restored leaf-by-leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClampedWeights {
    clamped: Vec<i64>,
    threshold: i64,
    replaced: Vec<u32>,
}

impl ClampedWeights {
    /// Clamped weights, aligned with the input.
    pub fn clamped(&self) -> &[i64] {
        &self.clamped
    }

    /// The clamp floor `max - n + 1`.
    pub fn threshold(&self) -> i64 {
        self.threshold
    }

    /// Input positions whose weights were raised to the threshold.
    pub fn replaced_indices(&self) -> &[u32] {
        &self.replaced
    }
}

/// Raises every weight below `max - n + 1` to that threshold. A leaf at
/// depth `d ≤ n - 1` contributes `w + d`, so any weight at or below the
/// threshold can never exceed the root weight forced by the maximum; the
/// minimax cost is unchanged.
pub fn clamp_weights(weights: &[i64]) -> Result<ClampedWeights> {
    i64::validate_multiset(weights)?;
    let max = *weights.iter().max().expect("validated nonempty");
    let threshold = max - (weights.len() as i64 - 1);
    let mut clamped = Vec::with_capacity(weights.len());
    let mut replaced = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        if w < threshold {
            clamped.push(threshold);
            replaced.push(i as u32);
        } else {
            clamped.push(w);
        }
    }
    Ok(ClampedWeights { clamped, threshold, replaced })
}

/// A clamped multiset in nondecreasing order plus the stable permutation
/// that produced it (`order[j]` = input position of `values[j]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedClamped {
    pub values: Vec<i64>,
    pub order: Vec<u32>,
}

/// Stable counting sort over the clamp window `[max - n + 1, max]`: exactly
/// `n` possible values, so direct addressing sorts in O(n).
pub fn sort_clamped(c: &ClampedWeights) -> SortedClamped {
    let n = c.clamped.len();
    let mut counts = vec![0u32; n];
    for &w in &c.clamped {
        counts[(w - c.threshold) as usize] += 1;
    }
    let mut position = 0u32;
    for count in counts.iter_mut() {
        let start = position;
        position += *count;
        *count = start;
    }
    let mut values = vec![0i64; n];
    let mut order = vec![0u32; n];
    for (i, &w) in c.clamped.iter().enumerate() {
        let slot = &mut counts[(w - c.threshold) as usize];
        values[*slot as usize] = w;
        order[*slot as usize] = i as u32;
        *slot += 1;
    }
    SortedClamped { values, order }
}

/// Clamp and counting sort fused into single passes over the input. The
/// clamp is a pure value transform, so the histogram can bucket
/// `max(w, threshold)` straight from the original weights instead of
/// materialising the clamped copy first; on large inputs that skips one
/// full write and one full read of an n-element array.
fn sort_weights_clamping(weights: &[i64]) -> Result<(SortedClamped, i64)> {
    i64::validate_multiset(weights)?;
    let n = weights.len();
    let max = *weights.iter().max().expect("validated nonempty");
    let threshold = max - (n as i64 - 1);
    let mut counts = vec![0u32; n];
    for &w in weights {
        counts[(w.max(threshold) - threshold) as usize] += 1;
    }
    let mut position = 0u32;
    for count in counts.iter_mut() {
        let start = position;
        position += *count;
        *count = start;
    }
    let mut values = vec![0i64; n];
    let mut order = vec![0u32; n];
    for (i, &w) in weights.iter().enumerate() {
        let c = w.max(threshold);
        let slot = &mut counts[(c - threshold) as usize];
        values[*slot as usize] = c;
        order[*slot as usize] = i as u32;
        *slot += 1;
    }
    Ok((SortedClamped { values, order }, threshold))
}

/// Work counters for the sorted merge; the list pass is linear because both
/// totals are bounded by the node count `2n - 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeStats {
    /// Nodes created and spliced into the list (always `n - 1`).
    pub insertions: u64,
    /// Forward steps taken by the insertion pointer over the whole run.
    pub advances: u64,
}

/// Minimax tree for an already-sorted multiset, in O(n).
///
/// The procedure keeps the live nodes in a sorted array-backed linked list
/// and a pointer that only moves forward: each round merges the first two
/// nodes into a parent weighing `second + 1`, advances the pointer to the
/// last node weighing at most that (the rightmost qualifying position, so
/// ties never pull it backwards), and splices the parent in right of the
/// pointer. Leaves occupy arena slots `0..n` in input order.
pub fn build_minimax_sorted(sorted_weights: &[i64]) -> Result<MinimaxTree<i64>> {
    build_minimax_sorted_instrumented(sorted_weights).map(|(tree, _)| tree)
}

/// As [`build_minimax_sorted`], also reporting pointer work.
pub fn build_minimax_sorted_instrumented(
    sorted_weights: &[i64],
) -> Result<(MinimaxTree<i64>, MergeStats)> {
    i64::validate_multiset(sorted_weights)?;
    if sorted_weights.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::NotSorted);
    }
    let n = sorted_weights.len();
    if n == 1 {
        return Ok((MinimaxTree::single_leaf(sorted_weights[0]), MergeStats::default()));
    }

    const NONE: u32 = u32::MAX;
    let mut nodes: Vec<Node<i64>> = sorted_weights
        .iter()
        .enumerate()
        .map(|(j, &w)| Node::leaf(w, j as u32))
        .collect();
    nodes.reserve_exact(n - 1);
    // Successor links; removals only ever happen at the head and insertions
    // only ever right of the pointer, so no back links are needed.
    let mut next: Vec<u32> = (1..=n as u32).map(|j| if j == n as u32 { NONE } else { j }).collect();
    next.reserve_exact(n - 1);

    let mut stats = MergeStats::default();
    let mut head = 0u32;
    let mut ptr = head;
    let mut live = n;
    while live > 1 {
        let first = head;
        let second = next[first as usize];
        // The list is nondecreasing, so the second node carries the max.
        let weight = nodes[second as usize].weight().plus_one();
        while next[ptr as usize] != NONE && nodes[next[ptr as usize] as usize].weight() <= weight {
            ptr = next[ptr as usize];
            stats.advances += 1;
        }
        let merged = nodes.len() as u32;
        nodes.push(Node::internal(weight, NodeId::new(first), NodeId::new(second)));
        stats.insertions += 1;
        if ptr == second {
            // Nothing right of the pair weighs ≤ weight: the parent takes
            // the pair's place at the head.
            next.push(next[second as usize]);
            head = merged;
            ptr = merged;
        } else {
            // The pointer sits strictly right of the removed pair (it can
            // never lag: the second node itself qualifies).
            head = next[second as usize];
            next.push(next[ptr as usize]);
            next[ptr as usize] = merged;
        }
        live -= 1;
    }
    let root = NodeId::new(head);
    Ok((MinimaxTree::from_arena_unchecked(nodes, root), stats))
}

/// Reference construction: repeatedly merge the two lightest nodes via a
/// binary heap, O(n log n). Works for integer and real weights; ties broken
/// by creation order, so results are deterministic.
pub fn build_minimax_heap<W: Weight>(weights: &[W]) -> Result<MinimaxTree<W>> {
    W::validate_multiset(weights)?;
    let n = weights.len();
    if n == 1 {
        return Ok(MinimaxTree::single_leaf(weights[0]));
    }

    struct Entry<W>(W, u32);
    impl<W: Weight> PartialEq for Entry<W> {
        fn eq(&self, other: &Self) -> bool {
            self.cmp(other) == std::cmp::Ordering::Equal
        }
    }
    impl<W: Weight> Eq for Entry<W> {}
    impl<W: Weight> PartialOrd for Entry<W> {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl<W: Weight> Ord for Entry<W> {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            W::total_cmp(&self.0, &other.0).then(self.1.cmp(&other.1))
        }
    }

    let mut nodes: Vec<Node<W>> = weights
        .iter()
        .enumerate()
        .map(|(j, &w)| Node::leaf(w, j as u32))
        .collect();
    nodes.reserve_exact(n - 1);
    let mut heap: BinaryHeap<Reverse<Entry<W>>> = weights
        .iter()
        .enumerate()
        .map(|(j, &w)| Reverse(Entry(w, j as u32)))
        .collect();
    while heap.len() > 1 {
        let Reverse(Entry(wa, a)) = heap.pop().expect("len checked");
        let Reverse(Entry(wb, b)) = heap.pop().expect("len checked");
        let weight = W::max_of(wa, wb).plus_one();
        let id = nodes.len() as u32;
        nodes.push(Node::internal(weight, NodeId::new(a), NodeId::new(b)));
        heap.push(Reverse(Entry(weight, id)));
    }
    let root = NodeId::new(nodes.len() as u32 - 1);
    Ok(MinimaxTree::from_arena_unchecked(nodes, root))
}

/// Minimax tree for an arbitrary integer multiset in worst-case O(n):
/// clamp, counting-sort, sorted merge, then restore the original weights
/// into the threshold leaves (ascending by value, left to right) and
/// recompute internal weights bottom-up.
pub fn build_minimax_int(weights: &[i64]) -> Result<MinimaxTree<i64>> {
    let (sorted, threshold) = sort_weights_clamping(weights)?;
    let n = weights.len();
    if n == 1 {
        return Ok(MinimaxTree::single_leaf(weights[0]));
    }
    let mut tree = build_minimax_sorted(&sorted.values)?;

    // Leaves showing the threshold value stand for every original weight at
    // or below it (raised ones and exact matches alike); any assignment of
    // those originals to those leaves keeps the tree optimal. Ascending
    // value is fixed here for reproducibility, via a radix sort to keep the
    // whole pipeline linear even though these weights lie outside the
    // counting-sort window.
    let mut below: Vec<(i64, u32)> = weights
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w <= threshold)
        .map(|(i, &w)| (w, i as u32))
        .collect();
    radix_sort_pairs(&mut below);

    let mut restored = below.into_iter();
    for j in 0..n {
        let (weight, index) = if sorted.values[j] == threshold {
            restored.next().expect("one original ≤ threshold per threshold leaf")
        } else {
            (sorted.values[j], sorted.order[j])
        };
        tree.set_leaf(NodeId::new(j as u32), weight, index);
    }
    debug_assert!(restored.next().is_none());
    tree.recompute_internal_weights();
    Ok(tree)
}

/// Stable LSD radix sort of `(value, payload)` pairs by value: eight
/// byte-wide counting passes, so O(n) regardless of the value range. Passes
/// where every key shares the same byte are skipped.
fn radix_sort_pairs(pairs: &mut Vec<(i64, u32)>) {
    if pairs.len() <= 1 {
        return;
    }
    // Flipping the sign bit makes unsigned byte order agree with i64 order.
    let key = |v: i64| (v as u64) ^ (1 << 63);
    let mut scratch = vec![(0i64, 0u32); pairs.len()];
    for pass in 0..8 {
        let shift = pass * 8;
        let mut counts = [0u32; 256];
        for &(v, _) in pairs.iter() {
            counts[((key(v) >> shift) & 0xff) as usize] += 1;
        }
        if counts.iter().any(|&c| c as usize == pairs.len()) {
            continue;
        }
        let mut position = 0u32;
        for count in counts.iter_mut() {
            let start = position;
            position += *count;
            *count = start;
        }
        for &pair in pairs.iter() {
            let slot = &mut counts[((key(pair.0) >> shift) & 0xff) as usize];
            scratch[*slot as usize] = pair;
            *slot += 1;
        }
        std::mem::swap(pairs, &mut scratch);
    }
}
