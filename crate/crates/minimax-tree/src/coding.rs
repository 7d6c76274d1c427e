//! Prefix codes and their applications.
//!
//! A minimax tree over `{log2 q_1, …, log2 q_n}` is exactly a code tree
//! minimising the maximum pointwise redundancy `max_i(log2 q_i + |c_i|)`
//! against the estimated distribution `Q`. This module wraps that reduction
//! ([`minimax_code`]), adds Shannon and Huffman codes for comparison,
//! computes redundancy reports, and reinterprets code trees as adaptive
//! group-testing plans.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kraft::{check_kraft_depths, tree_from_sorted_depths};
use crate::real::build_minimax_real;
use crate::tree::{MinimaxTree, NodeId};

/// A probability distribution. Entries may be zero (useful for the "true"
/// distribution `P` in reports); operations that cannot tolerate zeros
/// reject them per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates probabilities: finite, nonnegative, summing to one within
    /// `1e-9`.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, &p) in probs.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability { index });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadProbabilitySum { sum });
        }
        Ok(Distribution { probs: probs.to_vec() })
    }

    /// Normalizes a histogram of counts; at least one must be positive.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::BadProbabilitySum { sum: 0.0 });
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(Distribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Shannon entropy `H` in bits; zero-probability symbols contribute
    /// nothing.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    fn require_positive(&self) -> Result<()> {
        match self.probs.iter().position(|&p| p == 0.0) {
            Some(index) => Err(Error::ZeroProbability { index }),
            None => Ok(()),
        }
    }
}

/// A prefix-free binary code: per-symbol lengths plus canonical codewords
/// (sorted by length, then symbol index, assigned lexicographically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    lengths: Vec<u32>,
    /// Codeword bits, most significant first, one `Vec<u8>` of 0/1 per
    /// symbol.
    codewords: Vec<Vec<u8>>,
}

impl PrefixCode {
    /// Builds canonical codewords for the given lengths. The lengths must
    /// satisfy the Kraft inequality (checked exactly); a zero length is
    /// only meaningful for a single-symbol code.
    pub fn from_lengths(lengths: &[u32]) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !check_kraft_depths(lengths) {
            return Err(Error::KraftViolation);
        }
        let mut order: Vec<u32> = (0..lengths.len() as u32).collect();
        order.sort_unstable_by_key(|&i| (lengths[i as usize], i));

        let mut codewords = vec![Vec::new(); lengths.len()];
        let mut code = 0u64;
        let mut prev_len = lengths[order[0] as usize];
        for (rank, &symbol) in order.iter().enumerate() {
            let len = lengths[symbol as usize];
            if rank > 0 {
                code = (code + 1) << (len - prev_len);
            }
            codewords[symbol as usize] = (0..len)
                .rev()
                .map(|bit| ((code >> bit) & 1) as u8)
                .collect();
            prev_len = len;
        }
        Ok(PrefixCode { lengths: lengths.to_vec(), codewords })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    /// Codeword bits for a symbol, most significant first.
    pub fn codeword(&self, symbol: usize) -> &[u8] {
        &self.codewords[symbol]
    }

    pub fn codeword_string(&self, symbol: usize) -> String {
        self.codewords[symbol]
            .iter()
            .map(|&b| if b == 0 { '0' } else { '1' })
            .collect()
    }

    /// Concatenates the codewords of a symbol sequence into a bit vector.
    /// A zero-length codeword (single-symbol code) would make every stream
    /// collapse to no bits, so only the empty sequence is accepted then.
    pub fn encode(&self, symbols: &[u32]) -> Result<Vec<u8>> {
        let mut bits = Vec::new();
        for &s in symbols {
            let word = self
                .codewords
                .get(s as usize)
                .ok_or(Error::InvalidCodeStream)?;
            if word.is_empty() {
                return Err(Error::InvalidCodeStream);
            }
            bits.extend_from_slice(word);
        }
        Ok(bits)
    }

    /// Decodes a bit vector back into symbols by walking the canonical code
    /// tree. Fails on a bit pattern leading nowhere or on a truncated final
    /// codeword. Not defined for codes containing an empty codeword.
    pub fn decode(&self, bits: &[u8]) -> Result<Vec<u32>> {
        if self.lengths.contains(&0) {
            return if bits.is_empty() { Ok(Vec::new()) } else { Err(Error::InvalidCodeStream) };
        }
        let tree = self.code_tree()?;
        let root = tree.root_id();
        let mut symbols = Vec::new();
        let mut at = root;
        for &bit in bits {
            let node = tree.node(at);
            at = match bit {
                0 => node.left(),
                1 => node.right(),
                _ => return Err(Error::InvalidCodeStream),
            }
            .ok_or(Error::InvalidCodeStream)?;
            if let Some(leaf) = tree.node(at).leaf_index() {
                // The leaf payload is the symbol this leaf decodes to.
                symbols.push(tree.node(at).weight() as u32);
                let _ = leaf;
                at = root;
            }
        }
        if at != root {
            return Err(Error::InvalidCodeStream);
        }
        Ok(symbols)
    }

    /// The canonical code tree: leaves left to right follow (length,
    /// symbol) order, matching the codeword assignment; each leaf's weight
    /// is its symbol index.
    fn code_tree(&self) -> Result<MinimaxTree<i64>> {
        let mut order: Vec<u32> = (0..self.lengths.len() as u32).collect();
        order.sort_unstable_by_key(|&i| (self.lengths[i as usize], i));
        let depths: Vec<u32> = order.iter().map(|&i| self.lengths[i as usize]).collect();
        let symbols: Vec<i64> = order.iter().map(|&i| i64::from(i)).collect();
        tree_from_sorted_depths(&depths, &symbols)
    }
}

/// Prefix code minimising the maximum pointwise redundancy
/// `max_i(log2 q_i + |c_i|)` against `q`: lengths are the leaf depths of a
/// minimax tree for `{log2 q_i}`. The achieved maximum is the tree's root
/// weight, always below one bit.
pub fn minimax_code(q: &Distribution) -> Result<PrefixCode> {
    q.require_positive()?;
    let weights: Vec<f64> = q.probs().iter().map(|&p| p.log2()).collect();
    let tree = build_minimax_real(&weights)?;
    PrefixCode::from_lengths(&tree.leaf_depths())
}

/// Shannon code: lengths `⌈log2(1 / q_i)⌉`.
pub fn shannon_code(q: &Distribution) -> Result<PrefixCode> {
    q.require_positive()?;
    let lengths: Vec<u32> = q
        .probs()
        .iter()
        .map(|&p| (-p.log2()).ceil().max(0.0) as u32)
        .collect();
    PrefixCode::from_lengths(&lengths)
}

/// Huffman code over positive probabilities (`n ≥ 2`): repeated merge of
/// the two lightest subtrees, ties broken by creation order. Used here as
/// the average-length-optimal reference for redundancy comparisons.
pub fn huffman_code(q: &Distribution) -> Result<PrefixCode> {
    q.require_positive()?;
    let n = q.len();
    if n < 2 {
        return Err(Error::TooFewSymbols { n });
    }

    struct Entry(f64, u32);
    impl PartialEq for Entry {
        fn eq(&self, other: &Self) -> bool {
            self.cmp(other) == std::cmp::Ordering::Equal
        }
    }
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            f64::total_cmp(&self.0, &other.0).then(self.1.cmp(&other.1))
        }
    }

    // parent[v] for the merge forest; nodes n.. are internal.
    let mut parent: Vec<u32> = Vec::with_capacity(2 * n - 1);
    parent.extend(std::iter::repeat(u32::MAX).take(n));
    let mut heap: BinaryHeap<Reverse<Entry>> = q
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &p)| Reverse(Entry(p, i as u32)))
        .collect();
    while heap.len() > 1 {
        let Reverse(Entry(pa, a)) = heap.pop().expect("len checked");
        let Reverse(Entry(pb, b)) = heap.pop().expect("len checked");
        let id = parent.len() as u32;
        parent[a as usize] = id;
        parent[b as usize] = id;
        parent.push(u32::MAX);
        heap.push(Reverse(Entry(pa + pb, id)));
    }

    // Depth of each symbol = pointer chases to the root; computed root-down
    // by walking internal nodes in decreasing id (parents have larger ids).
    let mut depth = vec![0u32; parent.len()];
    for v in (0..parent.len() - 1).rev() {
        depth[v] = depth[parent[v] as usize] + 1;
    }
    PrefixCode::from_lengths(&depth[..n])
}

/// Everything §-style redundancy analysis needs in one bundle, comparing a
/// code built for the estimate `Q` against the true distribution `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyReport {
    /// `H(P)` in bits.
    pub entropy: f64,
    /// `D(P ‖ Q)` in bits; infinite when `P` puts mass where `Q` has none.
    pub relative_entropy: f64,
    /// `Σ p_i |c_i|`.
    pub avg_length: f64,
    /// `max_i(log2 q_i + |c_i|)` over `q_i > 0`.
    pub max_pointwise: f64,
    /// `Σ p_i (log2 q_i + |c_i|)` over `q_i > 0`; equals
    /// `avg_length - H(P) - D(P ‖ Q)` whenever the latter is finite.
    pub avg_excess: f64,
}

impl Serialize for RedundancyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RedundancyReport", 5)?;
        s.serialize_field("entropy", &self.entropy)?;
        // JSON has no infinity literal; write the conventional string.
        if self.relative_entropy.is_infinite() {
            s.serialize_field("relative_entropy", "+inf")?;
        } else {
            s.serialize_field("relative_entropy", &self.relative_entropy)?;
        }
        s.serialize_field("avg_length", &self.avg_length)?;
        s.serialize_field("max_pointwise", &self.max_pointwise)?;
        s.serialize_field("avg_excess", &self.avg_excess)?;
        s.end()
    }
}

/// Computes the redundancy report for `code` (built for estimate `q`)
/// against the true distribution `p`.
pub fn redundancy_report(
    p: &Distribution,
    q: &Distribution,
    code: &PrefixCode,
) -> Result<RedundancyReport> {
    if p.len() != q.len() || p.len() != code.len() {
        return Err(Error::LengthMismatch { expected: p.len(), actual: code.len() });
    }
    let entropy = p.entropy();
    let mut relative_entropy = 0.0f64;
    let mut avg_length = 0.0f64;
    let mut max_pointwise = f64::NEG_INFINITY;
    let mut avg_excess = 0.0f64;
    for ((&pi, &qi), &len) in p.probs().iter().zip(q.probs()).zip(code.lengths()) {
        let len = f64::from(len);
        avg_length += pi * len;
        if qi > 0.0 {
            let pointwise = qi.log2() + len;
            max_pointwise = max_pointwise.max(pointwise);
            avg_excess += pi * pointwise;
            if pi > 0.0 {
                relative_entropy += pi * (pi / qi).log2();
            }
        } else if pi > 0.0 {
            relative_entropy = f64::INFINITY;
        }
    }
    if relative_entropy.is_finite() {
        debug_assert!(
            (avg_excess - (avg_length - entropy - relative_entropy)).abs()
                <= 1e-9 * (1.0 + avg_length.abs()),
            "excess identity drift"
        );
    }
    Ok(RedundancyReport { entropy, relative_entropy, avg_length, max_pointwise, avg_excess })
}

/// One query of an adaptive group test: "is the target among `elements`?"
/// Leaves hold a single element; internal nodes have exactly the two
/// children that partition their set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanNode {
    pub elements: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<PlanNode>,
}

/// Decision tree for finding one target element with yes/no subset queries,
/// shaped like the minimax code tree for `q` — minimising the worst-case
/// number of queries beyond the entropy bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupTestPlan {
    pub root: PlanNode,
}

impl GroupTestPlan {
    /// Expected number of queries under `p`: `Σ p_i · depth_i`.
    pub fn expected_checks(&self, p: &Distribution) -> Result<f64> {
        let mut total = 0.0;
        let mut seen = 0usize;
        let mut stack = vec![(&self.root, 0u32)];
        while let Some((node, depth)) = stack.pop() {
            if node.children.is_empty() {
                let element = node.elements[0] as usize;
                if element >= p.len() {
                    return Err(Error::LengthMismatch { expected: p.len(), actual: element + 1 });
                }
                total += p.probs()[element] * f64::from(depth);
                seen += 1;
            } else {
                for child in &node.children {
                    stack.push((child, depth + 1));
                }
            }
        }
        if seen != p.len() {
            return Err(Error::LengthMismatch { expected: p.len(), actual: seen });
        }
        Ok(total)
    }
}

/// Builds the group-test plan for `q`: the canonical minimax code tree with
/// every node annotated by the elements beneath it.
pub fn group_test_plan(q: &Distribution) -> Result<GroupTestPlan> {
    let code = minimax_code(q)?;
    if q.len() == 1 {
        return Ok(GroupTestPlan { root: PlanNode { elements: vec![0], children: Vec::new() } });
    }
    let mut order: Vec<u32> = (0..q.len() as u32).collect();
    order.sort_unstable_by_key(|&i| (code.lengths()[i as usize], i));
    let depths: Vec<u32> = order.iter().map(|&i| code.lengths()[i as usize]).collect();
    let symbols: Vec<i64> = order.iter().map(|&i| i64::from(i)).collect();
    let tree = tree_from_sorted_depths(&depths, &symbols)?;

    // Assemble plan nodes children-first with an explicit postorder so deep
    // trees cannot overflow the stack.
    let mut built: Vec<Option<PlanNode>> = (0..tree.len()).map(|_| None).collect();
    let mut order_stack = vec![tree.root_id()];
    let mut postorder: Vec<NodeId> = Vec::with_capacity(tree.len());
    while let Some(id) = order_stack.pop() {
        postorder.push(id);
        order_stack.extend(tree.node(id).children());
    }
    for &id in postorder.iter().rev() {
        let node = tree.node(id);
        let plan = if node.is_leaf() {
            PlanNode { elements: vec![node.weight() as u32], children: Vec::new() }
        } else {
            let children: Vec<PlanNode> = node
                .children()
                .map(|c| built[c.index()].take().expect("postorder fills children first"))
                .collect();
            let mut elements = Vec::new();
            for child in &children {
                elements.extend_from_slice(&child.elements);
            }
            PlanNode { elements, children }
        };
        built[id.index()] = Some(plan);
    }
    let root = built[tree.root_id().index()].take().expect("root built last");
    Ok(GroupTestPlan { root })
}
