//! Core tree representation shared by every builder.
//!
//! A minimax tree is a strictly binary tree whose leaves carry the input
//! weights and whose internal nodes weigh `max(children) + 1`. The root weight
//! is therefore `max_i(w_i + depth_i)`, and an optimal tree minimises it.
//!
//! Nodes live in an index-based arena ([`MinimaxTree`]); trees are immutable
//! once a builder returns them. Construction helpers that temporarily break
//! the weight invariant (leaf relabelling) are crate-private and always end
//! with a bottom-up recomputation pass.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

/// Weight domain required by the builders: a totally ordered value supporting
/// the `max(children) + 1` step and `weight + depth` sums.
///
/// Implemented for `i64` (exact arithmetic) and `f64` (finite values ordered
/// by `total_cmp`).
pub trait Weight: Copy + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn total_cmp(a: &Self, b: &Self) -> Ordering;
    /// The parent-weight step from the heavier child.
    fn plus_one(self) -> Self;
    /// `self + depth`, used when cross-checking root weights against depths.
    fn add_depth(self, depth: u32) -> Self;
    fn as_f64(self) -> f64;
    /// Equality up to `tol` for reals; exact for integers.
    fn approx_eq(a: Self, b: Self, tol: f64) -> bool;
    /// Placeholder value for arena slots that are recomputed afterwards.
    fn zero() -> Self;

    /// Checks a raw input multiset: nonempty, within the supported size, and
    /// every weight usable by the builders (finite reals; integers with
    /// enough headroom that internal weights `≤ max + n - 1` cannot
    /// overflow).
    fn validate_multiset(weights: &[Self]) -> Result<()>;

    fn max_of(a: Self, b: Self) -> Self {
        match Self::total_cmp(&a, &b) {
            Ordering::Less => b,
            _ => a,
        }
    }
}

impl Weight for i64 {
    fn total_cmp(a: &Self, b: &Self) -> Ordering {
        a.cmp(b)
    }

    fn plus_one(self) -> Self {
        self.checked_add(1).expect("integer weight overflow")
    }

    fn add_depth(self, depth: u32) -> Self {
        self.checked_add(i64::from(depth)).expect("integer weight overflow")
    }

    fn as_f64(self) -> f64 {
        self as f64
    }

    fn approx_eq(a: Self, b: Self, _tol: f64) -> bool {
        a == b
    }

    fn zero() -> Self {
        0
    }

    fn validate_multiset(weights: &[Self]) -> Result<()> {
        check_symbol_count(weights.len())?;
        let headroom = (weights.len() - 1) as i64;
        for (index, &w) in weights.iter().enumerate() {
            if w > i64::MAX - headroom || w < i64::MIN + headroom {
                return Err(Error::WeightOutOfRange { index });
            }
        }
        Ok(())
    }
}

impl Weight for f64 {
    fn total_cmp(a: &Self, b: &Self) -> Ordering {
        f64::total_cmp(a, b)
    }

    fn plus_one(self) -> Self {
        self + 1.0
    }

    fn add_depth(self, depth: u32) -> Self {
        self + f64::from(depth)
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn approx_eq(a: Self, b: Self, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn zero() -> Self {
        0.0
    }

    fn validate_multiset(weights: &[Self]) -> Result<()> {
        check_symbol_count(weights.len())?;
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
        }
        Ok(())
    }
}

/// Largest supported input size: arenas address nodes with `u32` ids and a
/// strictly binary tree has `2n - 1` of them.
pub const MAX_SYMBOLS: usize = (u32::MAX / 2) as usize;

fn check_symbol_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > MAX_SYMBOLS {
        return Err(Error::TooManySymbols { n, max: MAX_SYMBOLS });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Arena
// ---------------------------------------------------------------------------

/// Index of a node inside a [`MinimaxTree`] arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: u32) -> Self {
        NodeId(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn as_u32(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single arena node. Leaves have no children and remember the input
/// position of their weight; internal nodes have one or two children. A
/// single child only occurs in trees rebuilt from depth lists whose Kraft sum
/// is below one — the builders themselves always produce strictly binary
/// trees.
///
/// The two slots are packed: `a` holds the left child or a leaf tag, `b`
/// holds the right child, an absent-child marker, or the leaf's input
/// position. Sixteen bytes per node instead of thirty-two keeps the big
/// arena passes memory-lean, which the linear-scaling measurement notices.
#[derive(Clone, PartialEq)]
pub struct Node<W> {
    weight: W,
    a: u32,
    b: u32,
}

/// Tag in `a` marking a leaf; valid node ids stay below it.
const LEAF_TAG: u32 = u32::MAX;
/// Marker in `b` for a missing right child; valid node ids stay below it.
const NO_CHILD: u32 = u32::MAX;

impl<W: Weight> Node<W> {
    pub fn leaf(weight: W, leaf_index: u32) -> Self {
        debug_assert!(leaf_index < LEAF_TAG);
        Node { weight, a: LEAF_TAG, b: leaf_index }
    }

    pub fn internal(weight: W, left: NodeId, right: NodeId) -> Self {
        debug_assert!(left.0 < LEAF_TAG && right.0 < NO_CHILD);
        Node { weight, a: left.0, b: right.0 }
    }

    pub fn unary(weight: W, only_child: NodeId) -> Self {
        debug_assert!(only_child.0 < LEAF_TAG);
        Node { weight, a: only_child.0, b: NO_CHILD }
    }

    pub fn weight(&self) -> W {
        self.weight
    }

    pub fn is_leaf(&self) -> bool {
        self.a == LEAF_TAG
    }

    /// Input position of a leaf's weight; `None` for internal nodes.
    pub fn leaf_index(&self) -> Option<u32> {
        if self.a == LEAF_TAG {
            Some(self.b)
        } else {
            None
        }
    }

    pub fn left(&self) -> Option<NodeId> {
        if self.a == LEAF_TAG {
            None
        } else {
            Some(NodeId(self.a))
        }
    }

    pub fn right(&self) -> Option<NodeId> {
        if self.a == LEAF_TAG || self.b == NO_CHILD {
            None
        } else {
            Some(NodeId(self.b))
        }
    }

    pub fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.left().into_iter().chain(self.right())
    }
}

impl<W: fmt::Debug> fmt::Debug for Node<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == LEAF_TAG {
            write!(f, "Leaf({:?} @{})", self.weight, self.b)
        } else if self.b == NO_CHILD {
            write!(f, "Unary({:?}, {})", self.weight, self.a)
        } else {
            write!(f, "Internal({:?}, {}, {})", self.weight, self.a, self.b)
        }
    }
}

/// An immutable weighted binary tree in arena form.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxTree<W> {
    nodes: Vec<Node<W>>,
    root: NodeId,
    leaf_count: usize,
}

impl<W: Weight> MinimaxTree<W> {
    /// Single-leaf tree; the only shape where the root is a leaf.
    pub fn single_leaf(weight: W) -> Self {
        MinimaxTree { nodes: vec![Node::leaf(weight, 0)], root: NodeId(0), leaf_count: 1 }
    }

    pub(crate) fn from_arena_unchecked(nodes: Vec<Node<W>>, root: NodeId) -> Self {
        let leaf_count = nodes.iter().filter(|node| node.is_leaf()).count();
        MinimaxTree { nodes, root, leaf_count }
    }

    /// Assembles a tree from raw nodes. Checks that references are in bounds,
    /// that every non-root node has exactly one parent, and that all nodes
    /// are reachable from the root; it does not re-derive weights.
    pub fn from_parts(nodes: Vec<Node<W>>, root: NodeId) -> Result<Self> {
        let n = nodes.len();
        if n == 0 || root.index() >= n {
            return Err(Error::MalformedArena { node: root.0 });
        }
        let mut parents = vec![0u32; n];
        for (i, node) in nodes.iter().enumerate() {
            for c in node.children() {
                if c.index() >= n || c.index() == i {
                    return Err(Error::MalformedArena { node: i as u32 });
                }
                parents[c.index()] += 1;
            }
        }
        for (i, &p) in parents.iter().enumerate() {
            let expected = u32::from(i != root.index());
            if p != expected {
                return Err(Error::MalformedArena { node: i as u32 });
            }
        }
        // Reachability from the root rules out detached cycles.
        let mut seen = 0usize;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            seen += 1;
            stack.extend(nodes[id.index()].children());
        }
        if seen != n {
            return Err(Error::MalformedArena { node: root.0 });
        }
        let leaf_count = nodes.iter().filter(|node| node.is_leaf()).count();
        Ok(MinimaxTree { nodes, root, leaf_count })
    }

    pub fn nodes(&self) -> &[Node<W>] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node<W> {
        &self.nodes[id.index()]
    }

    pub fn root_id(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    /// The minimax cost `M`: the root weight, equal to
    /// `max_i(w_i + depth_i)` for a correctly built tree.
    pub fn cost(&self) -> W {
        self.nodes[self.root.index()].weight
    }

    /// Leaf depths listed by original input position.
    pub fn leaf_depths(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.leaf_count];
        self.for_each_node_depth(|node, depth| {
            if let Some(i) = node.leaf_index() {
                out[i as usize] = depth;
            }
        });
        out
    }

    /// Length of the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        let mut h = 0;
        self.for_each_node_depth(|_, depth| h = h.max(depth));
        h
    }

    /// Iterative depth-first walk; trees can be chains of length `n - 1`, so
    /// nothing here may recurse.
    fn for_each_node_depth(&self, mut f: impl FnMut(&Node<W>, u32)) {
        let mut stack = vec![(self.root, 0u32)];
        while let Some((id, depth)) = stack.pop() {
            let node = &self.nodes[id.index()];
            f(node, depth);
            for c in node.children() {
                stack.push((c, depth + 1));
            }
        }
    }

    /// Copies the tree shape, replacing each leaf weight by `f(leaf_index)`
    /// and recomputing internal weights bottom-up. Used to swap provisional
    /// integer weights for the real weights they stand for.
    pub fn map_leaf_weights<V: Weight>(&self, mut f: impl FnMut(u32) -> V) -> MinimaxTree<V> {
        let nodes = self
            .nodes
            .iter()
            .map(|node| Node {
                weight: match node.leaf_index() {
                    Some(i) => f(i),
                    None => V::zero(), // placeholder, recomputed below
                },
                a: node.a,
                b: node.b,
            })
            .collect();
        let mut tree = MinimaxTree { nodes, root: self.root, leaf_count: self.leaf_count };
        tree.recompute_internal_weights();
        tree
    }

    /// Overwrites one leaf in place. Callers must finish with
    /// [`MinimaxTree::recompute_internal_weights`].
    pub(crate) fn set_leaf(&mut self, id: NodeId, weight: W, leaf_index: u32) {
        let node = &mut self.nodes[id.index()];
        debug_assert!(node.is_leaf());
        node.weight = weight;
        node.b = leaf_index;
    }

    /// Rederives every internal weight as `max(children) + 1`.
    ///
    /// Builder-produced arenas list children before parents, which allows a
    /// single in-order pass; otherwise an explicit post-order traversal runs.
    pub(crate) fn recompute_internal_weights(&mut self) {
        let children_first = self
            .nodes
            .iter()
            .enumerate()
            .all(|(i, node)| node.children().all(|c| c.index() < i));
        if children_first {
            for i in 0..self.nodes.len() {
                if let Some(w) = self.internal_weight_of(i) {
                    self.nodes[i].weight = w;
                }
            }
        } else {
            for i in self.postorder() {
                if let Some(w) = self.internal_weight_of(i) {
                    self.nodes[i].weight = w;
                }
            }
        }
    }

    fn internal_weight_of(&self, i: usize) -> Option<W> {
        let node = &self.nodes[i];
        let mut kids = node.children();
        let first = kids.next()?;
        let mut w = self.nodes[first.index()].weight;
        for c in kids {
            w = W::max_of(w, self.nodes[c.index()].weight);
        }
        Some(w.plus_one())
    }

    fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            order.push(id.index());
            stack.extend(self.nodes[id.index()].children());
        }
        order.reverse();
        order
    }

    /// Checks every structural and weight invariant against the input
    /// multiset and reports all violations found (empty means valid).
    pub fn validate(&self, input: &[W]) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = input.len();
        if self.leaf_count != n {
            out.push(Violation::LeafCountMismatch { expected: n, actual: self.leaf_count });
        }

        let mut index_seen = vec![false; n];
        let mut max_depth = 0u32;
        let mut max_leaf_sum: Option<W> = None;
        self.for_each_node_depth(|node, depth| {
            max_depth = max_depth.max(depth);
            if node.is_leaf() {
                match node.leaf_index() {
                    None => out.push(Violation::LeafWithoutIndex),
                    Some(i) => {
                        let idx = i as usize;
                        if idx >= n || index_seen[idx] {
                            out.push(Violation::BadLeafIndex { index: i });
                        } else {
                            index_seen[idx] = true;
                            if W::total_cmp(&node.weight, &input[idx]) != Ordering::Equal {
                                out.push(Violation::LeafWeightMismatch { index: i });
                            }
                        }
                    }
                }
                let sum = node.weight.add_depth(depth);
                max_leaf_sum = Some(match max_leaf_sum {
                    None => sum,
                    Some(m) => W::max_of(m, sum),
                });
            } else if node.right().is_none() {
                out.push(Violation::UnaryNode);
            }
        });

        // Internal weights must equal max(children) + 1 exactly: that is how
        // they are computed, so even for reals no tolerance applies.
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(w) = self.internal_weight_of(i) {
                if W::total_cmp(&w, &node.weight) != Ordering::Equal {
                    out.push(Violation::WrongInternalWeight { node: i as u32 });
                }
            }
        }

        if n > 1 && max_depth > (n - 1) as u32 {
            out.push(Violation::ExcessiveHeight { height: max_depth, max: (n - 1) as u32 });
        }

        // Root weight vs the independent max(w_i + depth_i). The two sides
        // associate float additions differently, hence the small tolerance.
        if let Some(m) = max_leaf_sum {
            if !W::approx_eq(m, self.cost(), COST_CROSS_CHECK_TOL) {
                out.push(Violation::RootCostMismatch {
                    root: self.cost().as_f64(),
                    recomputed: m.as_f64(),
                });
            }
        }
        out
    }
}

/// Absolute tolerance when cross-checking a real root weight against the
/// independently recomputed `max_i(w_i + depth_i)`; integer trees compare
/// exactly regardless.
pub const COST_CROSS_CHECK_TOL: f64 = 1e-9;

/// A single invariant violation found by [`MinimaxTree::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LeafCountMismatch { expected: usize, actual: usize },
    LeafWithoutIndex,
    BadLeafIndex { index: u32 },
    LeafWeightMismatch { index: u32 },
    UnaryNode,
    WrongInternalWeight { node: u32 },
    ExcessiveHeight { height: u32, max: u32 },
    RootCostMismatch { root: f64, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LeafCountMismatch { expected, actual } => {
                write!(f, "expected {expected} leaves, found {actual}")
            }
            Violation::LeafWithoutIndex => write!(f, "leaf carries no input index"),
            Violation::BadLeafIndex { index } => {
                write!(f, "leaf index {index} out of range or repeated")
            }
            Violation::LeafWeightMismatch { index } => {
                write!(f, "leaf weight differs from input weight {index}")
            }
            Violation::UnaryNode => write!(f, "internal node with a single child"),
            Violation::WrongInternalWeight { node } => {
                write!(f, "internal node {node} is not max(children) + 1")
            }
            Violation::ExcessiveHeight { height, max } => {
                write!(f, "height {height} exceeds n - 1 = {max}")
            }
            Violation::RootCostMismatch { root, recomputed } => {
                write!(f, "root weight {root} != max(w + depth) = {recomputed}")
            }
        }
    }
}
