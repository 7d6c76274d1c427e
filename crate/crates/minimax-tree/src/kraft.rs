//! Kraft-inequality machinery.
//!
//! [`FixedPointFraction`] is an exact dyadic accumulator: a fixed-width
//! binary fraction plus a whole-unit counter, stored as machine words. It
//! supports adding `2^(-k)`, merging, resetting, and a nondestructive
//! "does a pair sum to at most one" test — everything the threshold search
//! needs, with no rounding anywhere.
//!
//! The module also hosts the two depth-profile entry points:
//! [`check_kraft_depths`] (is `Σ 2^(-ℓ_i) ≤ 1`?) and
//! [`tree_from_sorted_depths`] (rebuild the canonical tree realising a
//! Kraft-satisfying profile).

use crate::error::{Error, Result};
use crate::tree::{MinimaxTree, Node, NodeId, Weight};

/// An exact binary fraction with `capacity_bits` fractional bits plus a
/// count of accumulated whole units. Bit `k` (1-indexed from the binary
/// point) has value `2^(-k)`; a carry out of bit 1 increments
/// `overflow_units`. All arithmetic is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointFraction {
    /// Little-endian words of the `capacity_bits`-bit numerator: fraction
    /// bit `k` lives at word-bit position `capacity_bits - k`.
    limbs: Vec<u64>,
    capacity_bits: u32,
    overflow_units: u64,
    /// Word visits spent in `add_pow2` carry chains (amortization counter).
    carry_steps: u64,
}

impl FixedPointFraction {
    /// A zero fraction able to hold exponents `1 ..= capacity_bits`.
    pub fn new(capacity_bits: u32) -> Self {
        assert!(capacity_bits >= 1, "capacity must be at least one bit");
        let words = (capacity_bits as usize).div_ceil(64);
        FixedPointFraction {
            limbs: vec![0; words],
            capacity_bits,
            overflow_units: 0,
            carry_steps: 0,
        }
    }

    pub fn capacity_bits(&self) -> u32 {
        self.capacity_bits
    }

    pub fn overflow_units(&self) -> u64 {
        self.overflow_units
    }

    /// Raw fraction words, least significant first. Exposed so reference
    /// implementations can compare state bit for bit.
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Cumulative carry-chain work performed by [`FixedPointFraction::add_pow2`],
    /// in word visits. Not affected by merges or resets.
    pub fn carry_steps(&self) -> u64 {
        self.carry_steps
    }

    pub fn is_zero(&self) -> bool {
        self.overflow_units == 0 && self.limbs.iter().all(|&w| w == 0)
    }

    /// Valid bits of the top word: low `capacity % 64` bits, or all 64 when
    /// the capacity is word-aligned.
    fn top_mask(&self) -> u64 {
        match self.capacity_bits % 64 {
            0 => u64::MAX,
            b => (1u64 << b) - 1,
        }
    }

    /// Moves any bits above the capacity out of the top word and into
    /// `overflow_units`. O(1).
    fn normalize_top(&mut self) {
        let mask = self.top_mask();
        if mask != u64::MAX {
            let top = self.limbs.last_mut().expect("at least one limb");
            self.overflow_units += *top >> (self.capacity_bits % 64);
            *top &= mask;
        }
    }

    /// Adds `2^(-k)` exactly. Amortized O(1): the carry chain is paid for by
    /// the bits it clears (the binary-counter argument), which the
    /// `carry_steps` counter makes observable.
    pub fn add_pow2(&mut self, k: u32) -> Result<()> {
        if k == 0 || k > self.capacity_bits {
            return Err(Error::ExponentOutOfRange { exponent: k, capacity: self.capacity_bits });
        }
        let pos = self.capacity_bits - k;
        let mut word = (pos / 64) as usize;
        let mut addend = 1u64 << (pos % 64);
        loop {
            self.carry_steps += 1;
            let (sum, overflowed) = self.limbs[word].overflowing_add(addend);
            self.limbs[word] = sum;
            if !overflowed {
                break;
            }
            word += 1;
            addend = 1;
            if word == self.limbs.len() {
                // Carry out of a word-aligned top word is a whole unit.
                self.overflow_units += 1;
                return Ok(());
            }
        }
        // A non-aligned top word never overflows at the word level; any
        // bits that crossed the capacity boundary become units here.
        self.normalize_top();
        Ok(())
    }

    /// Adds one whole unit; the depth-0 case (`2^(-0)`) of depth sums.
    pub fn add_unit(&mut self) {
        self.overflow_units += 1;
    }

    /// Adds `src` into `self`, exactly. One wordwise pass; the inter-word
    /// carry never exceeds one.
    pub fn merge(&mut self, src: &FixedPointFraction) -> Result<()> {
        if self.capacity_bits != src.capacity_bits {
            return Err(Error::CapacityMismatch {
                left: self.capacity_bits,
                right: src.capacity_bits,
            });
        }
        let mut carry = 0u64;
        for (dst, &s) in self.limbs.iter_mut().zip(&src.limbs) {
            let (sum, c1) = dst.overflowing_add(s);
            let (sum, c2) = sum.overflowing_add(carry);
            *dst = sum;
            carry = u64::from(c1 || c2);
        }
        self.overflow_units += carry + src.overflow_units;
        self.normalize_top();
        Ok(())
    }

    /// Zeroes the value. Carries no tricks: every word is cleared eagerly.
    pub fn reset(&mut self) {
        self.limbs.fill(0);
        self.overflow_units = 0;
    }

    /// Is the value at most one?
    pub fn at_most_one(&self) -> bool {
        match self.overflow_units {
            0 => true,
            1 => self.limbs.iter().all(|&w| w == 0),
            _ => false,
        }
    }

    /// Exact test of `value(self) + value(other) ≤ 1` without modifying
    /// either operand or allocating: a single low-to-high pass with a
    /// one-bit carry and one word of scratch.
    pub fn pair_at_most_one(&self, other: &FixedPointFraction) -> Result<bool> {
        if self.capacity_bits != other.capacity_bits {
            return Err(Error::CapacityMismatch {
                left: self.capacity_bits,
                right: other.capacity_bits,
            });
        }
        let top = self.limbs.len() - 1;
        let mask = self.top_mask();
        let mut carry = 0u64;
        let mut fraction_nonzero = false;
        for i in 0..=top {
            let (sum, c1) = self.limbs[i].overflowing_add(other.limbs[i]);
            let (sum, c2) = sum.overflowing_add(carry);
            if i == top && mask != u64::MAX {
                // Both operands keep their top word within the mask, so the
                // word-level adds cannot overflow; the unit carry is
                // whatever crossed the capacity boundary.
                carry = sum >> (self.capacity_bits % 64);
                fraction_nonzero |= sum & mask != 0;
            } else {
                carry = u64::from(c1 || c2);
                fraction_nonzero |= sum != 0;
            }
        }
        let units = self.overflow_units + other.overflow_units + carry;
        Ok(units == 0 || (units == 1 && !fraction_nonzero))
    }
}

/// Exact value of a fraction as a big-integer numerator over
/// `2^capacity_bits`; the reference form used by debug invariant checks and
/// oracle-side comparisons.
pub(crate) fn numerator_of(f: &FixedPointFraction) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    let mut value = BigUint::from(f.overflow_units) << f.capacity_bits;
    for (i, &limb) in f.limbs.iter().enumerate() {
        value += BigUint::from(limb) << (64 * i);
    }
    value
}

/// Exact test of `Σ_i 2^(-d_i) ≤ 1` over a depth multiset. Depth zero counts
/// as a whole unit. An empty multiset sums to zero, hence `true`.
pub fn check_kraft_depths(depths: &[u32]) -> bool {
    let capacity = depths.iter().copied().max().unwrap_or(0).max(1);
    let mut sum = FixedPointFraction::new(capacity);
    for &d in depths {
        if d == 0 {
            sum.add_unit();
        } else {
            sum.add_pow2(d).expect("capacity covers every depth");
        }
        if !sum.at_most_one() {
            return false;
        }
    }
    sum.at_most_one()
}

/// Builds the canonical ("leftmost placement") binary tree whose leaves,
/// left to right, have exactly the given depths and weights. Input depths
/// must be nondecreasing and satisfy the Kraft inequality; when the sum is
/// strictly below one the tree contains single-child nodes on its right
/// spine. Leaf `j` of the input becomes `leaf_index` `j`.
pub fn tree_from_sorted_depths<W: Weight>(depths: &[u32], weights: &[W]) -> Result<MinimaxTree<W>> {
    if depths.is_empty() {
        return Err(Error::EmptyInput);
    }
    if depths.len() != weights.len() {
        return Err(Error::LengthMismatch { expected: depths.len(), actual: weights.len() });
    }
    if depths.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::NotSorted);
    }
    if !check_kraft_depths(depths) {
        return Err(Error::KraftViolation);
    }
    if depths.len() == 1 && depths[0] == 0 {
        return Ok(MinimaxTree::single_leaf(weights[0]));
    }

    // Internal nodes under construction; children are filled in as leaves
    // arrive, then everything is converted to an arena in one pass.
    #[derive(Default)]
    struct Proto {
        left: Option<u32>,
        right: Option<u32>,
    }
    let mut protos: Vec<Proto> = vec![Proto::default()];
    // Leaves by arena slot: (slot, input position). Slots >= protos.len()
    // later on are leaf slots; we keep the two pools separate and renumber
    // at the end, so `u32` ids here are "proto pool" (< LEAF_BASE) or "leaf
    // pool" (>= LEAF_BASE).
    const LEAF_BASE: u32 = 1 << 31;
    let mut leaves: Vec<u32> = Vec::with_capacity(depths.len());
    // Path of internal nodes from the root to the current insertion point;
    // `spine[i]` sits at depth `i`, and every node on it has a free slot.
    let mut spine: Vec<u32> = vec![0];

    let attach = |protos: &mut Vec<Proto>, parent: u32, child: u32| {
        let p = &mut protos[parent as usize];
        debug_assert!(p.right.is_none());
        if p.left.is_none() {
            p.left = Some(child);
        } else {
            p.right = Some(child);
        }
    };

    for (j, &d) in depths.iter().enumerate() {
        debug_assert!(d >= 1, "depth 0 beyond n = 1 fails the Kraft check");
        while (spine.len() as u32) < d {
            let parent = *spine.last().expect("Kraft bound keeps the spine nonempty");
            let id = protos.len() as u32;
            protos.push(Proto::default());
            attach(&mut protos, parent, id);
            spine.push(id);
        }
        let parent = spine[d as usize - 1];
        let leaf_id = LEAF_BASE + j as u32;
        leaves.push(leaf_id);
        attach(&mut protos, parent, leaf_id);
        while let Some(&top) = spine.last() {
            if protos[top as usize].right.is_some() {
                spine.pop();
            } else {
                break;
            }
        }
    }

    // Renumber: leaves first (so leaf j occupies slot j), protos after.
    let leaf_count = leaves.len() as u32;
    let slot_of = |id: u32| -> NodeId {
        if id >= LEAF_BASE {
            NodeId::new(id - LEAF_BASE)
        } else {
            NodeId::new(leaf_count + id)
        }
    };
    let mut nodes: Vec<Node<W>> = (0..leaf_count as usize)
        .map(|j| Node::leaf(weights[j], j as u32))
        .collect();
    for proto in &protos {
        nodes.push(match (proto.left, proto.right) {
            (Some(l), Some(r)) => Node::internal(W::zero(), slot_of(l), slot_of(r)),
            (Some(l), None) => Node::unary(W::zero(), slot_of(l)),
            _ => unreachable!("every created internal node received a child"),
        });
    }
    let mut tree = MinimaxTree::from_arena_unchecked(nodes, slot_of(0));
    tree.recompute_internal_weights();
    Ok(tree)
}
