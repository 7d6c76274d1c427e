//! Minimax trees and the prefix codes they induce.
//!
//! A minimax tree for a weight multiset `{w_1, …, w_n}` is a strictly
//! binary tree with one leaf per weight, each internal node carrying one
//! plus the larger of its children's weights, built so the root weight —
//! equivalently `max_i(w_i + depth_i)` — is as small as possible. This
//! crate constructs such trees in worst-case linear time for integer
//! weights ([`build_minimax_int`]) and, given sorted input, for real
//! weights ([`build_minimax_real`]), alongside an `O(n log n)` heap-based
//! reference ([`build_minimax_heap`]).
//!
//! On top of the builders sit the classic reductions: prefix codes whose
//! worst-case pointwise redundancy against a target distribution is
//! minimal ([`coding::minimax_code`]), Shannon and Huffman codes for
//! comparison, and group-testing strategies whose worst case accounts for
//! the tested items' probabilities ([`coding::group_test_plan`]).
//!
//! The [`oracle`] module holds deliberately slow brute-force
//! implementations, and [`verify`] sweeps the fast paths against them —
//! exhaustively for small integer multisets, randomised elsewhere. The
//! sweeps run on a rayon pool when the `parallel` feature (on by default)
//! is enabled.

pub mod coding;
pub mod error;
pub mod integer;
pub mod kraft;
pub mod oracle;
pub mod real;
pub mod select;
pub mod tree;
pub mod verify;

pub use coding::{
    group_test_plan, huffman_code, minimax_code, redundancy_report, shannon_code, Distribution,
    GroupTestPlan, PlanNode, PrefixCode, RedundancyReport,
};
pub use error::{Error, Result};
pub use integer::{build_minimax_heap, build_minimax_int};
pub use kraft::{check_kraft_depths, tree_from_sorted_depths, FixedPointFraction};
pub use real::build_minimax_real;
pub use tree::{MinimaxTree, Node, NodeId, Violation, Weight, MAX_SYMBOLS};
pub use verify::{Parallelism, SuiteReport};
