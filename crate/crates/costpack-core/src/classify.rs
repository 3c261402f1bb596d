//! Complexity classification of a cost function.
//!
//! The per-item price of a bin with `j` items is `F(j) = f(j)/j`. The
//! smallest cardinality minimizing `F` decides which solver applies:
//! `k = 1` and `k = 2` admit exact polynomial algorithms, `k >= 3` makes the
//! problem strongly NP-hard and calls for the approximation scheme.

use crate::instance::CostFunction;
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `k = 1`: singleton bins are optimal.
    PolyK1,
    /// `k = 2`: solvable exactly via matchings.
    PolyK2,
    /// `k >= 3`: strongly NP-hard.
    NpHard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Smallest cardinality minimizing `f(j)/j`.
    pub k: usize,
    pub verdict: Verdict,
    /// `F(1), ..., F(n)`.
    pub per_item_cost: Vec<Rat>,
}

/// `F(j) = f(j)/j` for `1 <= j <= n`.
pub fn average_cost(cost: &CostFunction, j: usize) -> Rat {
    assert!(j >= 1, "average cost needs cardinality >= 1");
    cost.at(j) / Rat::from_usize(j)
}

/// Scans `F` and returns the smallest minimizer with its verdict.
/// An empty instance (no cardinalities to compare) classifies as `k = 1`.
pub fn minimizer_k(cost: &CostFunction) -> Classification {
    let n = cost.max_cardinality();
    let per_item_cost: Vec<Rat> = (1..=n).map(|j| average_cost(cost, j)).collect();
    let mut k = 1usize;
    for j in 2..=n {
        if per_item_cost[j - 1] < per_item_cost[k - 1] {
            k = j;
        }
    }
    let verdict = match k {
        1 => Verdict::PolyK1,
        2 => Verdict::PolyK2,
        _ => Verdict::NpHard,
    };
    Classification { k, verdict, per_item_cost }
}
