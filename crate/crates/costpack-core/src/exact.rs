//! Exact polynomial solvers for instances whose per-item cost minimizer is
//! 1 or 2.
//!
//! When the minimizer is 1, every optimal packing can be rearranged into
//! singletons at no extra cost. When it is 2, an optimal packing exists in a
//! narrow shape: some singletons holding the largest items, at most one bin
//! of odd cardinality at least 3, and pairs everywhere else; the pairs can
//! be taken from a maximum-weight matching.

use crate::classify::minimizer_k;
use crate::error::SolveError;
use crate::instance::Instance;
use crate::matching::{max_weight_matching_exact_size, MatchingGraph};
use crate::packing::{packing_cost, Packing};
use crate::rational::Rat;

/// Bin-count shape tried by the `k = 2` solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct K2Guess {
    /// Number of singleton bins (taking the largest items).
    pub singletons: usize,
    /// Cardinality of the single odd bin; 0 when absent, otherwise odd >= 3.
    pub odd_bin: usize,
    /// Number of pair bins.
    pub pairs: usize,
}

impl K2Guess {
    fn cost(&self, inst: &Instance) -> Rat {
        Rat::from_usize(self.singletons) * inst.cost().at(1)
            + inst.cost().at(self.odd_bin)
            + Rat::from_usize(self.pairs) * inst.cost().at(2)
    }
}

fn check_class(inst: &Instance, expected: usize, force: bool) -> Result<(), SolveError> {
    if force {
        return Ok(());
    }
    let found = minimizer_k(inst.cost()).k;
    if found != expected {
        return Err(SolveError::WrongClass { expected, found });
    }
    Ok(())
}

/// Optimal packing when singletons are (weakly) the cheapest shape: one bin
/// per item. `force` skips the class check.
pub fn solve_k1(inst: &Instance, force: bool) -> Result<(Packing, Rat), SolveError> {
    check_class(inst, 1, force)?;
    let mut packing = Packing {
        bins: (1..=inst.n()).map(|id| vec![id]).collect(),
    };
    packing.canonicalize();
    let cost = packing_cost(inst, &packing);
    Ok((packing, cost))
}

/// Optimal packing when pairs are the cheapest shape. Enumerates all
/// `(singletons, odd bin, pairs)` shapes in ascending cost order and returns
/// the first one that admits a feasible packing; feasibility of the pair
/// part reduces to an exact-size maximum-weight matching. `force` skips the
/// class check.
pub fn solve_k2(inst: &Instance, force: bool) -> Result<(Packing, Rat, K2Guess), SolveError> {
    check_class(inst, 2, force)?;
    let n = inst.n();
    if n == 0 {
        let guess = K2Guess { singletons: 0, odd_bin: 0, pairs: 0 };
        return Ok((Packing { bins: Vec::new() }, Rat::zero(), guess));
    }

    let mut guesses = Vec::new();
    for singletons in 0..=n {
        let remaining = n - singletons;
        let odd_options = std::iter::once(0).chain((3..=remaining).step_by(2));
        for odd_bin in odd_options {
            let rest = remaining - odd_bin;
            if !rest.is_multiple_of(2) {
                continue;
            }
            guesses.push(K2Guess { singletons, odd_bin, pairs: rest / 2 });
        }
    }
    // Stable sort keeps enumeration order among equal-cost guesses, so the
    // result is deterministic.
    let mut ranked: Vec<(Rat, K2Guess)> =
        guesses.into_iter().map(|g| (g.cost(inst), g)).collect();
    ranked.sort_by(|a, b| a.0.cmp(&b.0));

    let order = inst.ids_by_size_desc();
    for (cost, guess) in ranked {
        if let Some(packing) = try_guess(inst, &order, guess) {
            debug_assert_eq!(packing_cost(inst, &packing), cost);
            return Ok((packing, cost, guess));
        }
    }
    unreachable!("the all-singletons shape is always feasible");
}

/// Attempts to realize one shape; `order` is the item ids sorted by
/// descending size.
fn try_guess(inst: &Instance, order: &[usize], guess: K2Guess) -> Option<Packing> {
    let single_ids = &order[..guess.singletons];
    let rest_ids = &order[guess.singletons..];
    let rest_items = inst.items_with_ids(rest_ids);

    let graph = MatchingGraph::from_items(&rest_items);
    let matching = max_weight_matching_exact_size(&graph, guess.pairs)?;

    let mut bins: Vec<Vec<usize>> = Vec::new();
    for &id in single_ids {
        bins.push(vec![id]);
    }
    let mut matched = std::collections::BTreeSet::new();
    for &(a, b) in &matching.edges {
        debug_assert!(inst.size_of(a) + inst.size_of(b) <= Rat::one());
        bins.push(vec![a, b]);
        matched.insert(a);
        matched.insert(b);
    }
    let leftover: Vec<usize> = rest_ids.iter().copied().filter(|id| !matched.contains(id)).collect();
    debug_assert_eq!(leftover.len(), guess.odd_bin);
    if !leftover.is_empty() {
        let total: Rat = leftover.iter().map(|&id| inst.size_of(id)).sum();
        if total > Rat::one() {
            return None;
        }
        bins.push(leftover);
    }
    let mut packing = Packing { bins };
    packing.canonicalize();
    Some(packing)
}
