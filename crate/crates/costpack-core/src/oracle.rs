//! Ground-truth reference solvers.
//!
//! [`brute_force_opt`] finds a true optimum by dynamic programming over item
//! subsets; it is the yardstick every other solver is measured against in
//! tests. [`greedy_baseline`] is a cheap feasible heuristic used as an
//! initial upper bound and as a sanity reference in benchmarks.

use crate::classify::minimizer_k;
use crate::error::SolveError;
use crate::instance::Instance;
use crate::packing::{packing_cost, Packing};
use crate::rational::Rat;

/// Largest instance the oracle accepts unless the caller raises the limit.
/// The subset dynamic program touches `3^n` (bin, remainder) pairs.
pub const DEFAULT_ORACLE_LIMIT: usize = 12;

/// Exact optimum by dynamic programming over subsets: for every item subset,
/// the cheapest packing of that subset, built by splitting off the bin that
/// contains the subset's lowest-id item. Errors with
/// [`SolveError::TooLarge`] when `n` exceeds `limit`.
pub fn brute_force_opt(
    inst: &Instance,
    limit: Option<usize>,
) -> Result<(Packing, Rat), SolveError> {
    let n = inst.n();
    let limit = limit.unwrap_or(DEFAULT_ORACLE_LIMIT);
    if n > limit {
        return Err(SolveError::TooLarge { n, limit });
    }
    if n == 0 {
        return Ok((Packing::default(), Rat::zero()));
    }

    let full: usize = (1 << n) - 1;
    // size_sum[mask] and feasible[mask] for every subset.
    let mut size_sum: Vec<Rat> = Vec::with_capacity(full + 1);
    size_sum.push(Rat::zero());
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let s = &size_sum[rest] + inst.size_of(low + 1);
        size_sum.push(s);
    }
    let feasible: Vec<bool> = size_sum.iter().map(|s| *s <= Rat::one()).collect();

    // best[mask]: cheapest cost packing exactly the items of `mask`;
    // choice[mask]: the bin containing the lowest-id item of `mask`.
    let mut best: Vec<Option<Rat>> = vec![None; full + 1];
    let mut choice: Vec<usize> = vec![0; full + 1];
    best[0] = Some(Rat::zero());
    for mask in 1..=full {
        let low_bit = mask & mask.wrapping_neg();
        let rest = mask ^ low_bit;
        // Ascending enumeration of submasks of `rest`; first strict
        // improvement wins, so ties resolve deterministically.
        let mut sub = 0usize;
        loop {
            let bin = sub | low_bit;
            if feasible[bin] {
                let remainder = rest ^ sub;
                if let Some(rem_cost) = &best[remainder] {
                    let cand = inst.cost().at(bin.count_ones() as usize) + rem_cost;
                    let improves = match &best[mask] {
                        None => true,
                        Some(cur) => cand < *cur,
                    };
                    if improves {
                        best[mask] = Some(cand);
                        choice[mask] = bin;
                    }
                }
            }
            if sub == rest {
                break;
            }
            sub = (sub.wrapping_sub(rest)) & rest;
        }
    }

    let cost = best[full]
        .clone()
        .ok_or_else(|| SolveError::Internal("no packing found for full item set".into()))?;
    let mut bins = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let bin_mask = choice[mask];
        let ids: Vec<usize> = (0..n).filter(|i| bin_mask & (1 << i) != 0).map(|i| i + 1).collect();
        bins.push(ids);
        mask ^= bin_mask;
    }
    let mut packing = Packing::new(bins);
    packing.canonicalize();
    debug_assert_eq!(packing_cost(inst, &packing), cost);
    Ok((packing, cost))
}

/// First-fit baseline: items by size descending (ties by id), each placed in
/// the first bin with room that still has fewer than `k*` items, where `k*`
/// is the classified per-item cost minimizer. Always feasible, never claimed
/// optimal.
pub fn greedy_baseline(inst: &Instance) -> (Packing, Rat) {
    let cap = minimizer_k(inst.cost()).k.max(1);
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut residual: Vec<Rat> = Vec::new();
    for id in inst.ids_by_size_desc() {
        let size = inst.size_of(id);
        let slot = (0..bins.len()).find(|&i| bins[i].len() < cap && residual[i] >= *size);
        match slot {
            Some(i) => {
                bins[i].push(id);
                residual[i] -= size;
            }
            None => {
                bins.push(vec![id]);
                residual.push(Rat::one() - size);
            }
        }
    }
    let mut packing = Packing::new(bins);
    packing.canonicalize();
    let cost = packing_cost(inst, &packing);
    (packing, cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;
    use crate::packing::verify_packing;
    use crate::rational::rat;

    fn inst(sizes: Vec<Rat>, cost: Vec<Rat>) -> Instance {
        validate_instance(sizes, cost).unwrap()
    }

    #[test]
    fn flat_cost_minimizes_bin_count() {
        // Three half-size items, flat cost: two bins, cost 2.
        let inst = inst(
            vec![rat(1, 2), rat(1, 2), rat(1, 2)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 1)],
        );
        let (packing, cost) = brute_force_opt(&inst, None).unwrap();
        assert!(verify_packing(&inst, &packing).is_ok());
        assert_eq!(cost, rat(2, 1));
        assert_eq!(packing.bin_count(), 2);
        // Among tied optima the smallest bin for item 1 is kept.
        assert_eq!(packing.bins, vec![vec![1], vec![2, 3]]);
    }

    #[test]
    fn linear_cost_makes_everything_optimal() {
        let inst = inst(
            vec![rat(1, 2), rat(1, 3), rat(1, 6)],
            vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1)],
        );
        let (packing, cost) = brute_force_opt(&inst, None).unwrap();
        assert!(verify_packing(&inst, &packing).is_ok());
        assert_eq!(cost, rat(3, 1));
    }

    #[test]
    fn zero_size_items_share_a_bin() {
        let inst = inst(
            vec![rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        );
        let (packing, cost) = brute_force_opt(&inst, None).unwrap();
        assert_eq!(cost, rat(1, 1));
        assert_eq!(packing.bins, vec![vec![1, 2]]);
    }

    #[test]
    fn respects_size_limit() {
        let sizes = vec![rat(1, 100); 13];
        let mut cost = vec![rat(0, 1)];
        cost.extend((1..=13).map(|j| rat(j, 1)));
        let inst = inst(sizes, cost);
        assert_eq!(
            brute_force_opt(&inst, None).unwrap_err(),
            SolveError::TooLarge { n: 13, limit: 12 }
        );
        assert!(brute_force_opt(&inst, Some(13)).is_ok());
    }

    #[test]
    fn empty_instance() {
        let inst = inst(Vec::new(), vec![rat(0, 1)]);
        let (packing, cost) = brute_force_opt(&inst, None).unwrap();
        assert!(packing.bins.is_empty());
        assert!(cost.is_zero());
        let (gp, gc) = greedy_baseline(&inst);
        assert!(gp.bins.is_empty());
        assert!(gc.is_zero());
    }

    #[test]
    fn greedy_caps_cardinality_at_the_minimizer() {
        // k* = 4, four items of 1/2: cap allows 4 per bin but sizes allow 2.
        let inst = inst(
            vec![rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)],
        );
        let (packing, cost) = greedy_baseline(&inst);
        assert!(verify_packing(&inst, &packing).is_ok());
        assert_eq!(cost, rat(2, 1));
        assert_eq!(packing.bins, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn greedy_respects_k1_cap() {
        // Convex cost: k* = 1, so greedy packs singletons even though sizes fit.
        let inst = inst(
            vec![rat(1, 4), rat(1, 4)],
            vec![rat(0, 1), rat(1, 1), rat(3, 1)],
        );
        let (packing, _) = greedy_baseline(&inst);
        assert_eq!(packing.bins, vec![vec![1], vec![2]]);
    }

    /// All set partitions of `1..=n` (test-only cross-check).
    fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        fn rec(next: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
            if next > n {
                out.push(current.clone());
                return;
            }
            for i in 0..current.len() {
                current[i].push(next);
                rec(next + 1, n, current, out);
                current[i].pop();
            }
            current.push(vec![next]);
            rec(next + 1, n, current, out);
            current.pop();
        }
        let mut out = Vec::new();
        rec(1, n, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn agrees_with_partition_enumeration() {
        let cases = vec![
            (
                vec![rat(2, 5), rat(3, 5), rat(1, 5), rat(1, 2), rat(1, 10)],
                vec![rat(0, 1), rat(1, 1), rat(3, 2), rat(8, 5), rat(2, 1), rat(2, 1)],
            ),
            (
                vec![rat(1, 3), rat(1, 3), rat(1, 3), rat(2, 3)],
                vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)],
            ),
            (
                vec![rat(0, 1), rat(1, 1), rat(1, 2), rat(1, 2)],
                vec![rat(0, 1), rat(1, 1), rat(5, 4), rat(9, 4), rat(4, 1)],
            ),
        ];
        for (sizes, cost_table) in cases {
            let inst = inst(sizes, cost_table);
            let (packing, cost) = brute_force_opt(&inst, None).unwrap();
            assert!(verify_packing(&inst, &packing).is_ok());
            let mut best: Option<Rat> = None;
            for partition in all_partitions(inst.n()) {
                let ok = partition.iter().all(|bin| {
                    bin.iter().map(|&id| inst.size_of(id)).sum::<Rat>() <= Rat::one()
                });
                if !ok {
                    continue;
                }
                let c = packing_cost(&inst, &Packing::new(partition));
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
            assert_eq!(Some(cost), best);
        }
    }
}
