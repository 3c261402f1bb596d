//! Maximum-weight matchings of a prescribed size.
//!
//! The `k = 2` solver needs, for each guess, a maximum-weight matching with
//! an exact number of edges on the "pair up these items" graph. The solver
//! here is a memoized dynamic program over node subsets: exact, simple, and
//! comfortably fast for the intended scale (at most roughly 22 nodes; the
//! state space is exponential beyond that).

use std::collections::HashMap;

use crate::instance::Item;
use crate::rational::Rat;

/// An undirected weighted graph on item ids; no self-loops, no parallel
/// edges.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    /// Item ids in ascending order; positions index the adjacency matrix.
    pub node_ids: Vec<usize>,
    adjacency: Vec<Vec<Option<Rat>>>,
}

impl MatchingGraph {
    /// Builds a graph from explicit edges given as `(id, id, weight)`.
    pub fn new(mut node_ids: Vec<usize>, edges: Vec<(usize, usize, Rat)>) -> Self {
        node_ids.sort_unstable();
        node_ids.dedup();
        let pos: HashMap<usize, usize> =
            node_ids.iter().enumerate().map(|(p, &id)| (id, p)).collect();
        let n = node_ids.len();
        let mut adjacency = vec![vec![None; n]; n];
        for (a, b, w) in edges {
            assert!(a != b, "self-loop on node {a}");
            let (pa, pb) = (pos[&a], pos[&b]);
            debug_assert!(adjacency[pa][pb].is_none(), "parallel edge {a}-{b}");
            adjacency[pa][pb] = Some(w.clone());
            adjacency[pb][pa] = Some(w);
        }
        MatchingGraph { node_ids, adjacency }
    }

    /// The pairing graph of a set of items: an edge joins two items whose
    /// sizes fit one bin together, weighted by the size they cover.
    pub fn from_items(items: &[Item]) -> Self {
        let mut edges = Vec::new();
        for (i, a) in items.iter().enumerate() {
            for b in items.iter().skip(i + 1) {
                let total = &a.size + &b.size;
                if total <= Rat::one() {
                    edges.push((a.id, b.id, total));
                }
            }
        }
        MatchingGraph::new(items.iter().map(|it| it.id).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    fn weight_at(&self, i: usize, j: usize) -> Option<&Rat> {
        self.adjacency[i][j].as_ref()
    }
}

/// A matching as `(smaller id, larger id)` edges, sorted, with total weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
    pub weight: Rat,
}

/// Per-subset table: entry `t` is the best weight of a matching with exactly
/// `t` edges inside the subset, or `None` when no such matching exists.
type Layer = Vec<Option<Rat>>;

struct Solver<'g> {
    graph: &'g MatchingGraph,
    memo: HashMap<u64, Layer>,
}

impl<'g> Solver<'g> {
    fn best(&mut self, mask: u64) -> &Layer {
        if !self.memo.contains_key(&mask) {
            let layer = self.compute(mask);
            self.memo.insert(mask, layer);
        }
        &self.memo[&mask]
    }

    fn compute(&mut self, mask: u64) -> Layer {
        if mask == 0 {
            return vec![Some(Rat::zero())];
        }
        let i = mask.trailing_zeros() as usize;
        let without_i = mask & !(1 << i);
        let cap = (mask.count_ones() as usize) / 2;
        let mut layer: Layer = vec![None; cap + 1];
        // Leave node i unmatched.
        let skip = self.best(without_i).clone();
        for (t, w) in skip.into_iter().enumerate() {
            if w.is_some() {
                layer[t] = w;
            }
        }
        // Match node i with each available partner.
        let mut j_bits = without_i;
        while j_bits != 0 {
            let j = j_bits.trailing_zeros() as usize;
            j_bits &= j_bits - 1;
            let Some(w_ij) = self.graph.weight_at(i, j).cloned() else {
                continue;
            };
            let rest = without_i & !(1 << j);
            let sub = self.best(rest).clone();
            for (t, w) in sub.into_iter().enumerate() {
                let Some(w) = w else { continue };
                let cand = w + &w_ij;
                let slot = &mut layer[t + 1];
                let improves = match slot {
                    None => true,
                    Some(cur) => cand > *cur,
                };
                if improves {
                    *slot = Some(cand);
                }
            }
        }
        layer
    }
}

/// Maximum-weight matching using exactly `size` edges, or `None` when the
/// graph has no matching of that size.
pub fn max_weight_matching_exact_size(graph: &MatchingGraph, size: usize) -> Option<Matching> {
    let n = graph.node_count();
    if size > n / 2 {
        return None;
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut solver = Solver { graph, memo: HashMap::new() };
    let target = solver.best(full).get(size).cloned().flatten()?;
    // Deterministic reconstruction: retrace the first optimal choice in the
    // same order the table was filled.
    let mut edges = Vec::new();
    let mut mask = full;
    let mut t = size;
    let mut want = target.clone();
    while t > 0 {
        debug_assert!(mask != 0);
        let i = mask.trailing_zeros() as usize;
        let without_i = mask & !(1 << i);
        let skip = solver.best(without_i).get(t).cloned().flatten();
        if skip.as_ref() == Some(&want) {
            mask = without_i;
            continue;
        }
        let mut advanced = false;
        let mut j_bits = without_i;
        'partners: while j_bits != 0 {
            let j = j_bits.trailing_zeros() as usize;
            j_bits &= j_bits - 1;
            let Some(w_ij) = graph.weight_at(i, j).cloned() else {
                continue;
            };
            let rest = without_i & !(1 << j);
            if let Some(w) = solver.best(rest).get(t - 1).cloned().flatten() {
                if w + &w_ij == want {
                    edges.push((graph.node_ids[i], graph.node_ids[j]));
                    let rest_best = solver.best(rest).get(t - 1).cloned().flatten().unwrap();
                    want = rest_best;
                    mask = rest;
                    t -= 1;
                    advanced = true;
                    break 'partners;
                }
            }
        }
        debug_assert!(advanced, "matching reconstruction lost the optimum");
        if !advanced {
            return None;
        }
    }
    edges.sort_unstable();
    Some(Matching { edges, weight: target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn items(sizes: &[Rat]) -> Vec<Item> {
        sizes
            .iter()
            .enumerate()
            .map(|(i, s)| Item { id: i + 1, size: s.clone() })
            .collect()
    }

    #[test]
    fn builds_pair_graph_from_items() {
        let g = MatchingGraph::from_items(&items(&[
            rat(3, 5),
            rat(3, 5),
            rat(3, 10),
            rat(3, 10),
        ]));
        assert_eq!(g.node_count(), 4);
        // 1-2 exceeds capacity; all other pairs fit.
        assert!(g.weight_at(0, 1).is_none());
        assert_eq!(g.weight_at(0, 2), Some(&rat(9, 10)));
        assert_eq!(g.weight_at(2, 3), Some(&rat(3, 5)));
    }

    #[test]
    fn exact_size_two_matching() {
        let g = MatchingGraph::from_items(&items(&[
            rat(3, 5),
            rat(3, 5),
            rat(3, 10),
            rat(3, 10),
        ]));
        let m = max_weight_matching_exact_size(&g, 2).unwrap();
        assert_eq!(m.weight, rat(9, 5));
        assert_eq!(m.edges, vec![(1, 3), (2, 4)]);
    }

    #[test]
    fn infeasible_size_detected() {
        // Both heavy items can only pair with the single light one.
        let g = MatchingGraph::from_items(&items(&[rat(9, 10), rat(9, 10), rat(1, 10)]));
        assert!(max_weight_matching_exact_size(&g, 2).is_none());
        let m1 = max_weight_matching_exact_size(&g, 1).unwrap();
        assert_eq!(m1.weight, rat(1, 1));
        // (1,3) and (2,3) tie at weight 1; reconstruction resolves the tie
        // the same way every run.
        assert_eq!(m1.edges, vec![(2, 3)]);
    }

    #[test]
    fn size_zero_matching_is_empty() {
        let g = MatchingGraph::from_items(&items(&[rat(1, 2), rat(1, 2)]));
        let m = max_weight_matching_exact_size(&g, 0).unwrap();
        assert!(m.edges.is_empty());
        assert_eq!(m.weight, Rat::zero());
    }

    #[test]
    fn respects_explicit_weights() {
        let g = MatchingGraph::new(
            vec![10, 20, 30, 40],
            vec![
                (10, 20, rat(5, 1)),
                (30, 40, rat(1, 1)),
                (10, 30, rat(4, 1)),
                (20, 40, rat(4, 1)),
            ],
        );
        let m = max_weight_matching_exact_size(&g, 2).unwrap();
        // (10,30)+(20,40) = 8 beats (10,20)+(30,40) = 6.
        assert_eq!(m.weight, rat(8, 1));
        assert_eq!(m.edges, vec![(10, 30), (20, 40)]);
    }

    /// Brute force over all matchings, for cross-checking.
    fn brute_force(g: &MatchingGraph, size: usize) -> Option<Rat> {
        fn rec(g: &MatchingGraph, mask: u64, left: usize) -> Option<Rat> {
            if left == 0 {
                return Some(Rat::zero());
            }
            if mask == 0 {
                return None;
            }
            let i = mask.trailing_zeros() as usize;
            let without_i = mask & !(1 << i);
            let mut best = rec(g, without_i, left);
            for j in (i + 1)..g.node_count() {
                if without_i & (1 << j) == 0 {
                    continue;
                }
                let Some(w) = g.weight_at(i, j) else { continue };
                if let Some(rest) = rec(g, without_i & !(1 << j), left - 1) {
                    let cand = rest + w;
                    if best.as_ref().is_none_or(|b| cand > *b) {
                        best = Some(cand);
                    }
                }
            }
            best
        }
        rec(g, if g.node_count() == 0 { 0 } else { (1u64 << g.node_count()) - 1 }, size)
    }

    #[test]
    fn agrees_with_brute_force_on_a_clique() {
        let sizes: Vec<Rat> = (1..=6).map(|i| rat(i, 20)).collect();
        let g = MatchingGraph::from_items(&items(&sizes));
        for m in 0..=3 {
            let dp = max_weight_matching_exact_size(&g, m).map(|x| x.weight);
            assert_eq!(dp, brute_force(&g, m), "size {m}");
        }
    }

    #[test]
    fn weight_is_concave_in_size() {
        let sizes: Vec<Rat> = vec![
            rat(1, 2),
            rat(1, 3),
            rat(1, 4),
            rat(1, 5),
            rat(2, 5),
            rat(3, 7),
        ];
        let g = MatchingGraph::from_items(&items(&sizes));
        let w: Vec<Option<Rat>> =
            (0..=3).map(|m| max_weight_matching_exact_size(&g, m).map(|x| x.weight)).collect();
        for m in 1..3 {
            if let (Some(lo), Some(mid), Some(hi)) = (&w[m - 1], &w[m], &w[m + 1]) {
                assert!(lo + hi <= mid + mid);
            }
        }
    }
}
