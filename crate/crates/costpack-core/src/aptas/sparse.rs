//! Stage one of the approximation scheme: enumerate candidate shapes for the
//! sparsely packed part of the instance and pack each candidate exactly with
//! a configuration integer program.
//!
//! A guess fixes how many items go to sparse bins and which rounded sizes
//! they take. Items are ranked by descending size; the guess cuts the ranking
//! into runs, and each class is a run prefix rounded up to the run's first
//! size. Guesses are enumerated by choosing the run start positions, which
//! visits every distinct outcome exactly once.

use std::collections::VecDeque;

use crate::epsilon::Epsilon;
use crate::error::SolveError;
use crate::instance::Instance;
use crate::lp::{LpModel, LpStatus, Relation};
use crate::milp::{solve_milp, Budget, MilpModel};
use crate::packing::Packing;
use crate::rational::Rat;

/// A resolved stage-one guess: the sparse item count, the classes with their
/// members, and each class's rounded size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGuess {
    /// Number of items guessed into sparse bins.
    pub pi: usize,
    /// Forced class cardinalities: non-increasing, summing to `pi`.
    pub class_cards: Vec<usize>,
    /// Item ids per class, each a run prefix in descending size order.
    pub classes: Vec<Vec<usize>>,
    /// Upper rounding of each nonempty class: its largest member's size.
    pub rounded_sizes: Vec<Option<Rat>>,
    /// Breakpoints: entry 0 marks the run of items ranked above class 1
    /// (absent when class 1 starts at the top), entry `i >= 1` marks class
    /// `i`'s largest member.
    pub theta: Vec<Option<(Rat, usize)>>,
}

impl SparseGuess {
    /// Ids of all guessed-sparse items, ascending.
    pub fn sparse_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.classes.iter().flatten().copied().collect();
        ids.sort_unstable();
        ids
    }

    /// Ids left to the dense stage, ascending.
    pub fn dense_ids(&self, n: usize) -> Vec<usize> {
        let sparse = self.sparse_ids();
        let mut cursor = 0;
        let mut out = Vec::with_capacity(n - sparse.len());
        for id in 1..=n {
            if cursor < sparse.len() && sparse[cursor] == id {
                cursor += 1;
            } else {
                out.push(id);
            }
        }
        out
    }

    /// Canonical key: two guesses collide only if they agree on every class
    /// member and rounded size.
    pub fn signature(&self) -> String {
        let mut s = format!("pi={}", self.pi);
        for (i, class) in self.classes.iter().enumerate() {
            if class.is_empty() {
                continue;
            }
            let ids: Vec<String> = class.iter().map(|id| id.to_string()).collect();
            let rounded = self.rounded_sizes[i].as_ref().expect("nonempty class is rounded");
            s.push_str(&format!(";c{}=[{}]@{}", i + 1, ids.join(","), rounded));
        }
        s
    }
}

/// Class cardinalities forced by the sparse count: `pi mod m` ceilings of
/// `pi / m` first, then floors, so the vector is non-increasing, sums to
/// `pi`, and class 1 always gets the ceiling.
pub fn card_profile(pi: usize, m: usize) -> Vec<usize> {
    assert!(m > 0, "at least one class");
    let q = pi / m;
    let r = pi % m;
    (0..m).map(|i| if i < r { q + 1 } else { q }).collect()
}

/// Resolves breakpoints into a concrete guess. `class_theta[i]` is class
/// `i+1`'s breakpoint, the (size, id) of its largest member, or `None` for
/// an empty class. Returns `None` when the breakpoints are inconsistent with
/// the forced cardinalities: overlapping runs, a truncated final run, a
/// stale size, or a breakpoint on the wrong side of the empty/nonempty line.
pub fn build_classes(
    inst: &Instance,
    order: &[usize],
    pi: usize,
    class_theta: &[Option<(Rat, usize)>],
    eps: &Epsilon,
) -> Option<SparseGuess> {
    let m = eps.inv_cu_usize();
    assert_eq!(class_theta.len(), m, "one breakpoint slot per class");
    let n = order.len();
    if pi > n {
        return None;
    }
    let mut pos_of = vec![usize::MAX; n + 1];
    for (p, &id) in order.iter().enumerate() {
        pos_of[id] = p;
    }
    let cards = card_profile(pi, m);
    let mut classes = vec![Vec::new(); m];
    let mut rounded: Vec<Option<Rat>> = vec![None; m];
    // First admissible start for the next run; runs must not overlap.
    let mut cursor = 0usize;
    let mut first_start: Option<usize> = None;
    for i in 0..m {
        let c = cards[i];
        match (&class_theta[i], c) {
            (None, 0) => {}
            (Some((size, id)), c) if c > 0 => {
                if *id > n || pos_of[*id] == usize::MAX {
                    return None;
                }
                if inst.size_of(*id) != size {
                    return None;
                }
                let t = pos_of[*id];
                if t < cursor || t + c > n {
                    return None;
                }
                classes[i] = order[t..t + c].to_vec();
                rounded[i] = Some(size.clone());
                if first_start.is_none() {
                    first_start = Some(t);
                }
                cursor = t + c;
            }
            _ => return None,
        }
    }
    let head = match first_start {
        Some(0) => None,
        _ if n == 0 => None,
        _ => Some((inst.size_of(order[0]).clone(), order[0])),
    };
    let mut theta = Vec::with_capacity(m + 1);
    theta.push(head);
    theta.extend(class_theta.iter().cloned());
    Some(SparseGuess { pi, class_cards: cards, classes, rounded_sizes: rounded, theta })
}

/// Enumerates every distinct guess, charging one budget unit per guess.
/// Outer order is ascending `pi`; within a `pi`, run starts move
/// lexicographically. No two emitted guesses share a signature.
pub fn enumerate_sparse_guesses(
    inst: &Instance,
    eps: &Epsilon,
    budget: &Budget,
) -> Result<Vec<SparseGuess>, SolveError> {
    let order = inst.ids_by_size_desc();
    let mut out = Vec::new();
    for pi in 0..=inst.n() {
        let cards = card_profile(pi, eps.inv_cu_usize());
        // Nonzero cardinalities form a prefix of the profile.
        let active = cards.iter().filter(|&&c| c > 0).count();
        let mut starts = Vec::with_capacity(active);
        push_guesses(inst, &order, pi, &cards, active, 0, &mut starts, &mut out, eps, budget)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn push_guesses(
    inst: &Instance,
    order: &[usize],
    pi: usize,
    cards: &[usize],
    active: usize,
    min_start: usize,
    starts: &mut Vec<usize>,
    out: &mut Vec<SparseGuess>,
    eps: &Epsilon,
    budget: &Budget,
) -> Result<(), SolveError> {
    let n = order.len();
    if starts.len() == active {
        budget.charge(1)?;
        let mut class_theta = vec![None; cards.len()];
        for (j, &t) in starts.iter().enumerate() {
            let id = order[t];
            class_theta[j] = Some((inst.size_of(id).clone(), id));
        }
        let guess = build_classes(inst, order, pi, &class_theta, eps)
            .expect("starts chosen within bounds");
        out.push(guess);
        return Ok(());
    }
    let j = starts.len();
    let tail: usize = cards[j..active].iter().sum();
    if tail > n {
        return Ok(());
    }
    for t in min_start..=(n - tail) {
        starts.push(t);
        push_guesses(inst, order, pi, cards, active, t + cards[j], starts, out, eps, budget)?;
        starts.pop();
    }
    Ok(())
}

/// A sparse bin template: how many members of each class one bin holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseConfig {
    pub counts: Vec<usize>,
    pub cardinality: usize,
}

/// All bin templates compatible with the guess: at least one item, at most
/// `1/eps^2` in total, never more of a class than it supplies, and rounded
/// sizes fitting in one bin. Output is lexicographic in `counts`.
pub fn enumerate_sparse_configurations(guess: &SparseGuess, eps: &Epsilon) -> Vec<SparseConfig> {
    let mut out = Vec::new();
    if guess.pi == 0 {
        return out;
    }
    let cap = eps.inv_sq_usize().min(guess.pi);
    let mut counts = vec![0usize; guess.class_cards.len()];
    fill_config(guess, cap, 0, 0, Rat::zero(), &mut counts, &mut out);
    out
}

fn fill_config(
    guess: &SparseGuess,
    cap: usize,
    i: usize,
    used: usize,
    used_size: Rat,
    counts: &mut Vec<usize>,
    out: &mut Vec<SparseConfig>,
) {
    if i == guess.class_cards.len() {
        if used > 0 {
            out.push(SparseConfig { counts: counts.clone(), cardinality: used });
        }
        return;
    }
    let limit = guess.class_cards[i].min(cap - used);
    for c in 0..=limit {
        let size = match &guess.rounded_sizes[i] {
            Some(s) => &used_size + &(s * Rat::from_usize(c)),
            None => used_size.clone(),
        };
        if size > Rat::one() {
            break;
        }
        counts[i] = c;
        fill_config(guess, cap, i + 1, used + c, size, counts, out);
    }
    counts[i] = 0;
}

/// Exact stage-one packing cost for one guess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIpSolution {
    /// Bin count per configuration, aligned with the enumeration order.
    pub bin_counts: Vec<u64>,
    pub cost: Rat,
}

/// Solves the configuration program: pick bin multiplicities covering each
/// class exactly, at minimum total cost. `Ok(None)` means no combination
/// matches the forced cardinalities.
pub fn solve_sparse_ip(
    inst: &Instance,
    guess: &SparseGuess,
    configs: &[SparseConfig],
    budget: &Budget,
) -> Result<Option<SparseIpSolution>, SolveError> {
    if guess.pi == 0 {
        let bin_counts = vec![0; configs.len()];
        return Ok(Some(SparseIpSolution { bin_counts, cost: Rat::zero() }));
    }
    if configs.is_empty() {
        return Ok(None);
    }
    let objective: Vec<Rat> =
        configs.iter().map(|c| inst.cost().at(c.cardinality).clone()).collect();
    let mut base = LpModel::new(configs.len(), objective);
    for (i, &card) in guess.class_cards.iter().enumerate() {
        if card == 0 {
            continue;
        }
        let coeffs: Vec<Rat> =
            configs.iter().map(|c| Rat::from_usize(c.counts[i])).collect();
        base.push_row(coeffs, Relation::Eq, Rat::from_usize(card));
    }
    // Any used configuration holds at least one item, so `pi` bins suffice.
    let ub = Rat::from_usize(guess.pi);
    let model = MilpModel::with_upper_bounds(
        base,
        (0..configs.len()).collect(),
        vec![Some(ub); configs.len()],
    );
    let solution = solve_milp(&model, budget)?;
    match solution.status {
        LpStatus::Optimal => {
            let bin_counts = solution
                .values
                .iter()
                .map(|v| v.floor_i64().expect("integral bin count") as u64)
                .collect();
            Ok(Some(SparseIpSolution { bin_counts, cost: solution.objective_value }))
        }
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => {
            Err(SolveError::Internal("sparse configuration program unbounded".into()))
        }
    }
}

/// Materializes an IP solution into bins. Class members are handed out
/// largest-first and configurations are consumed in enumeration order, so
/// the result is deterministic. Panics unless the counts cover the classes
/// exactly, which the IP equality rows guarantee.
pub fn pack_sparse(guess: &SparseGuess, configs: &[SparseConfig], bin_counts: &[u64]) -> Packing {
    assert_eq!(configs.len(), bin_counts.len());
    let mut queues: Vec<VecDeque<usize>> =
        guess.classes.iter().map(|c| c.iter().copied().collect()).collect();
    let mut bins = Vec::new();
    for (config, &count) in configs.iter().zip(bin_counts) {
        for _ in 0..count {
            let mut bin = Vec::with_capacity(config.cardinality);
            for (i, &c) in config.counts.iter().enumerate() {
                for _ in 0..c {
                    bin.push(queues[i].pop_front().expect("classes covered exactly"));
                }
            }
            bins.push(bin);
        }
    }
    assert!(queues.iter().all(|q| q.is_empty()), "classes covered exactly");
    let mut packing = Packing::new(bins);
    packing.canonicalize();
    packing
}

/// Reconstructs the guess a packing induces: its sparse items (those in bins
/// of cardinality up to `1/eps^2`) are ranked by size, the forced profile
/// cuts the ranking, and each cut becomes a breakpoint. Every packing of the
/// instance induces a guess that `enumerate_sparse_guesses` also emits.
pub fn guess_induced_by_packing(
    inst: &Instance,
    packing: &Packing,
    eps: &Epsilon,
) -> Option<SparseGuess> {
    let m = eps.inv_cu_usize();
    let cap = eps.inv_sq_usize();
    let order = inst.ids_by_size_desc();
    let mut pos_of = vec![usize::MAX; inst.n() + 1];
    for (p, &id) in order.iter().enumerate() {
        pos_of[id] = p;
    }
    let mut sparse_pos: Vec<usize> = packing
        .bins
        .iter()
        .filter(|b| !b.is_empty() && b.len() <= cap)
        .flatten()
        .map(|&id| pos_of[id])
        .collect();
    sparse_pos.sort_unstable();
    let pi = sparse_pos.len();
    let cards = card_profile(pi, m);
    let mut class_theta = vec![None; m];
    let mut rank = 0usize;
    for (i, &c) in cards.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let id = order[sparse_pos[rank]];
        class_theta[i] = Some((inst.size_of(id).clone(), id));
        rank += c;
    }
    build_classes(inst, &order, pi, &class_theta, eps)
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::instance::validate_instance;
    use crate::packing::{packing_cost, verify_packing};
    use crate::rational::rat;

    fn inst(sizes: Vec<Rat>, cost: Vec<Rat>) -> Instance {
        validate_instance(sizes, cost).unwrap()
    }

    fn eps(n: i64, d: i64) -> Epsilon {
        Epsilon::new(rat(n, d)).unwrap()
    }

    fn flat_cost(n: usize) -> Vec<Rat> {
        let mut t = vec![Rat::one(); n + 1];
        t[0] = Rat::zero();
        t
    }

    #[test]
    fn card_profile_spreads_ceilings_first() {
        assert_eq!(card_profile(4, 8), vec![1, 1, 1, 1, 0, 0, 0, 0]);
        assert_eq!(card_profile(9, 4), vec![3, 2, 2, 2]);
        assert_eq!(card_profile(0, 3), vec![0, 0, 0]);
        assert_eq!(card_profile(6, 3), vec![2, 2, 2]);
    }

    #[test]
    fn builds_classes_from_breakpoints() {
        let inst = inst(
            vec![rat(3, 5), rat(3, 5), rat(3, 10), rat(3, 10)],
            vec![rat(0, 1), rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)],
        );
        let e = eps(1, 1);
        let order = inst.ids_by_size_desc();
        assert_eq!(order, vec![1, 2, 3, 4]);

        let g = build_classes(&inst, &order, 2, &[Some((rat(3, 5), 1))], &e).unwrap();
        assert_eq!(g.classes, vec![vec![1, 2]]);
        assert_eq!(g.rounded_sizes, vec![Some(rat(3, 5))]);
        assert_eq!(g.theta[0], None);
        assert_eq!(g.dense_ids(4), vec![3, 4]);

        let g = build_classes(&inst, &order, 3, &[Some((rat(3, 5), 2))], &e).unwrap();
        assert_eq!(g.classes, vec![vec![2, 3, 4]]);
        assert_eq!(g.theta[0], Some((rat(3, 5), 1)));
    }

    #[test]
    fn rejects_inconsistent_breakpoints() {
        let inst = inst(
            vec![rat(3, 5), rat(3, 5), rat(3, 10), rat(3, 10)],
            vec![rat(0, 1), rat(1, 1), rat(3, 2), rat(2, 1), rat(3, 1)],
        );
        let order = inst.ids_by_size_desc();
        // Final run truncated: class of 2 starting at the last position.
        assert!(build_classes(&inst, &order, 2, &[Some((rat(3, 10), 4))], &eps(1, 1)).is_none());
        // Stale size component.
        assert!(build_classes(&inst, &order, 2, &[Some((rat(1, 2), 1))], &eps(1, 1)).is_none());
        // Overlapping runs: two classes anchored at the same item.
        let e2 = eps(1, 2);
        let mut theta = vec![None; 8];
        theta[0] = Some((rat(3, 5), 1));
        theta[1] = Some((rat(3, 5), 1));
        assert!(build_classes(&inst, &order, 2, &theta, &e2).is_none());
        // Breakpoint attached to a class the profile forces empty.
        let mut theta = vec![None; 8];
        theta[0] = Some((rat(3, 5), 1));
        theta[2] = Some((rat(3, 5), 2));
        assert!(build_classes(&inst, &order, 2, &theta, &e2).is_none());
    }

    #[test]
    fn enumerates_distinct_guesses() {
        let inst = inst(
            vec![rat(1, 2), rat(1, 3), rat(1, 4)],
            vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1)],
        );
        let guesses = enumerate_sparse_guesses(&inst, &eps(1, 1), &Budget::unlimited()).unwrap();
        // pi = 0: 1 shape; pi = 1: 3 starts; pi = 2: 2; pi = 3: 1.
        assert_eq!(guesses.len(), 7);
        let signatures: HashSet<String> = guesses.iter().map(|g| g.signature()).collect();
        assert_eq!(signatures.len(), guesses.len());
        assert_eq!(guesses[0].pi, 0);
        assert_eq!(guesses[0].sparse_ids(), Vec::<usize>::new());
        assert_eq!(guesses.last().unwrap().sparse_ids(), vec![1, 2, 3]);
    }

    #[test]
    fn enumeration_charges_budget_per_guess() {
        let inst = inst(
            vec![rat(1, 2), rat(1, 3), rat(1, 4)],
            vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1)],
        );
        let budget = Budget::new(3);
        let err = enumerate_sparse_guesses(&inst, &eps(1, 1), &budget).unwrap_err();
        assert_eq!(err, SolveError::BudgetExceeded);
    }

    fn synthetic_one_class(n: usize, rounded: Rat) -> SparseGuess {
        let mut class_cards = vec![0; 8];
        class_cards[0] = n;
        let mut classes = vec![Vec::new(); 8];
        classes[0] = (1..=n).collect();
        let mut rounded_sizes = vec![None; 8];
        rounded_sizes[0] = Some(rounded.clone());
        let mut theta = vec![None; 9];
        theta[1] = Some((rounded, 1));
        SparseGuess { pi: n, class_cards, classes, rounded_sizes, theta }
    }

    #[test]
    fn configurations_respect_size_and_supply() {
        let e = eps(1, 2);
        // Supply of 3 caps the count before the cardinality bound of 4 does.
        let g = synthetic_one_class(3, rat(3, 10));
        let configs = enumerate_sparse_configurations(&g, &e);
        let counts: Vec<usize> = configs.iter().map(|c| c.counts[0]).collect();
        assert_eq!(counts, vec![1, 2, 3]);
        // A bin fits only one item of rounded size 3/5.
        let g = synthetic_one_class(3, rat(3, 5));
        let configs = enumerate_sparse_configurations(&g, &e);
        let counts: Vec<usize> = configs.iter().map(|c| c.counts[0]).collect();
        assert_eq!(counts, vec![1]);
    }

    #[test]
    fn ip_prefers_cheap_pairs() {
        let inst = inst(
            vec![rat(2, 5); 4],
            vec![rat(0, 1), rat(1, 1), rat(6, 5), rat(8, 5), rat(2, 1)],
        );
        let e = eps(1, 2);
        let g = synthetic_one_class(4, rat(2, 5));
        let configs = enumerate_sparse_configurations(&g, &e);
        let counts: Vec<usize> = configs.iter().map(|c| c.counts[0]).collect();
        assert_eq!(counts, vec![1, 2]);
        let sol = solve_sparse_ip(&inst, &g, &configs, &Budget::unlimited()).unwrap().unwrap();
        assert_eq!(sol.bin_counts, vec![0, 2]);
        assert_eq!(sol.cost, rat(12, 5));
        let packing = pack_sparse(&g, &configs, &sol.bin_counts);
        assert_eq!(packing.bins, vec![vec![1, 2], vec![3, 4]]);
        assert!(verify_packing(&inst, &packing).is_ok());
        assert_eq!(packing_cost(&inst, &packing), rat(12, 5));
    }

    #[test]
    fn ip_reports_uncoverable_classes() {
        let inst = inst(vec![rat(2, 5); 3], flat_cost(3));
        let g = synthetic_one_class(3, rat(2, 5));
        // Only a pair template on a class of three: parity blocks coverage.
        let configs = vec![SparseConfig { counts: {
            let mut c = vec![0; 8];
            c[0] = 2;
            c
        }, cardinality: 2 }];
        let sol = solve_sparse_ip(&inst, &g, &configs, &Budget::unlimited()).unwrap();
        assert!(sol.is_none());
    }

    #[test]
    fn induced_guess_matches_an_enumerated_one() {
        let inst = inst(
            vec![rat(3, 5), rat(3, 5), rat(3, 10), rat(3, 10)],
            flat_cost(4),
        );
        let e = eps(1, 1);
        let packing = Packing::new(vec![vec![1], vec![2], vec![3, 4]]);
        let induced = guess_induced_by_packing(&inst, &packing, &e).unwrap();
        assert_eq!(induced.pi, 2);
        assert_eq!(induced.classes, vec![vec![1, 2]]);
        assert_eq!(induced.rounded_sizes, vec![Some(rat(3, 5))]);
        let guesses = enumerate_sparse_guesses(&inst, &e, &Budget::unlimited()).unwrap();
        let signatures: HashSet<String> = guesses.iter().map(|g| g.signature()).collect();
        assert!(signatures.contains(&induced.signature()));
    }

    #[test]
    fn zero_pi_guess_packs_nothing() {
        let inst = inst(vec![rat(1, 2), rat(1, 4)], flat_cost(2));
        let e = eps(1, 1);
        let guesses = enumerate_sparse_guesses(&inst, &e, &Budget::unlimited()).unwrap();
        let g = &guesses[0];
        assert_eq!(g.pi, 0);
        let configs = enumerate_sparse_configurations(g, &e);
        assert!(configs.is_empty());
        let sol = solve_sparse_ip(&inst, g, &configs, &Budget::unlimited()).unwrap().unwrap();
        assert_eq!(sol.cost, Rat::zero());
        assert_eq!(pack_sparse(g, &configs, &sol.bin_counts).bin_count(), 0);
        assert_eq!(g.dense_ids(2), vec![1, 2]);
    }
}
