//! Asymptotic approximation scheme for general-cost bin packing: guess the
//! shape of the sparsely packed part, pack it exactly with a configuration
//! program, pack the dense remainder through rounding and an almost
//! continuous bin program, and keep the cheapest verified combination.

pub mod dense;
pub mod sparse;

use crate::classify::minimizer_k;
use crate::epsilon::Epsilon;
use crate::error::SolveError;
use crate::instance::Instance;
use crate::milp::Budget;
use crate::packing::{packing_cost, verify_packing, Packing};
use crate::par;
use crate::rational::Rat;

use dense::{round_cost_function, RoundedCost};
use sparse::{
    enumerate_sparse_configurations, enumerate_sparse_guesses, pack_sparse, solve_sparse_ip,
    SparseGuess,
};

/// Execution report accompanying a returned packing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AptasCertificate {
    pub epsilon: Rat,
    /// Signature of the winning guess.
    pub guess_signature: String,
    /// Exact cost of the sparse bins.
    pub stage1_cost: Rat,
    /// Cost of the dense bins, overflow and first-class bins included.
    pub stage2_cost: Rat,
    pub total_cost: Rat,
    /// Price ceiling the winning dense packing used, if a bin program ran.
    pub omega: Option<Rat>,
    /// Instance-derived lower bound on the optimum: the larger of the total
    /// size rounded up and `n` times the best per-item price.
    pub lower_bound: Rat,
    /// The guarantee evaluated at the lower bound, `(1 + 10 eps) * lb + 2 +
    /// g(min(1/eps, n))`; the true optimum can only raise it.
    pub bound_rhs: Rat,
    pub guesses_examined: usize,
    /// Guesses dropped without a candidate: infeasible shapes and shapes
    /// whose cheap floor already exceeded the first candidate.
    pub guesses_pruned: usize,
    /// True when the node budget ran out mid-sweep; the result is then the
    /// best candidate found before exhaustion.
    pub budget_exhausted: bool,
}

struct Candidate {
    index: usize,
    total: Rat,
    stage1: Rat,
    stage2: Rat,
    omega_level: Option<usize>,
    signature: String,
    packing: Packing,
}

/// Runs the approximation scheme. The returned packing is feasible and
/// covers every item; its cost is within `(1 + 10 eps) * OPT + 2 + g(1/eps)`
/// of the optimum. Errors with `BudgetExceeded` only when the budget dies
/// before any candidate exists; later exhaustion degrades to the best
/// candidate found and sets the certificate flag.
pub fn aptas(
    inst: &Instance,
    eps: &Epsilon,
    budget: &Budget,
) -> Result<(Packing, AptasCertificate), SolveError> {
    let n = inst.n();
    if n == 0 {
        let cert = AptasCertificate {
            epsilon: eps.value().clone(),
            guess_signature: "pi=0".into(),
            stage1_cost: Rat::zero(),
            stage2_cost: Rat::zero(),
            total_cost: Rat::zero(),
            omega: None,
            lower_bound: Rat::zero(),
            bound_rhs: Rat::from_int(2),
            guesses_examined: 1,
            guesses_pruned: 0,
            budget_exhausted: false,
        };
        return Ok((Packing::default(), cert));
    }
    let rc = round_cost_function(inst, eps);
    let guesses = enumerate_sparse_guesses(inst, eps, budget)?;
    // The all-sparse guess always yields a candidate (singleton templates
    // cover every class), anchoring the pruning floor for the sweep.
    let corner_index =
        guesses.iter().position(|g| g.pi == n).expect("full-sparse guess is enumerated");
    let corner =
        evaluate_guess(inst, corner_index, &guesses[corner_index], &rc, eps, budget, None)?
            .ok_or_else(|| SolveError::Internal("full-sparse guess must pack".into()))?;
    let floor = corner.total.clone();
    let jobs: Vec<(usize, &SparseGuess)> =
        guesses.iter().enumerate().filter(|&(i, _)| i != corner_index).collect();
    let results = par::map_collect(&jobs, |&(i, g)| {
        evaluate_guess(inst, i, g, &rc, eps, budget, Some(&floor))
    });
    let mut budget_exhausted = false;
    let mut pruned = 0usize;
    let mut candidates = vec![corner];
    for result in results {
        match result {
            Ok(Some(candidate)) => candidates.push(candidate),
            Ok(None) => pruned += 1,
            Err(SolveError::BudgetExceeded) => budget_exhausted = true,
            Err(other) => return Err(other),
        }
    }
    let winner = candidates
        .into_iter()
        .min_by(|a, b| a.total.cmp(&b.total).then(a.index.cmp(&b.index)))
        .expect("corner candidate exists");
    if !verify_packing(inst, &winner.packing).is_ok() {
        return Err(SolveError::Internal("winning packing failed verification".into()));
    }
    debug_assert_eq!(packing_cost(inst, &winner.packing), winner.total);

    let classification = minimizer_k(inst.cost());
    let per_item = classification.per_item_cost[classification.k - 1].clone();
    let lower_bound =
        Rat::max_of(inst.total_size().ceil(), Rat::from_usize(n) * per_item);
    let inv = (eps.inv() as usize).min(n);
    let bound_rhs = &(&(Rat::one() + eps.value() * Rat::from_int(10)) * &lower_bound)
        + &(Rat::from_int(2) + rc.g_at(inv).clone());
    let cert = AptasCertificate {
        epsilon: eps.value().clone(),
        guess_signature: winner.signature,
        stage1_cost: winner.stage1,
        stage2_cost: winner.stage2,
        total_cost: winner.total,
        omega: winner.omega_level.map(|l| rc.levels()[l].clone()),
        lower_bound,
        bound_rhs,
        guesses_examined: guesses.len(),
        guesses_pruned: pruned,
        budget_exhausted,
    };
    Ok((winner.packing, cert))
}

/// Evaluates one guess end to end. `Ok(None)` means the guess produced no
/// candidate: its classes cannot be covered, its dense side is unpackable,
/// or its cheap floor (stage-one cost plus one bin) already exceeds
/// `prune_at`.
fn evaluate_guess(
    inst: &Instance,
    index: usize,
    guess: &SparseGuess,
    rc: &RoundedCost,
    eps: &Epsilon,
    budget: &Budget,
    prune_at: Option<&Rat>,
) -> Result<Option<Candidate>, SolveError> {
    let configs = enumerate_sparse_configurations(guess, eps);
    let ip = match solve_sparse_ip(inst, guess, &configs, budget)? {
        Some(ip) => ip,
        None => return Ok(None),
    };
    let dense_ids = guess.dense_ids(inst.n());
    if let Some(bound) = prune_at {
        let mut floor = ip.cost.clone();
        if !dense_ids.is_empty() {
            // Any nonempty dense side opens at least one bin.
            floor = floor + Rat::one();
        }
        if &floor > bound {
            return Ok(None);
        }
    }
    let outcome = match dense::pack_dense(inst, &dense_ids, rc, eps, budget)? {
        Some(outcome) => outcome,
        None => return Ok(None),
    };
    let total = &ip.cost + &outcome.cost;
    let stage2 = outcome.cost;
    let omega_level = outcome.omega_level;
    let mut packing = pack_sparse(guess, &configs, &ip.bin_counts).union(outcome.packing);
    packing.canonicalize();
    debug_assert!(verify_packing(inst, &packing).is_ok());
    debug_assert_eq!(packing_cost(inst, &packing), total);
    Ok(Some(Candidate {
        index,
        total,
        stage1: ip.cost,
        stage2,
        omega_level,
        signature: guess.signature(),
        packing,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;
    use crate::oracle::brute_force_opt;
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
    fn empty_instance_packs_trivially() {
        let one = inst(vec![], vec![rat(0, 1)]);
        let (packing, cert) = aptas(&one, &eps(1, 1), &Budget::unlimited()).unwrap();
        assert_eq!(packing.bin_count(), 0);
        assert_eq!(cert.total_cost, Rat::zero());
        assert!(!cert.budget_exhausted);
    }

    #[test]
    fn full_items_force_singletons() {
        let one = inst(vec![Rat::one(); 3], vec![rat(0, 1), rat(1, 1), rat(3, 2), rat(2, 1)]);
        let (packing, cert) = aptas(&one, &eps(1, 1), &Budget::unlimited()).unwrap();
        assert_eq!(packing.bins, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(cert.total_cost, rat(3, 1));
        assert_eq!(cert.stage1_cost + cert.stage2_cost, cert.total_cost);
    }

    #[test]
    fn dust_collapses_into_one_bin() {
        let one = inst(vec![Rat::zero(); 6], flat_cost(6));
        let (packing, cert) = aptas(&one, &eps(1, 1), &Budget::unlimited()).unwrap();
        assert_eq!(packing.bin_count(), 1);
        assert_eq!(cert.total_cost, Rat::one());
        let (_, opt) = brute_force_opt(&one, None).unwrap();
        assert_eq!(opt, cert.total_cost);
    }

    #[test]
    fn stays_within_the_guarantee_on_mixed_items() {
        let sizes = vec![rat(7, 10), rat(3, 5), rat(1, 2), rat(1, 4), rat(1, 5), rat(1, 10)];
        let cost =
            vec![rat(0, 1), rat(1, 1), rat(3, 2), rat(9, 5), rat(2, 1), rat(21, 10), rat(11, 5)];
        let one = inst(sizes, cost);
        let (_, opt) = brute_force_opt(&one, None).unwrap();
        for e in [eps(1, 1), eps(1, 2)] {
            let (packing, cert) = aptas(&one, &e, &Budget::unlimited()).unwrap();
            assert!(verify_packing(&one, &packing).is_ok());
            assert_eq!(packing_cost(&one, &packing), cert.total_cost);
            assert!(cert.total_cost >= opt);
            let inv = (e.inv() as usize).min(one.n());
            let rc = round_cost_function(&one, &e);
            let rhs = &(&(Rat::one() + e.value() * Rat::from_int(10)) * &opt)
                + &(Rat::from_int(2) + rc.g_at(inv).clone());
            assert!(cert.total_cost <= rhs);
            assert!(cert.lower_bound <= opt);
        }
    }

    #[test]
    fn certificate_reports_the_winning_guess() {
        let one = inst(vec![rat(1, 2), rat(1, 2), rat(1, 3)], flat_cost(3));
        let e = eps(1, 1);
        let (_, cert) = aptas(&one, &e, &Budget::unlimited()).unwrap();
        let guesses = enumerate_sparse_guesses(&one, &e, &Budget::unlimited()).unwrap();
        assert!(guesses.iter().any(|g| g.signature() == cert.guess_signature));
        assert_eq!(cert.guesses_examined, guesses.len());
    }

    #[test]
    fn tiny_budget_errors_out() {
        let one = inst(vec![rat(1, 2); 4], flat_cost(4));
        let err = aptas(&one, &eps(1, 1), &Budget::new(1)).unwrap_err();
        assert_eq!(err, SolveError::BudgetExceeded);
    }

    #[test]
    fn repeated_runs_agree() {
        let sizes = vec![rat(9, 10), rat(2, 5), rat(2, 5), rat(1, 5), rat(1, 10)];
        let one = inst(sizes, vec![rat(0, 1), rat(1, 1), rat(6, 5), rat(7, 5), rat(8, 5), rat(9, 5)]);
        let e = eps(1, 2);
        let (p1, c1) = aptas(&one, &e, &Budget::unlimited()).unwrap();
        let (p2, c2) = aptas(&one, &e, &Budget::unlimited()).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(c1, c2);
    }
}
