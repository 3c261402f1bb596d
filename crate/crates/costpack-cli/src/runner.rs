//! Algorithm selection shared by the solve command and the bench harness.

use std::fmt;
use std::str::FromStr;

use costpack_core::aptas::{aptas, AptasCertificate};
use costpack_core::exact::{solve_k1, solve_k2};
use costpack_core::milp::Budget;
use costpack_core::oracle::{brute_force_opt, greedy_baseline};
use costpack_core::{minimizer_k, packing_cost, Epsilon, Instance, Packing, Rat, SolveError, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Classify first, then run the matching exact solver or the scheme.
    Auto,
    K1,
    K2,
    Aptas,
    Oracle,
    Greedy,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::K1 => "k1",
            Algorithm::K2 => "k2",
            Algorithm::Aptas => "aptas",
            Algorithm::Oracle => "oracle",
            Algorithm::Greedy => "greedy",
        }
    }

    pub fn needs_epsilon(&self) -> bool {
        matches!(self, Algorithm::Auto | Algorithm::Aptas)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "k1" => Ok(Algorithm::K1),
            "k2" => Ok(Algorithm::K2),
            "aptas" => Ok(Algorithm::Aptas),
            "oracle" => Ok(Algorithm::Oracle),
            "greedy" => Ok(Algorithm::Greedy),
            other => Err(format!(
                "unknown algorithm {other:?}; expected auto, k1, k2, aptas, oracle, or greedy"
            )),
        }
    }
}

/// What a solver run produced.
pub struct RunOutcome {
    /// Concrete solver that ran (`auto` resolves before running).
    pub algorithm: &'static str,
    pub packing: Packing,
    /// Normalized cost.
    pub cost: Rat,
    pub certificate: Option<AptasCertificate>,
}

/// Runs one algorithm on one instance.
pub fn run_algorithm(
    inst: &Instance,
    algorithm: Algorithm,
    epsilon: &Epsilon,
    budget: &Budget,
    oracle_limit: usize,
    force: bool,
) -> Result<RunOutcome, SolveError> {
    match algorithm {
        Algorithm::Auto => {
            let resolved = match minimizer_k(inst.cost()).verdict {
                Verdict::PolyK1 => Algorithm::K1,
                Verdict::PolyK2 => Algorithm::K2,
                Verdict::NpHard => Algorithm::Aptas,
            };
            run_algorithm(inst, resolved, epsilon, budget, oracle_limit, force)
        }
        Algorithm::K1 => {
            let (packing, cost) = solve_k1(inst, force)?;
            Ok(RunOutcome { algorithm: "k1", packing, cost, certificate: None })
        }
        Algorithm::K2 => {
            let (packing, cost, _) = solve_k2(inst, force)?;
            Ok(RunOutcome { algorithm: "k2", packing, cost, certificate: None })
        }
        Algorithm::Aptas => {
            let (packing, certificate) = aptas(inst, epsilon, budget)?;
            let cost = certificate.total_cost.clone();
            Ok(RunOutcome {
                algorithm: "aptas",
                packing,
                cost,
                certificate: Some(certificate),
            })
        }
        Algorithm::Oracle => {
            let (packing, cost) = brute_force_opt(inst, Some(oracle_limit))?;
            Ok(RunOutcome { algorithm: "oracle", packing, cost, certificate: None })
        }
        Algorithm::Greedy => {
            let (packing, cost) = greedy_baseline(inst);
            Ok(RunOutcome { algorithm: "greedy", packing, cost, certificate: None })
        }
    }
}

/// Instance-derived lower bound on the optimum cost: every packing opens at
/// least `ceil(total size)` bins of cost at least 1 each, and every item
/// pays at least the best per-item price.
pub fn lower_bound(inst: &Instance) -> Rat {
    if inst.n() == 0 {
        return Rat::zero();
    }
    let cls = minimizer_k(inst.cost());
    let per_item = Rat::from_usize(inst.n()) * &cls.per_item_cost[cls.k - 1];
    Rat::max_of(inst.total_size().ceil(), per_item)
}

/// Recomputes the packing cost and confirms it matches what the solver
/// reported; a mismatch is a solver bug surfaced as `Internal`.
pub fn check_outcome(inst: &Instance, outcome: &RunOutcome) -> Result<(), SolveError> {
    let report = costpack_core::verify_packing(inst, &outcome.packing);
    if !report.is_ok() {
        let first = report.violations[0].to_string();
        return Err(SolveError::Internal(format!("solver returned an invalid packing: {first}")));
    }
    if packing_cost(inst, &outcome.packing) != outcome.cost {
        return Err(SolveError::Internal("reported cost disagrees with the packing".into()));
    }
    Ok(())
}
