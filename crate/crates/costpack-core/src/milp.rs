//! Exact mixed-integer linear programming by branch and bound.
//!
//! Depth-first search on the exact LP relaxation: branch on the
//! lowest-indexed fractional integer variable, explore the floor branch
//! first, and prune nodes whose relaxation bound cannot beat the incumbent.
//! Every node costs one unit of [`Budget`]; exhaustion surfaces as
//! [`SolveError::BudgetExceeded`], never as a silently approximate answer.

use std::sync::atomic::{AtomicI64, Ordering};

use crate::error::SolveError;
use crate::lp::{solve_lp, LpModel, LpSolution, LpStatus, Relation};
use crate::rational::Rat;

/// A shared, thread-safe node budget.
#[derive(Debug)]
pub struct Budget {
    remaining: AtomicI64,
}

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

impl Budget {
    pub fn new(limit: u64) -> Self {
        let capped = i64::try_from(limit).unwrap_or(i64::MAX);
        Budget { remaining: AtomicI64::new(capped) }
    }

    pub fn unlimited() -> Self {
        Budget { remaining: AtomicI64::new(i64::MAX) }
    }

    /// Consumes `amount` units, failing once the budget is spent.
    pub fn charge(&self, amount: u64) -> Result<(), SolveError> {
        let amount = i64::try_from(amount).unwrap_or(i64::MAX);
        let before = self.remaining.fetch_sub(amount, Ordering::Relaxed);
        if before < amount {
            Err(SolveError::BudgetExceeded)
        } else {
            Ok(())
        }
    }

    pub fn exhausted(&self) -> bool {
        self.remaining.load(Ordering::Relaxed) <= 0
    }
}

/// An [`LpModel`] plus integrality requirements on selected variables.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub base: LpModel,
    /// Strictly increasing variable indices that must be integral.
    pub integer_vars: Vec<usize>,
    /// Optional upper bounds, aligned with `integer_vars`.
    pub upper_bounds: Vec<Option<Rat>>,
}

impl MilpModel {
    pub fn new(base: LpModel, mut integer_vars: Vec<usize>) -> Self {
        integer_vars.sort_unstable();
        integer_vars.dedup();
        let upper_bounds = vec![None; integer_vars.len()];
        MilpModel { base, integer_vars, upper_bounds }
    }

    pub fn with_upper_bounds(
        base: LpModel,
        integer_vars: Vec<usize>,
        upper_bounds: Vec<Option<Rat>>,
    ) -> Self {
        assert_eq!(integer_vars.len(), upper_bounds.len());
        MilpModel { base, integer_vars, upper_bounds }
    }
}

fn unit_row(num_vars: usize, var: usize) -> Vec<Rat> {
    let mut coeffs = vec![Rat::zero(); num_vars];
    coeffs[var] = Rat::one();
    coeffs
}

/// Solves the MILP to optimality. With a `cutoff`, only solutions strictly
/// below it count; `Infeasible` then means "nothing below the cutoff".
pub fn solve_milp_with_cutoff(
    model: &MilpModel,
    budget: &Budget,
    cutoff: Option<&Rat>,
) -> Result<LpSolution, SolveError> {
    let mut base = model.base.clone();
    for (var, ub) in model.integer_vars.iter().zip(&model.upper_bounds) {
        if let Some(ub) = ub {
            base.push_row(unit_row(base.num_vars, *var), Relation::Le, ub.clone());
        }
    }
    // Each stack entry is the full list of branching rows for that node.
    let mut stack: Vec<Vec<(usize, Relation, Rat)>> = vec![Vec::new()];
    let mut incumbent: Option<LpSolution> = None;
    let mut root = true;
    while let Some(branch_rows) = stack.pop() {
        budget.charge(1)?;
        let mut node = base.clone();
        for (var, rel, bound) in &branch_rows {
            node.push_row(unit_row(node.num_vars, *var), *rel, bound.clone());
        }
        let sol = solve_lp(&node);
        let at_root = std::mem::take(&mut root);
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if at_root {
                    // Relaxation unbounded at the root: report as unbounded.
                    return Ok(sol);
                }
                continue;
            }
            LpStatus::Optimal => {}
        }
        if let Some(best) = &incumbent {
            if sol.objective_value >= best.objective_value {
                continue;
            }
        }
        if let Some(cut) = cutoff {
            if sol.objective_value >= *cut {
                continue;
            }
        }
        let fractional = model
            .integer_vars
            .iter()
            .find(|&&v| !sol.values[v].is_integer());
        match fractional {
            None => incumbent = Some(sol),
            Some(&v) => {
                let value = sol.values[v].clone();
                let down = value.floor();
                let up = value.ceil();
                let mut up_rows = branch_rows.clone();
                up_rows.push((v, Relation::Ge, up));
                let mut down_rows = branch_rows;
                down_rows.push((v, Relation::Le, down));
                // LIFO: floor branch explored first.
                stack.push(up_rows);
                stack.push(down_rows);
            }
        }
    }
    Ok(incumbent.unwrap_or_else(|| LpSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective_value: Rat::zero(),
        is_basic: false,
    }))
}

/// Solves the MILP to optimality within the node budget.
pub fn solve_milp(model: &MilpModel, budget: &Budget) -> Result<LpSolution, SolveError> {
    solve_milp_with_cutoff(model, budget, None)
}

/// Pure integer program: every variable is integral.
pub fn solve_ip(base: LpModel, budget: &Budget) -> Result<LpSolution, SolveError> {
    let all: Vec<usize> = (0..base.num_vars).collect();
    solve_milp(&MilpModel::new(base, all), budget)
}
