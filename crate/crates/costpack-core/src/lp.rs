//! Exact rational linear programming.
//!
//! A dense-tableau primal simplex over [`Rat`] with Bland's rule (both the
//! entering and the leaving choice), which guarantees termination, and a
//! two-phase start for feasibility. No floating point anywhere: solutions
//! are exact vertices of the constraint polyhedron.
//!
//! Models are minimization problems over nonnegative variables with `<=`,
//! `=`, or `>=` rows.

use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpConstraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

/// `min objective . x` subject to the rows, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub num_vars: usize,
    pub objective: Vec<Rat>,
    pub constraints: Vec<LpConstraint>,
}

impl LpModel {
    pub fn new(num_vars: usize, objective: Vec<Rat>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LpModel { num_vars, objective, constraints: Vec::new() }
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, relation: Relation, rhs: Rat) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(LpConstraint { coeffs, relation, rhs });
    }

    /// Human-readable dump for debugging model construction.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let term = |j: usize| format!("x{}", j + 1);
        let mut obj = String::new();
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                if !obj.is_empty() {
                    obj.push_str(" + ");
                }
                let _ = write!(obj, "{} {}", c, term(j));
            }
        }
        if obj.is_empty() {
            obj.push('0');
        }
        let _ = writeln!(out, "min {obj}");
        for row in &self.constraints {
            let mut lhs = String::new();
            for (j, c) in row.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    if !lhs.is_empty() {
                        lhs.push_str(" + ");
                    }
                    let _ = write!(lhs, "{} {}", c, term(j));
                }
            }
            if lhs.is_empty() {
                lhs.push('0');
            }
            let _ = writeln!(out, "  {} {} {}", lhs, row.relation, row.rhs);
        }
        let _ = writeln!(out, "  x >= 0");
        out
    }

    /// Whether the given point satisfies every row and the sign bounds.
    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        if x.len() != self.num_vars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|row| {
            let lhs: Rat = row
                .coeffs
                .iter()
                .zip(x)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, v)| c * v)
                .sum();
            match row.relation {
                Relation::Le => lhs <= row.rhs,
                Relation::Eq => lhs == row.rhs,
                Relation::Ge => lhs >= row.rhs,
            }
        })
    }

    pub fn objective_at(&self, x: &[Rat]) -> Rat {
        self.objective
            .iter()
            .zip(x)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; empty unless `status == Optimal`.
    pub values: Vec<Rat>,
    /// Objective at `values`; zero unless `status == Optimal`.
    pub objective_value: Rat,
    /// Simplex always terminates at a vertex, so at most as many strictly
    /// positive variables as there are constraint rows.
    pub is_basic: bool,
}

impl LpSolution {
    fn infeasible() -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective_value: Rat::zero(),
            is_basic: false,
        }
    }

    fn unbounded() -> Self {
        LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective_value: Rat::zero(),
            is_basic: false,
        }
    }
}

struct Tableau {
    /// One coefficient row per constraint.
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    /// Column index of the basic variable of each row.
    basis: Vec<usize>,
    /// Reduced cost row and (negated) current objective value.
    cost: Vec<Rat>,
    cost_rhs: Rat,
    /// First artificial column; columns beyond are never allowed to enter.
    art_start: usize,
    num_structural: usize,
}

enum PhaseOutcome {
    Done,
    Unbounded,
}

impl Tableau {
    fn build(model: &LpModel) -> Tableau {
        let n = model.num_vars;
        let m = model.constraints.len();
        // Count helper columns.
        let mut num_slack = 0usize;
        let mut num_art = 0usize;
        for row in &model.constraints {
            let flip = row.rhs.is_negative();
            let rel = effective_relation(row.relation, flip);
            match rel {
                Relation::Le => num_slack += 1,
                Relation::Ge => {
                    num_slack += 1;
                    num_art += 1;
                }
                Relation::Eq => num_art += 1,
            }
        }
        let art_start = n + num_slack;
        let total = art_start + num_art;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_art = art_start;
        for row in &model.constraints {
            let flip = row.rhs.is_negative();
            let rel = effective_relation(row.relation, flip);
            let mut coeffs = vec![Rat::zero(); total];
            for (j, c) in row.coeffs.iter().enumerate() {
                coeffs[j] = if flip { -c } else { c.clone() };
            }
            let b = if flip { -&row.rhs } else { row.rhs.clone() };
            match rel {
                Relation::Le => {
                    coeffs[next_slack] = Rat::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    coeffs[next_slack] = -Rat::one();
                    next_slack += 1;
                    coeffs[next_art] = Rat::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    coeffs[next_art] = Rat::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(coeffs);
            rhs.push(b);
        }
        Tableau {
            rows,
            rhs,
            basis,
            cost: vec![Rat::zero(); total],
            cost_rhs: Rat::zero(),
            art_start,
            num_structural: n,
        }
    }

    /// Installs the reduced-cost row for the objective `c` (length = total
    /// columns) given the current basis.
    fn set_objective(&mut self, c: Vec<Rat>) {
        self.cost = c;
        self.cost_rhs = Rat::zero();
        for i in 0..self.basis.len() {
            let b = self.basis[i];
            if !self.cost[b].is_zero() {
                let factor = self.cost[b].clone();
                self.eliminate_cost_row(i, &factor);
            }
        }
    }

    fn eliminate_cost_row(&mut self, row: usize, factor: &Rat) {
        for (j, a) in self.rows[row].iter().enumerate() {
            if !a.is_zero() {
                let delta = factor * a;
                self.cost[j] -= &delta;
            }
        }
        let delta = factor * &self.rhs[row];
        self.cost_rhs -= &delta;
    }

    /// Current objective value (the cost row tracks its negation).
    fn objective_value(&self) -> Rat {
        -self.cost_rhs.clone()
    }

    /// Runs simplex iterations until optimal or unbounded. Columns at or
    /// beyond `col_limit` never enter the basis.
    fn iterate(&mut self, col_limit: usize) -> PhaseOutcome {
        loop {
            // Bland: smallest-index column with negative reduced cost.
            let entering = (0..col_limit).find(|&j| self.cost[j].is_negative());
            let Some(j) = entering else {
                return PhaseOutcome::Done;
            };
            // Ratio test; ties broken by smallest basic variable index.
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    match &leave {
                        None => leave = Some((i, ratio)),
                        Some((best_i, best)) => {
                            if ratio < *best
                                || (ratio == *best && self.basis[i] < self.basis[*best_i])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((pivot_row, _)) = leave else {
                return PhaseOutcome::Unbounded;
            };
            self.pivot(pivot_row, j);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        debug_assert!(!pivot.is_zero());
        if pivot != Rat::one() {
            let inv = pivot.recip();
            for a in self.rows[row].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
            self.rhs[row] *= &inv;
        }
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    let delta = &factor * p;
                    self.rows[i][j] -= &delta;
                }
            }
            let delta = &factor * &pivot_rhs;
            self.rhs[i] -= &delta;
        }
        let cfactor = self.cost[col].clone();
        if !cfactor.is_zero() {
            for (j, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    let delta = &cfactor * p;
                    self.cost[j] -= &delta;
                }
            }
            let delta = &cfactor * &pivot_rhs;
            self.cost_rhs -= &delta;
        }
        self.basis[row] = col;
    }

    /// After a zero-objective phase 1: pivots artificial variables out of the
    /// basis where possible and drops rows that turn out redundant.
    fn purge_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.art_start {
                debug_assert!(self.rhs[i].is_zero());
                let col = (0..self.art_start).find(|&j| !self.rows[i][j].is_zero());
                match col {
                    Some(j) => self.pivot(i, j),
                    None => {
                        // Redundant constraint.
                        self.rows.swap_remove(i);
                        self.rhs.swap_remove(i);
                        self.basis.swap_remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    fn structural_values(&self) -> Vec<Rat> {
        let mut values = vec![Rat::zero(); self.num_structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                values[b] = self.rhs[i].clone();
            }
        }
        values
    }
}

fn effective_relation(rel: Relation, flipped: bool) -> Relation {
    if !flipped {
        return rel;
    }
    match rel {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}

/// Runs phase 1 and returns the tableau positioned at a basic feasible point,
/// or `None` when the model is infeasible.
fn phase1(model: &LpModel) -> Option<Tableau> {
    let mut t = Tableau::build(model);
    let total = t.cost.len();
    let mut phase1_cost = vec![Rat::zero(); total];
    for c in phase1_cost.iter_mut().skip(t.art_start) {
        *c = Rat::one();
    }
    t.set_objective(phase1_cost);
    match t.iterate(total) {
        // Phase 1 is bounded below by zero, so unboundedness is impossible.
        PhaseOutcome::Unbounded => unreachable!("phase 1 cannot be unbounded"),
        PhaseOutcome::Done => {}
    }
    if t.objective_value().is_positive() {
        return None;
    }
    t.purge_artificials();
    Some(t)
}

/// Solves the model to a basic optimal solution.
pub fn solve_lp(model: &LpModel) -> LpSolution {
    let Some(mut t) = phase1(model) else {
        return LpSolution::infeasible();
    };
    let total = t.cost.len();
    let mut c = vec![Rat::zero(); total];
    c[..model.num_vars].clone_from_slice(&model.objective);
    t.set_objective(c);
    match t.iterate(t.art_start) {
        PhaseOutcome::Unbounded => LpSolution::unbounded(),
        PhaseOutcome::Done => {
            let values = t.structural_values();
            let objective_value = t.objective_value();
            debug_assert!(model.is_feasible(&values));
            debug_assert_eq!(model.objective_at(&values), objective_value);
            LpSolution {
                status: LpStatus::Optimal,
                values,
                objective_value,
                is_basic: true,
            }
        }
    }
}

/// Finds any basic feasible point (phase 1 only); the objective is reported
/// at that point but not optimized.
pub fn find_basic_feasible(model: &LpModel) -> LpSolution {
    let Some(t) = phase1(model) else {
        return LpSolution::infeasible();
    };
    let values = t.structural_values();
    debug_assert!(model.is_feasible(&values));
    let objective_value = model.objective_at(&values);
    LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
        is_basic: true,
    }
}
