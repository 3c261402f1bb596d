//! Stage two of the approximation scheme: pack the dense side of a guess.
//! Large items are linear-grouped and size-rounded, the cost table is
//! rounded up to integer powers of (1+eps), and a configuration program with
//! integrality only on expensive templates chooses the bins. Small items
//! ride along through a feasibility LP whose basic solution leaves few
//! fractional items; those spill into overflow bins.

use std::collections::VecDeque;

use crate::epsilon::Epsilon;
use crate::error::SolveError;
use crate::instance::Instance;
use crate::lp::{find_basic_feasible, LpModel, LpStatus, Relation};
use crate::milp::{solve_milp_with_cutoff, Budget, MilpModel};
use crate::packing::{packing_cost, Packing};
use crate::rational::Rat;

/// The dense side split at the large-item threshold `eps`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSplit {
    /// Ids with size at least `eps`, descending size then ascending id.
    pub large: Vec<usize>,
    /// Ids with size below `eps`, same order.
    pub small: Vec<usize>,
}

pub fn split_small_large(inst: &Instance, dense_ids: &[usize], eps: &Epsilon) -> DenseSplit {
    let mut member = vec![false; inst.n() + 1];
    for &id in dense_ids {
        member[id] = true;
    }
    let mut large = Vec::new();
    let mut small = Vec::new();
    for id in inst.ids_by_size_desc() {
        if !member[id] {
            continue;
        }
        if inst.size_of(id) >= eps.value() {
            large.push(id);
        } else {
            small.push(id);
        }
    }
    DenseSplit { large, small }
}

/// Linear grouping of the large items into `1/eps^3` near-equal classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearGrouping {
    /// First class: removed from the rounded instance, packed one per bin.
    pub upsilon1: Vec<usize>,
    /// Distinct rounded sizes of the remaining classes, descending.
    pub z_values: Vec<Rat>,
    /// Demand per rounded size, aligned with `z_values`.
    pub z_counts: Vec<usize>,
    /// Member ids per rounded size, largest first, aligned with `z_values`.
    pub z_pools: Vec<Vec<usize>>,
}

/// Cuts the large items (descending) into classes sized by the ceiling-first
/// profile, removes the first class, and rounds each remaining class up to
/// its largest member. Equal rounded sizes merge into one demand.
pub fn linear_group_large(inst: &Instance, large: &[usize], eps: &Epsilon) -> LinearGrouping {
    let m = eps.inv_cu_usize();
    let profile = super::sparse::card_profile(large.len(), m);
    let upsilon1 = large[..profile[0]].to_vec();
    let mut z_values: Vec<Rat> = Vec::new();
    let mut z_counts = Vec::new();
    let mut z_pools: Vec<Vec<usize>> = Vec::new();
    let mut start = profile[0];
    for &card in &profile[1..] {
        if card == 0 {
            break;
        }
        let class = &large[start..start + card];
        start += card;
        let rounded = inst.size_of(class[0]).clone();
        if z_values.last() == Some(&rounded) {
            *z_counts.last_mut().unwrap() += card;
            z_pools.last_mut().unwrap().extend_from_slice(class);
        } else {
            z_values.push(rounded);
            z_counts.push(card);
            z_pools.push(class.to_vec());
        }
    }
    LinearGrouping { upsilon1, z_values, z_counts, z_pools }
}

/// Cost table rounded up to integer powers of (1+eps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedCost {
    g: Vec<Rat>,
    levels: Vec<Rat>,
    inverse: Vec<usize>,
    level_of: Vec<usize>,
}

impl RoundedCost {
    /// Rounded cost of cardinality `j`.
    pub fn g_at(&self, j: usize) -> &Rat {
        &self.g[j]
    }

    /// Distinct rounded values over cardinalities `1..=n`, ascending.
    pub fn levels(&self) -> &[Rat] {
        &self.levels
    }

    /// Largest cardinality priced at the level: the bin capacity it buys.
    pub fn inverse_at(&self, level: usize) -> usize {
        self.inverse[level]
    }

    /// Index of `g(j)` among the levels, for `j >= 1`.
    pub fn level_of_cardinality(&self, j: usize) -> usize {
        self.level_of[j]
    }
}

/// Rounds each cost value up to the next integer power of (1+eps); a value
/// already equal to a power maps to itself. The result is monotone and
/// satisfies `f <= g <= (1+eps) f` pointwise.
#[allow(clippy::needless_range_loop)]
pub fn round_cost_function(inst: &Instance, eps: &Epsilon) -> RoundedCost {
    let n = inst.n();
    let factor = Rat::one() + eps.value();
    let mut g = Vec::with_capacity(n + 1);
    g.push(Rat::zero());
    let mut power = Rat::one();
    let mut levels: Vec<Rat> = Vec::new();
    let mut inverse: Vec<usize> = Vec::new();
    let mut level_of = vec![0usize; n + 1];
    for j in 1..=n {
        let f = inst.cost().at(j);
        while &power < f {
            power = &power * &factor;
        }
        g.push(power.clone());
        if levels.last() == Some(&power) {
            *inverse.last_mut().unwrap() = j;
        } else {
            levels.push(power.clone());
            inverse.push(j);
        }
        level_of[j] = levels.len() - 1;
    }
    RoundedCost { g, levels, inverse, level_of }
}

/// Price threshold separating cheap templates from expensive ones at the
/// ceiling `omega`.
pub fn expensive_threshold(omega: &Rat, eps: &Epsilon) -> Rat {
    let base = eps.value().recip() + Rat::one();
    let exponent = (eps.inv_cu() - 1) as u32;
    let phi = &eps.value().pow(2) / &base.pow(exponent);
    omega * &phi
}

/// A dense bin template: multiplicities per rounded size plus a price level
/// that fixes the bin's cost and capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseConfig {
    pub gamma: Vec<usize>,
    /// Index into the rounded cost levels.
    pub level: usize,
    /// Price of one bin of this template.
    pub zeta: Rat,
    /// Cardinality left for small items.
    pub small_slots: usize,
    /// Size left for small items.
    pub small_room: Rat,
    /// Expensive templates alone carry integrality in the bin program.
    pub expensive: bool,
}

/// All templates admissible at the price ceiling `omega_level`: price at
/// least `g(1/eps^2 + 1)` and at most the ceiling, contents within the
/// capacity the price buys and within one bin's size, never more of a size
/// than the rounded instance supplies. Level-major, lexicographic in gamma.
/// Charges one budget unit per template.
pub fn enumerate_dense_configurations(
    grouping: &LinearGrouping,
    rc: &RoundedCost,
    omega_level: usize,
    eps: &Epsilon,
    budget: &Budget,
) -> Result<Vec<DenseConfig>, SolveError> {
    let min_card = eps.inv_sq_usize() + 1;
    let mut out = Vec::new();
    if min_card >= rc.level_of.len() {
        return Ok(out);
    }
    let omega = &rc.levels[omega_level];
    let threshold = expensive_threshold(omega, eps);
    for level in rc.level_of_cardinality(min_card)..=omega_level {
        let zeta = rc.levels[level].clone();
        let expensive = zeta > threshold;
        let capacity = rc.inverse_at(level);
        let mut gamma = vec![0usize; grouping.z_values.len()];
        fill_gamma(
            grouping,
            level,
            &zeta,
            capacity,
            expensive,
            0,
            0,
            Rat::zero(),
            &mut gamma,
            &mut out,
            budget,
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill_gamma(
    grouping: &LinearGrouping,
    level: usize,
    zeta: &Rat,
    capacity: usize,
    expensive: bool,
    z: usize,
    used: usize,
    used_size: Rat,
    gamma: &mut Vec<usize>,
    out: &mut Vec<DenseConfig>,
    budget: &Budget,
) -> Result<(), SolveError> {
    if z == grouping.z_values.len() {
        budget.charge(1)?;
        out.push(DenseConfig {
            gamma: gamma.clone(),
            level,
            zeta: zeta.clone(),
            small_slots: capacity - used,
            small_room: Rat::one() - &used_size,
            expensive,
        });
        return Ok(());
    }
    let limit = grouping.z_counts[z].min(capacity - used);
    for c in 0..=limit {
        let size = &used_size + &(&grouping.z_values[z] * Rat::from_usize(c));
        if size > Rat::one() {
            break;
        }
        gamma[z] = c;
        fill_gamma(
            grouping, level, zeta, capacity, expensive, z + 1, used + c, size, gamma, out, budget,
        )?;
    }
    gamma[z] = 0;
    Ok(())
}

/// Solved bin-choice program for one price ceiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMilp {
    /// Bin counter per template; integral on expensive templates.
    pub counters: Vec<Rat>,
    /// Counters rounded up: the bins actually opened.
    pub opened: Vec<usize>,
    /// Exact optimum of the program (before rounding up).
    pub objective: Rat,
    /// Price of the extra bins the round-up pays for.
    pub supplementary_cost: Rat,
}

/// Builds and solves the bin-choice program: cover every rounded size demand
/// and give every small item a fractional home, paying each opened template
/// its price. Interchangeable small items (equal sizes) share one variable
/// block, which preserves the optimum exactly. `Ok(None)` means no solution
/// exists, or none strictly below the cutoff.
pub fn build_and_solve_dense_milp(
    configs: &[DenseConfig],
    grouping: &LinearGrouping,
    small_groups: &[(Rat, usize)],
    budget: &Budget,
    cutoff: Option<&Rat>,
) -> Result<Option<DenseMilp>, SolveError> {
    let demand_total: usize = grouping.z_counts.iter().sum();
    if configs.is_empty() {
        return Ok(if demand_total == 0 && small_groups.is_empty() {
            Some(DenseMilp {
                counters: Vec::new(),
                opened: Vec::new(),
                objective: Rat::zero(),
                supplementary_cost: Rat::zero(),
            })
        } else {
            None
        });
    }
    let k = configs.len();
    let groups = small_groups.len();
    let num_vars = k + k * groups;
    let mut objective = vec![Rat::zero(); num_vars];
    for (c, config) in configs.iter().enumerate() {
        objective[c] = config.zeta.clone();
    }
    let mut base = LpModel::new(num_vars, objective);
    for (z, &count) in grouping.z_counts.iter().enumerate() {
        let mut coeffs = vec![Rat::zero(); num_vars];
        for (c, config) in configs.iter().enumerate() {
            coeffs[c] = Rat::from_usize(config.gamma[z]);
        }
        base.push_row(coeffs, Relation::Ge, Rat::from_usize(count));
    }
    for (gr, (_, count)) in small_groups.iter().enumerate() {
        let mut coeffs = vec![Rat::zero(); num_vars];
        for c in 0..k {
            coeffs[k + c * groups + gr] = Rat::one();
        }
        base.push_row(coeffs, Relation::Ge, Rat::from_usize(*count));
    }
    for (c, config) in configs.iter().enumerate() {
        if groups == 0 {
            break;
        }
        let mut slots = vec![Rat::zero(); num_vars];
        let mut room = vec![Rat::zero(); num_vars];
        for (gr, (size, _)) in small_groups.iter().enumerate() {
            slots[k + c * groups + gr] = Rat::one();
            room[k + c * groups + gr] = size.clone();
        }
        slots[c] = -Rat::from_usize(config.small_slots);
        room[c] = -config.small_room.clone();
        base.push_row(slots, Relation::Le, Rat::zero());
        base.push_row(room, Relation::Le, Rat::zero());
    }
    let integer_vars: Vec<usize> =
        (0..k).filter(|&c| configs[c].expensive).collect();
    let model = MilpModel::new(base, integer_vars);
    let solution = solve_milp_with_cutoff(&model, budget, cutoff)?;
    match solution.status {
        LpStatus::Optimal => {
            let counters: Vec<Rat> = solution.values[..k].to_vec();
            let opened: Vec<usize> = counters
                .iter()
                .map(|v| v.ceil_usize().expect("nonnegative counter"))
                .collect();
            let supplementary_cost = counters
                .iter()
                .zip(configs)
                .filter(|(v, _)| !v.is_integer())
                .map(|(_, config)| config.zeta.clone())
                .sum();
            Ok(Some(DenseMilp {
                counters,
                opened,
                objective: solution.objective_value,
                supplementary_cost,
            }))
        }
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => {
            Err(SolveError::Internal("dense bin program unbounded".into()))
        }
    }
}

/// Spreads the small items over the opened bins: at most `small_slots` items
/// and `small_room` size per bin, every item fully assigned. Returns a basic
/// assignment matrix indexed `[bin][item]`, or `None` if the LP is
/// infeasible (which the bin program's capacities rule out).
#[allow(clippy::needless_range_loop)]
pub fn assign_small_items(
    inst: &Instance,
    bins: &[usize],
    configs: &[DenseConfig],
    small_ids: &[usize],
) -> Option<Vec<Vec<Rat>>> {
    let b = bins.len();
    let s = small_ids.len();
    if s == 0 {
        return Some(vec![Vec::new(); b]);
    }
    let num_vars = b * s;
    let mut model = LpModel::new(num_vars, vec![Rat::zero(); num_vars]);
    for (row, &config) in bins.iter().enumerate() {
        let mut slots = vec![Rat::zero(); num_vars];
        let mut room = vec![Rat::zero(); num_vars];
        for (i, &id) in small_ids.iter().enumerate() {
            slots[row * s + i] = Rat::one();
            room[row * s + i] = inst.size_of(id).clone();
        }
        model.push_row(slots, Relation::Le, Rat::from_usize(configs[config].small_slots));
        model.push_row(room, Relation::Le, configs[config].small_room.clone());
    }
    for i in 0..s {
        let mut coeffs = vec![Rat::zero(); num_vars];
        for row in 0..b {
            coeffs[row * s + i] = Rat::one();
        }
        model.push_row(coeffs, Relation::Eq, Rat::one());
    }
    let solution = find_basic_feasible(&model);
    match solution.status {
        LpStatus::Optimal => {
            let mut matrix = vec![vec![Rat::zero(); s]; b];
            for row in 0..b {
                for i in 0..s {
                    matrix[row][i] = solution.values[row * s + i].clone();
                }
            }
            Some(matrix)
        }
        _ => None,
    }
}

/// Result of packing one dense side at one price ceiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseOutcome {
    pub packing: Packing,
    /// True cost of `packing` under the instance's own table.
    pub cost: Rat,
    /// Price ceiling used; absent when no bin program ran.
    pub omega_level: Option<usize>,
    pub milp_objective: Rat,
    pub supplementary_cost: Rat,
    /// Bins the program opened (before overflow and first-class bins).
    pub opened_bins: usize,
    /// Small items the basic assignment left fractional.
    pub fractional_removed: usize,
    /// Cardinality of each bin opened for the spilled fractional items.
    pub overflow_cards: Vec<usize>,
    pub upsilon1_bins: usize,
}

fn upsilon1_only_outcome(inst: &Instance, upsilon1: &[usize]) -> DenseOutcome {
    let mut packing = Packing::new(upsilon1.iter().map(|&id| vec![id]).collect());
    packing.canonicalize();
    let cost = packing_cost(inst, &packing);
    DenseOutcome {
        packing,
        cost,
        omega_level: None,
        milp_objective: Rat::zero(),
        supplementary_cost: Rat::zero(),
        opened_bins: 0,
        fractional_removed: 0,
        overflow_cards: Vec::new(),
        upsilon1_bins: upsilon1.len(),
    }
}

/// Packs the dense side at one price ceiling: solve the bin program, fill
/// the opened bins with rounded large items (template order, largest first),
/// settle the small items by the basic assignment, and spill fractional ones
/// into overflow bins of at most `1/eps` items.
#[allow(clippy::too_many_arguments)]
pub fn pack_dense_for_cap(
    inst: &Instance,
    split: &DenseSplit,
    grouping: &LinearGrouping,
    rc: &RoundedCost,
    omega_level: usize,
    eps: &Epsilon,
    budget: &Budget,
    cutoff: Option<&Rat>,
) -> Result<Option<DenseOutcome>, SolveError> {
    let configs = enumerate_dense_configurations(grouping, rc, omega_level, eps, budget)?;
    let small_groups = group_small_sizes(inst, &split.small);
    let milp =
        match build_and_solve_dense_milp(&configs, grouping, &small_groups, budget, cutoff)? {
            Some(milp) => milp,
            None => return Ok(None),
        };
    let bins: Vec<usize> = milp
        .opened
        .iter()
        .enumerate()
        .flat_map(|(c, &count)| std::iter::repeat_n(c, count))
        .collect();
    let mut contents: Vec<Vec<usize>> = vec![Vec::new(); bins.len()];
    let mut pools: Vec<VecDeque<usize>> =
        grouping.z_pools.iter().map(|p| p.iter().copied().collect()).collect();
    for (b, &c) in bins.iter().enumerate() {
        for (z, &want) in configs[c].gamma.iter().enumerate() {
            for _ in 0..want {
                match pools[z].pop_front() {
                    Some(id) => contents[b].push(id),
                    None => break,
                }
            }
        }
    }
    assert!(pools.iter().all(|p| p.is_empty()), "coverage rows drain every pool");
    let mut removed: Vec<usize> = Vec::new();
    if !split.small.is_empty() {
        let matrix = match assign_small_items(inst, &bins, &configs, &split.small) {
            Some(matrix) => matrix,
            None => {
                return Err(SolveError::Internal(
                    "small-item assignment infeasible despite program capacities".into(),
                ))
            }
        };
        for (i, &id) in split.small.iter().enumerate() {
            let home = (0..bins.len()).find(|&b| matrix[b][i] == Rat::one());
            match home {
                Some(b) => contents[b].push(id),
                None => removed.push(id),
            }
        }
    }
    let fractional_removed = removed.len();
    removed.sort_unstable();
    let chunk = eps.inv() as usize;
    let overflow: Vec<Vec<usize>> = removed.chunks(chunk).map(|c| c.to_vec()).collect();
    let overflow_cards: Vec<usize> = overflow.iter().map(|b| b.len()).collect();
    let opened_bins = bins.len();
    let mut all_bins: Vec<Vec<usize>> =
        contents.into_iter().filter(|b| !b.is_empty()).collect();
    all_bins.extend(overflow);
    all_bins.extend(grouping.upsilon1.iter().map(|&id| vec![id]));
    let mut packing = Packing::new(all_bins);
    packing.canonicalize();
    let cost = packing_cost(inst, &packing);
    Ok(Some(DenseOutcome {
        packing,
        cost,
        omega_level: Some(omega_level),
        milp_objective: milp.objective,
        supplementary_cost: milp.supplementary_cost,
        opened_bins,
        fractional_removed,
        overflow_cards,
        upsilon1_bins: grouping.upsilon1.len(),
    }))
}

/// Groups the small ids (descending size) into (size, multiplicity) runs.
pub fn group_small_sizes(inst: &Instance, small: &[usize]) -> Vec<(Rat, usize)> {
    let mut groups: Vec<(Rat, usize)> = Vec::new();
    for &id in small {
        let size = inst.size_of(id);
        match groups.last_mut() {
            Some((s, count)) if s == size => *count += 1,
            _ => groups.push((size.clone(), 1)),
        }
    }
    groups
}

/// Packs one guess's dense side end to end. A dense bin holds more than
/// `1/eps^2` items, so a nonempty dense side of at most that many items is
/// rejected outright; the shape that mirrors any packing's own dense side
/// always survives this test. Otherwise the admissible price ceilings are
/// scanned in ascending order, each program cut off at the best objective
/// seen, and the cheapest outcome by true cost wins (ties to the lower
/// ceiling).
pub fn pack_dense(
    inst: &Instance,
    dense_ids: &[usize],
    rc: &RoundedCost,
    eps: &Epsilon,
    budget: &Budget,
) -> Result<Option<DenseOutcome>, SolveError> {
    if dense_ids.is_empty() {
        return Ok(Some(upsilon1_only_outcome(inst, &[])));
    }
    if dense_ids.len() <= eps.inv_sq_usize() {
        return Ok(None);
    }
    let split = split_small_large(inst, dense_ids, eps);
    let grouping = linear_group_large(inst, &split.large, eps);
    let rounded_total: usize = grouping.z_counts.iter().sum::<usize>() + split.small.len();
    if rounded_total == 0 {
        return Ok(Some(upsilon1_only_outcome(inst, &grouping.upsilon1)));
    }
    let min_card = eps.inv_sq_usize() + 1;
    debug_assert!(min_card <= inst.n());
    let mut best: Option<DenseOutcome> = None;
    let mut cutoff: Option<Rat> = None;
    for omega_level in rc.level_of_cardinality(min_card)..rc.levels().len() {
        let outcome = pack_dense_for_cap(
            inst,
            &split,
            &grouping,
            rc,
            omega_level,
            eps,
            budget,
            cutoff.as_ref(),
        )?;
        if let Some(outcome) = outcome {
            cutoff = Some(outcome.milp_objective.clone());
            let better = match &best {
                Some(b) => outcome.cost < b.cost,
                None => true,
            };
            if better {
                best = Some(outcome);
            }
        }
    }
    Ok(best)
}
