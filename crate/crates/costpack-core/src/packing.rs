//! Packings and their verification.
//!
//! A packing is a list of bins, each a list of item ids. Feasibility only
//! constrains the total size per bin (at most 1); cardinality is priced, not
//! capped. Every solver output in this crate is re-checked through
//! [`verify_packing`] before it is trusted.

use std::collections::BTreeSet;

use crate::epsilon::Epsilon;
use crate::instance::Instance;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Packing {
    pub bins: Vec<Vec<usize>>,
}

impl Packing {
    pub fn new(bins: Vec<Vec<usize>>) -> Self {
        Packing { bins }
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    pub fn item_count(&self) -> usize {
        self.bins.iter().map(|b| b.len()).sum()
    }

    /// Sorts ids within bins and bins lexicographically, giving every packing
    /// a unique byte representation (cost is order-invariant).
    pub fn canonicalize(&mut self) {
        for bin in &mut self.bins {
            bin.sort_unstable();
        }
        self.bins.sort();
    }

    /// Bins of `self` followed by bins of `other`.
    pub fn union(mut self, other: Packing) -> Packing {
        self.bins.extend(other.bins);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Bin total size exceeds 1.
    OverfullBin { bin: usize, total: Rat },
    /// An expected item id appears in no bin.
    MissingItem { id: usize },
    /// An item id appears in more than one bin (or twice in one).
    DuplicateItem { id: usize },
    /// An id outside the expected item set.
    UnknownItem { id: usize },
    /// Bins must be nonempty.
    EmptyBin { bin: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::OverfullBin { bin, total } => {
                write!(f, "bin {bin} overfull: total size {total} > 1")
            }
            Violation::MissingItem { id } => write!(f, "item {id} is not packed"),
            Violation::DuplicateItem { id } => write!(f, "item {id} packed more than once"),
            Violation::UnknownItem { id } => write!(f, "unknown item id {id}"),
            Violation::EmptyBin { bin } => write!(f, "bin {bin} is empty"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `packing` partitions exactly the full item set of `inst`
/// into bins of total size at most 1.
pub fn verify_packing(inst: &Instance, packing: &Packing) -> VerificationReport {
    let expected: BTreeSet<usize> = (1..=inst.n()).collect();
    verify_packing_of(inst, packing, &expected)
}

/// Like [`verify_packing`], but against an arbitrary expected id subset;
/// used to check per-stage sub-packings.
pub fn verify_packing_of(
    inst: &Instance,
    packing: &Packing,
    expected: &BTreeSet<usize>,
) -> VerificationReport {
    let mut violations = Vec::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for (bin_idx, bin) in packing.bins.iter().enumerate() {
        if bin.is_empty() {
            violations.push(Violation::EmptyBin { bin: bin_idx });
            continue;
        }
        let mut total = Rat::zero();
        for &id in bin {
            if id == 0 || id > inst.n() || !expected.contains(&id) {
                violations.push(Violation::UnknownItem { id });
                continue;
            }
            if !seen.insert(id) {
                violations.push(Violation::DuplicateItem { id });
                continue;
            }
            total += inst.size_of(id);
        }
        if total > Rat::one() {
            violations.push(Violation::OverfullBin { bin: bin_idx, total });
        }
    }
    for &id in expected {
        if !seen.contains(&id) {
            violations.push(Violation::MissingItem { id });
        }
    }
    VerificationReport { violations }
}

/// Total cost of a packing: the sum of `f(|bin|)` over its bins.
/// Precondition: the packing verifies against `inst`.
pub fn packing_cost(inst: &Instance, packing: &Packing) -> Rat {
    packing
        .bins
        .iter()
        .map(|bin| inst.cost().at(bin.len()))
        .sum()
}

/// Density classes used by the approximation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityClass {
    /// Cardinality between 1 and `1/eps^2`.
    Sparse,
    /// Cardinality above `1/eps^2`.
    Dense,
}

/// Classifies a bin by its cardinality.
pub fn bin_density_class(cardinality: usize, eps: &Epsilon) -> DensityClass {
    if (cardinality as u64) > eps.inv_sq() {
        DensityClass::Dense
    } else {
        DensityClass::Sparse
    }
}

/// Splits a packing's cost into (sparse-bin cost, dense-bin cost) with the
/// bin index lists for each side.
pub fn split_cost_by_density(
    inst: &Instance,
    packing: &Packing,
    eps: &Epsilon,
) -> (Rat, Rat, Vec<usize>, Vec<usize>) {
    let mut sparse_cost = Rat::zero();
    let mut dense_cost = Rat::zero();
    let mut sparse_bins = Vec::new();
    let mut dense_bins = Vec::new();
    for (idx, bin) in packing.bins.iter().enumerate() {
        match bin_density_class(bin.len(), eps) {
            DensityClass::Sparse => {
                sparse_cost += inst.cost().at(bin.len());
                sparse_bins.push(idx);
            }
            DensityClass::Dense => {
                dense_cost += inst.cost().at(bin.len());
                dense_bins.push(idx);
            }
        }
    }
    (sparse_cost, dense_cost, sparse_bins, dense_bins)
}
