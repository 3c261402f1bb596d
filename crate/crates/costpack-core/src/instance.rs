//! Problem instances: items with rational sizes and a cardinality-dependent
//! bin cost function.
//!
//! A bin may hold any set of items whose sizes sum to at most 1, and paying
//! for a bin with `j` items costs `f(j)`. The cost table is normalized so
//! that `f(1) = 1`; the original scale is kept as a factor for reporting.

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("cost table must have {expected} entries (one per cardinality 0..=n), found {found}")]
    CostLengthMismatch { expected: usize, found: usize },
    #[error("item {id} has size {size} outside [0, 1]")]
    SizeOutOfRange { id: usize, size: String },
    #[error("cost table is not monotone at cardinality {at}")]
    NonMonotoneCost { at: usize },
    #[error("cost table anchor broken at cardinality {at}: got {value}")]
    BadAnchor { at: usize, value: String },
}

/// One item. Ids are dense, 1-based, and unique within an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: usize,
    pub size: Rat,
}

/// Monotone bin cost by cardinality, normalized so `f(1) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostFunction {
    table: Vec<Rat>,
}

impl CostFunction {
    /// `f(j)`. Panics when `j` exceeds the instance size.
    pub fn at(&self, j: usize) -> &Rat {
        &self.table[j]
    }

    /// Largest cardinality the table covers (the instance size).
    pub fn max_cardinality(&self) -> usize {
        self.table.len() - 1
    }

    pub fn table(&self) -> &[Rat] {
        &self.table
    }
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: Vec<Item>,
    cost: CostFunction,
    normalization: Rat,
}

/// Checks sizes and the raw cost table, normalizes the table so `f(1) = 1`,
/// and assembles an [`Instance`]. Items get ids `1..=n` in input order.
pub fn validate_instance(sizes: Vec<Rat>, raw_cost: Vec<Rat>) -> Result<Instance, InstanceError> {
    let n = sizes.len();
    if raw_cost.len() != n + 1 {
        return Err(InstanceError::CostLengthMismatch {
            expected: n + 1,
            found: raw_cost.len(),
        });
    }
    for (idx, size) in sizes.iter().enumerate() {
        if size.is_negative() || *size > Rat::one() {
            return Err(InstanceError::SizeOutOfRange {
                id: idx + 1,
                size: size.to_string(),
            });
        }
    }
    if !raw_cost[0].is_zero() {
        return Err(InstanceError::BadAnchor {
            at: 0,
            value: raw_cost[0].to_string(),
        });
    }
    for j in 1..=n {
        if raw_cost[j] < raw_cost[j - 1] {
            return Err(InstanceError::NonMonotoneCost { at: j });
        }
    }
    let normalization = if n >= 1 {
        if !raw_cost[1].is_positive() {
            return Err(InstanceError::BadAnchor {
                at: 1,
                value: raw_cost[1].to_string(),
            });
        }
        raw_cost[1].clone()
    } else {
        Rat::one()
    };
    let table = raw_cost.iter().map(|c| c / &normalization).collect();
    let items = sizes
        .into_iter()
        .enumerate()
        .map(|(idx, size)| Item { id: idx + 1, size })
        .collect();
    Ok(Instance {
        items,
        cost: CostFunction { table },
        normalization,
    })
}

impl Instance {
    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: usize) -> &Item {
        &self.items[id - 1]
    }

    pub fn size_of(&self, id: usize) -> &Rat {
        &self.items[id - 1].size
    }

    pub fn cost(&self) -> &CostFunction {
        &self.cost
    }

    /// The raw `f(1)` divided out during validation.
    pub fn normalization(&self) -> &Rat {
        &self.normalization
    }

    /// Converts a normalized cost back to the input scale.
    pub fn denormalize(&self, cost: &Rat) -> Rat {
        cost * &self.normalization
    }

    /// Item ids ordered by size descending, ties by id ascending. This is the
    /// one total order all deterministic tie-breaking builds on.
    pub fn ids_by_size_desc(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (1..=self.n()).collect();
        ids.sort_by(|a, b| {
            self.size_of(*b)
                .cmp(self.size_of(*a))
                .then(a.cmp(b))
        });
        ids
    }

    pub fn total_size(&self) -> Rat {
        self.items.iter().map(|it| &it.size).sum()
    }

    /// Clones of the items with the given ids, in the given order.
    pub fn items_with_ids(&self, ids: &[usize]) -> Vec<Item> {
        ids.iter().map(|id| self.item(*id).clone()).collect()
    }
}

/// Orders item references by size descending, ties by id ascending.
pub fn sort_items_desc(items: &mut [Item]) {
    items.sort_by(|a, b| b.size.cmp(&a.size).then(a.id.cmp(&b.id)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn normalizes_cost_table() {
        let inst = validate_instance(
            vec![rat(1, 2), rat(1, 3), rat(0, 1)],
            vec![rat(0, 1), rat(2, 1), rat(3, 1), rat(3, 1)],
        )
        .unwrap();
        assert_eq!(inst.cost().table(), &[rat(0, 1), rat(1, 1), rat(3, 2), rat(3, 2)]);
        assert_eq!(inst.normalization(), &rat(2, 1));
        assert_eq!(inst.denormalize(&rat(3, 2)), rat(3, 1));
        assert_eq!(inst.item(1).size, rat(1, 2));
        assert_eq!(inst.n(), 3);
    }

    #[test]
    fn rejects_bad_sizes() {
        let err = validate_instance(
            vec![rat(3, 2)],
            vec![rat(0, 1), rat(1, 1)],
        )
        .unwrap_err();
        assert_eq!(
            err,
            InstanceError::SizeOutOfRange { id: 1, size: "3/2".to_string() }
        );
        assert!(matches!(
            validate_instance(vec![rat(-1, 4)], vec![rat(0, 1), rat(1, 1)]),
            Err(InstanceError::SizeOutOfRange { id: 1, .. })
        ));
    }

    #[test]
    fn rejects_bad_cost_tables() {
        assert_eq!(
            validate_instance(vec![rat(1, 2)], vec![rat(0, 1)]).unwrap_err(),
            InstanceError::CostLengthMismatch { expected: 2, found: 1 }
        );
        assert_eq!(
            validate_instance(
                vec![rat(1, 2), rat(1, 2)],
                vec![rat(0, 1), rat(1, 1), rat(1, 2)]
            )
            .unwrap_err(),
            InstanceError::NonMonotoneCost { at: 2 }
        );
        assert!(matches!(
            validate_instance(vec![rat(1, 2)], vec![rat(1, 1), rat(1, 1)]),
            Err(InstanceError::BadAnchor { at: 0, .. })
        ));
        assert!(matches!(
            validate_instance(vec![rat(1, 2)], vec![rat(0, 1), rat(0, 1)]),
            Err(InstanceError::BadAnchor { at: 1, .. })
        ));
    }

    #[test]
    fn empty_instance_is_valid() {
        let inst = validate_instance(vec![], vec![rat(0, 1)]).unwrap();
        assert_eq!(inst.n(), 0);
        assert_eq!(inst.normalization(), &rat(1, 1));
    }

    #[test]
    fn deterministic_size_order() {
        let inst = validate_instance(
            vec![rat(1, 3), rat(1, 2), rat(1, 2), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1), rat(4, 1)],
        )
        .unwrap();
        assert_eq!(inst.ids_by_size_desc(), vec![2, 3, 1, 4]);
    }
}
