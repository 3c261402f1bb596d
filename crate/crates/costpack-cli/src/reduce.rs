//! Reduction from 3-Partition to packing with a cardinality-k cost optimum.
//!
//! Given 3m integers that sum to m*Z with every value strictly between Z/4
//! and Z/2, the emitted instance packs exactly at the decision threshold
//! `m * f(k)` precisely when the integers split into m triples of sum Z.
//! The zero-sized padding items let every triple bin absorb `k - 3` extra
//! items for free, so the target cardinality k is reachable exactly when a
//! triple partition exists.

use costpack_core::{minimizer_k, rat, validate_instance, Instance, Rat};

use crate::formats::{InstanceFile, Metadata};

/// A 3-Partition decision instance: does `integers` split into m triples
/// each summing to `bound`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePartitionInput {
    pub integers: Vec<u64>,
    pub bound: u64,
    /// Cardinality the emitted cost function must favor; at least 3.
    pub target_k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvalidThreePartition {
    #[error("expected a positive multiple of 3 integers, got {0}")]
    BadCount(usize),
    #[error("bound must be positive")]
    BadBound,
    #[error("target cardinality must be at least 3, got {0}")]
    BadTarget(usize),
    #[error("integer #{index} = {value} is outside the open interval ({bound}/4, {bound}/2)")]
    OutOfRange { index: usize, value: u64, bound: u64 },
    #[error("integers sum to {sum}, expected m*Z = {expected}")]
    BadSum { sum: u128, expected: u128 },
}

/// Result of the reduction: the emitted file, its validated instance, and
/// the YES/NO decision threshold `m * f(k)` (the cost table has `f(1) = 1`,
/// so normalized and raw scale agree).
#[derive(Debug, Clone)]
pub struct Reduction {
    pub file: InstanceFile,
    pub instance: Instance,
    pub threshold: Rat,
}

/// Cost table of length `n + 1` whose per-item price `f(j)/j` is 1 below
/// `k` and `1 - 1/(2k)` from `k` on, making `k` the smallest minimizer:
/// `f(j) = j` for `j < k` and `f(j) = j * (2k - 1) / (2k)` for `j >= k`.
pub fn reduction_cost_table(n: usize, k: usize) -> Vec<Rat> {
    assert!(k >= 3, "reduction targets k >= 3");
    let discount = rat(2 * k as i64 - 1, 2 * k as i64);
    (0..=n)
        .map(|j| {
            if j < k {
                Rat::from_usize(j)
            } else {
                Rat::from_usize(j) * &discount
            }
        })
        .collect()
}

/// Validates the input, scales sizes to `s_i / Z`, pads with `m * (k - 3)`
/// zero-sized items, and attaches the documented cost template.
pub fn reduce_three_partition(tp: &ThreePartitionInput) -> Result<Reduction, InvalidThreePartition> {
    if tp.bound == 0 {
        return Err(InvalidThreePartition::BadBound);
    }
    if tp.target_k < 3 {
        return Err(InvalidThreePartition::BadTarget(tp.target_k));
    }
    let count = tp.integers.len();
    if count == 0 || !count.is_multiple_of(3) {
        return Err(InvalidThreePartition::BadCount(count));
    }
    let m = count / 3;
    let z = tp.bound;
    for (index, &value) in tp.integers.iter().enumerate() {
        // Strict bounds, in exact integer arithmetic: Z/4 < s and s < Z/2.
        if 4 * (value as u128) <= z as u128 || 2 * (value as u128) >= z as u128 {
            return Err(InvalidThreePartition::OutOfRange { index: index + 1, value, bound: z });
        }
    }
    let sum: u128 = tp.integers.iter().map(|&v| v as u128).sum();
    let expected = m as u128 * z as u128;
    if sum != expected {
        return Err(InvalidThreePartition::BadSum { sum, expected });
    }

    let k = tp.target_k;
    let n = m * k;
    let mut sizes: Vec<Rat> =
        tp.integers.iter().map(|&v| rat(v as i64, z as i64)).collect();
    sizes.extend(std::iter::repeat_n(Rat::zero(), m * (k - 3)));
    let cost = reduction_cost_table(n, k);
    let instance =
        validate_instance(sizes.clone(), cost.clone()).expect("reduction output validates");
    let classification = minimizer_k(instance.cost());
    assert_eq!(classification.k, k, "template minimizer check");

    let threshold = Rat::from_usize(m) * instance.cost().at(k);
    let discount = rat(2 * k as i64 - 1, 2 * k as i64);
    let metadata = Metadata {
        generator: Some("reduce-3p".to_string()),
        threshold: Some(threshold.to_string()),
        notes: vec![
            format!(
                "cost template: f(j) = j for j < {k}, f(j) = j*{discount} for j >= {k}"
            ),
            format!(
                "per-item price check: f(j)/j = 1 for 1 <= j < {k} and {discount} for j >= {k}; smallest minimizer is {k} (verified)"
            ),
            format!(
                "decision: optimum <= {threshold} iff the {count} integers split into {m} triples summing {z}"
            ),
        ],
        ..Metadata::default()
    };
    let file = InstanceFile::from_parts(&sizes, &cost, Some(metadata));
    Ok(Reduction { file, instance, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use costpack_core::classify::average_cost;
    use costpack_core::oracle::brute_force_opt;

    #[test]
    fn template_minimizer_is_exactly_k() {
        for k in 3..=8 {
            let n = 3 * k;
            let table = reduction_cost_table(n, k);
            let inst = validate_instance(vec![Rat::zero(); n], table).unwrap();
            let cls = minimizer_k(inst.cost());
            assert_eq!(cls.k, k);
            for j in 1..k {
                assert_eq!(average_cost(inst.cost(), j), Rat::one());
            }
            assert_eq!(average_cost(inst.cost(), k), rat(2 * k as i64 - 1, 2 * k as i64));
        }
    }

    #[test]
    fn yes_instance_meets_the_threshold_exactly() {
        let tp = ThreePartitionInput { integers: vec![2; 6], bound: 6, target_k: 4 };
        let red = reduce_three_partition(&tp).unwrap();
        assert_eq!(red.instance.n(), 8);
        let third: Vec<&Rat> =
            red.instance.items().iter().take(6).map(|it| &it.size).collect();
        assert!(third.iter().all(|s| **s == rat(1, 3)));
        assert!(red.instance.items()[6].size.is_zero());
        assert!(red.instance.items()[7].size.is_zero());
        assert_eq!(red.threshold, Rat::from_int(7));
        let (_, opt) = brute_force_opt(&red.instance, None).unwrap();
        assert_eq!(opt, red.threshold);
    }

    #[test]
    fn no_instance_exceeds_the_threshold() {
        // 13 = Z; no triple of {4,4,4,4,4,6} sums to 13.
        let tp = ThreePartitionInput { integers: vec![4, 4, 4, 4, 4, 6], bound: 13, target_k: 3 };
        let red = reduce_three_partition(&tp).unwrap();
        assert_eq!(red.instance.n(), 6);
        let (_, opt) = brute_force_opt(&red.instance, None).unwrap();
        assert!(opt > red.threshold, "opt {opt} <= threshold {}", red.threshold);
    }

    #[test]
    fn k_equal_3_adds_no_padding() {
        let tp = ThreePartitionInput { integers: vec![4, 4, 5, 4, 4, 5], bound: 13, target_k: 3 };
        let red = reduce_three_partition(&tp).unwrap();
        assert_eq!(red.instance.n(), 6);
        assert!(red.instance.items().iter().all(|it| it.size.is_positive()));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let ok = ThreePartitionInput { integers: vec![2; 6], bound: 6, target_k: 4 };
        assert!(reduce_three_partition(&ok).is_ok());

        let mut bad = ok.clone();
        bad.integers.pop();
        assert!(matches!(
            reduce_three_partition(&bad),
            Err(InvalidThreePartition::BadCount(5))
        ));

        let mut bad = ok.clone();
        bad.target_k = 2;
        assert!(matches!(
            reduce_three_partition(&bad),
            Err(InvalidThreePartition::BadTarget(2))
        ));

        let mut bad = ok.clone();
        bad.bound = 0;
        assert!(matches!(reduce_three_partition(&bad), Err(InvalidThreePartition::BadBound)));

        // 2 = 8/4 sits on the closed boundary, which the interval excludes.
        let bad = ThreePartitionInput { integers: vec![2, 3, 3, 3, 3, 2], bound: 8, target_k: 3 };
        assert!(matches!(
            reduce_three_partition(&bad),
            Err(InvalidThreePartition::OutOfRange { index: 1, value: 2, bound: 8 })
        ));

        let bad = ThreePartitionInput { integers: vec![4, 4, 4, 4, 4, 4], bound: 13, target_k: 3 };
        assert!(matches!(
            reduce_three_partition(&bad),
            Err(InvalidThreePartition::BadSum { sum: 24, expected: 26 })
        ));
    }
}
