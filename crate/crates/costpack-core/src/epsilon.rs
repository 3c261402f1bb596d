//! Accuracy parameter handling for the approximation scheme.
//!
//! The scheme requires an accuracy parameter whose reciprocal is a positive
//! integer; every derived constant (`1/eps^2`, `1/eps^3`, ...) is then an
//! exact integer too. [`Epsilon`] validates that once and serves the derived
//! quantities without further error paths.

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EpsilonError {
    #[error("epsilon must be positive, got {0}")]
    NotPositive(String),
    #[error("epsilon must be the reciprocal of a positive integer, got {0}")]
    NotUnitFraction(String),
    #[error("epsilon {0} is too small for this build (derived constants overflow)")]
    TooSmall(String),
}

/// A validated accuracy parameter `eps = 1/t` for an integer `t >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epsilon {
    value: Rat,
    inv: u64,
}

impl Epsilon {
    pub fn new(value: Rat) -> Result<Self, EpsilonError> {
        if !value.is_positive() {
            return Err(EpsilonError::NotPositive(value.to_string()));
        }
        let inv_rat = value.recip();
        if !inv_rat.is_integer() || value > Rat::one() {
            return Err(EpsilonError::NotUnitFraction(value.to_string()));
        }
        let inv = inv_rat
            .floor_i64()
            .and_then(|v| u64::try_from(v).ok())
            .ok_or_else(|| EpsilonError::TooSmall(value.to_string()))?;
        // The scheme materializes vectors of length 1/eps^3 + 1.
        inv.checked_pow(3)
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| EpsilonError::TooSmall(value.to_string()))?;
        Ok(Epsilon { value, inv })
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    /// `1/eps` as an integer.
    pub fn inv(&self) -> u64 {
        self.inv
    }

    /// `1/eps^2`: the largest sparse bin cardinality.
    pub fn inv_sq(&self) -> u64 {
        self.inv * self.inv
    }

    /// `1/eps^3`: the number of size classes used by both stages.
    pub fn inv_cu(&self) -> u64 {
        self.inv * self.inv * self.inv
    }

    pub fn inv_sq_usize(&self) -> usize {
        self.inv_sq() as usize
    }

    pub fn inv_cu_usize(&self) -> usize {
        self.inv_cu() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn accepts_unit_fractions() {
        let e = Epsilon::new(rat(1, 2)).unwrap();
        assert_eq!(e.inv(), 2);
        assert_eq!(e.inv_sq(), 4);
        assert_eq!(e.inv_cu(), 8);
        assert_eq!(Epsilon::new(rat(1, 1)).unwrap().inv(), 1);
        assert_eq!(Epsilon::new(rat(1, 7)).unwrap().inv_cu(), 343);
    }

    #[test]
    fn rejects_non_unit_fractions() {
        assert!(matches!(
            Epsilon::new(rat(2, 3)),
            Err(EpsilonError::NotUnitFraction(_))
        ));
        assert!(matches!(
            Epsilon::new(rat(3, 2)),
            Err(EpsilonError::NotUnitFraction(_))
        ));
        assert!(matches!(
            Epsilon::new(rat(0, 1)),
            Err(EpsilonError::NotPositive(_))
        ));
        assert!(matches!(
            Epsilon::new(rat(-1, 2)),
            Err(EpsilonError::NotPositive(_))
        ));
    }
}
