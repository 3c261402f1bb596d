//! Exact rational arithmetic.
//!
//! Every quantity the solvers touch (sizes, costs, simplex tableaus) is an
//! exact rational. The solvers spend almost all of their time in rational
//! arithmetic, so [`Rat`] keeps values in a reduced `i128 / i128` pair as long
//! as they fit and transparently promotes to arbitrary precision
//! ([`num_rational::BigRational`]) when an operation would overflow.
//!
//! Invariant: a value representable with an `i128` numerator and denominator
//! is always stored in the `Small` form, reduced, with a positive denominator.
//! Equal values therefore always share a representation, which makes the
//! derived `PartialEq`/`Hash` sound.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
enum Repr {
    /// Reduced fraction, denominator strictly positive.
    Small { n: i128, d: i128 },
    /// Only used when the value does not fit `Small`.
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone, Debug)]
pub struct Rat(Repr);

/// Error produced when parsing a rational from text fails.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

fn gcd128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

impl Rat {
    fn small(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = gcd128(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        Rat(Repr::Small { n, d })
    }

    fn from_big(b: BigRational) -> Self {
        if let (Some(n), Some(d)) = (b.numer().to_i128(), b.denom().to_i128()) {
            // BigRational keeps itself reduced with a positive denominator.
            Rat(Repr::Small { n, d })
        } else {
            Rat(Repr::Big(b))
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { n, d } => {
                BigRational::new_raw(BigInt::from(*n), BigInt::from(*d))
            }
            Repr::Big(b) => b.clone(),
        }
    }

    /// `n / d`. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "rational with zero denominator");
        Rat::small(n as i128, d as i128)
    }

    pub fn from_int(n: i64) -> Self {
        Rat(Repr::Small { n: n as i128, d: 1 })
    }

    pub fn from_usize(n: usize) -> Self {
        Rat::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        match n.to_i128() {
            Some(v) => Rat(Repr::Small { n: v, d: 1 }),
            None => Rat(Repr::Big(BigRational::from_integer(n))),
        }
    }

    pub fn zero() -> Self {
        Rat(Repr::Small { n: 0, d: 1 })
    }

    pub fn one() -> Self {
        Rat(Repr::Small { n: 1, d: 1 })
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small { n, .. } => *n == 0,
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { n, .. } => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { n, .. } => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { d, .. } => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small { n, d } => {
                assert!(*n != 0, "reciprocal of zero");
                Rat::small(*d, *n)
            }
            Repr::Big(b) => {
                assert!(!b.is_zero(), "reciprocal of zero");
                Rat::from_big(b.recip())
            }
        }
    }

    /// Largest integer `<= self`, as a rational.
    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small { n, d } => Rat(Repr::Small { n: n.div_euclid(*d), d: 1 }),
            Repr::Big(b) => Rat::from_big(b.floor()),
        }
    }

    /// Smallest integer `>= self`, as a rational.
    pub fn ceil(&self) -> Self {
        match &self.0 {
            Repr::Small { n, d } => {
                Rat(Repr::Small { n: -((-n).div_euclid(*d)), d: 1 })
            }
            Repr::Big(b) => Rat::from_big(b.ceil()),
        }
    }

    pub fn floor_i64(&self) -> Option<i64> {
        match self.floor().0 {
            Repr::Small { n, .. } => i64::try_from(n).ok(),
            Repr::Big(b) => b.to_integer().to_i64(),
        }
    }

    pub fn ceil_i64(&self) -> Option<i64> {
        match self.ceil().0 {
            Repr::Small { n, .. } => i64::try_from(n).ok(),
            Repr::Big(b) => b.to_integer().to_i64(),
        }
    }

    pub fn floor_usize(&self) -> Option<usize> {
        self.floor_i64().and_then(|v| usize::try_from(v).ok())
    }

    pub fn ceil_usize(&self) -> Option<usize> {
        self.ceil_i64().and_then(|v| usize::try_from(v).ok())
    }

    /// Nonnegative integer power.
    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Rat::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn min_of(a: Rat, b: Rat) -> Rat {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of(a: Rat, b: Rat) -> Rat {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn add_impl(&self, rhs: &Rat, negate_rhs: bool) -> Rat {
        if let (Repr::Small { n: n1, d: d1 }, Repr::Small { n: n2, d: d2 }) =
            (&self.0, &rhs.0)
        {
            let n2 = if negate_rhs { n2.checked_neg() } else { Some(*n2) };
            if let Some(n2) = n2 {
                // a/b + c/d = (a*(d/g) + c*(b/g)) / lcm with g = gcd(b, d).
                let g = gcd128(*d1, *d2);
                let l = d1 / g;
                let r = d2 / g;
                let num = (|| {
                    let x = n1.checked_mul(r)?;
                    let y = n2.checked_mul(l)?;
                    x.checked_add(y)
                })();
                let den = d1.checked_mul(r);
                if let (Some(num), Some(den)) = (num, den) {
                    return Rat::small(num, den);
                }
            }
        }
        let b = if negate_rhs {
            self.to_big() - rhs.to_big()
        } else {
            self.to_big() + rhs.to_big()
        };
        Rat::from_big(b)
    }

    fn mul_impl(&self, rhs: &Rat) -> Rat {
        if let (Repr::Small { n: n1, d: d1 }, Repr::Small { n: n2, d: d2 }) =
            (&self.0, &rhs.0)
        {
            // Cross-reduce before multiplying to keep factors small.
            let g1 = gcd128(*n1, *d2);
            let g2 = gcd128(*n2, *d1);
            let num = (n1 / g1).checked_mul(n2 / g2);
            let den = (d1 / g2).checked_mul(d2 / g1);
            if let (Some(num), Some(den)) = (num, den) {
                // Already reduced by construction.
                let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
                return Rat(Repr::Small { n: num, d: den });
            }
        }
        Rat::from_big(self.to_big() * rhs.to_big())
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        // Canonical representation: equal values share a variant.
        match (&self.0, &other.0) {
            (Repr::Small { n: n1, d: d1 }, Repr::Small { n: n2, d: d2 }) => {
                n1 == n2 && d1 == d2
            }
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { n, d } => {
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                // Never aliases Small thanks to the canonical invariant.
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small { n: n1, d: d1 }, Repr::Small { n: n2, d: d2 }) =
            (&self.0, &other.0)
        {
            if d1 == d2 {
                return n1.cmp(n2);
            }
            if let (Some(a), Some(b)) = (n1.checked_mul(*d2), n2.checked_mul(*d1)) {
                return a.cmp(&b);
            }
        }
        self.to_big().cmp(&other.to_big())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $impl_method:ident $(, $extra:expr)?) => {
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                self.$impl_method(rhs $(, $extra)?)
            }
        }
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl, false);
forward_binop!(Sub, sub, add_impl, true);
forward_binop!(Mul, mul, mul_impl);

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        self.mul_impl(&rhs.recip())
    }
}

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        (&self).div(&rhs)
    }
}

impl Div<&Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        (&self).div(rhs)
    }
}

impl Div<Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        self.div(&rhs)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small { n, d } => match n.checked_neg() {
                Some(n) => Rat(Repr::Small { n, d: *d }),
                None => Rat::from_big(-self.to_big()),
            },
            Repr::Big(b) => Rat::from_big(-b.clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl DivAssign<&Rat> for Rat {
    fn div_assign(&mut self, rhs: &Rat) {
        *self = &*self / rhs;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        let mut acc = Rat::zero();
        for v in iter {
            acc += &v;
        }
        acc
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        let mut acc = Rat::zero();
        for v in iter {
            acc += v;
        }
        acc
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { n, d } => {
                if *d == 1 {
                    write!(f, "{n}")
                } else {
                    write!(f, "{n}/{d}")
                }
            }
            Repr::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `"p"` or `"p/q"` with arbitrary-precision signed integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRatError::Empty);
        }
        let parse_int = |t: &str| -> Result<BigInt, ParseRatError> {
            BigInt::from_str(t.trim()).map_err(|_| ParseRatError::Invalid(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Rat::from_bigint(parse_int(s)?)),
            Some((p, q)) => {
                let p = parse_int(p)?;
                let q = parse_int(q)?;
                if q.is_zero() {
                    return Err(ParseRatError::ZeroDenominator(s.to_string()));
                }
                Ok(Rat::from_big(BigRational::new(p, q)))
            }
        }
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

/// Convenience constructor used pervasively in tests.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

impl ToBigInt for Rat {
    fn to_bigint(&self) -> Option<BigInt> {
        if self.is_integer() {
            match &self.0 {
                Repr::Small { n, .. } => Some(BigInt::from(*n)),
                Repr::Big(b) => Some(b.to_integer()),
            }
        } else {
            None
        }
    }
}
