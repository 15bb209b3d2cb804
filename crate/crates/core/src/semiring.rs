//! Value domains for trellis flows.
//!
//! Three semirings are supported: exact sum-product over arbitrary-precision
//! rationals, sum-product over `f64`, and min-plus (tropical) over `f64`
//! extended with `+inf`. Every arithmetic step an algorithm performs goes
//! through an [`OpCounter`] so operation totals can be compared with closed
//! forms.
//!
//! Under min-plus the semiring "addition" is a comparison and the semiring
//! "multiplication" is an ordinary scalar addition; the counter books them
//! that way.

use std::fmt;
use std::ops::{Add, AddAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemiringKind {
    SumProductExact,
    SumProductFloat,
    MinPlus,
}

impl SemiringKind {
    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::SumProductExact => "sum-product exact",
            SemiringKind::SumProductFloat => "sum-product float",
            SemiringKind::MinPlus => "min-plus",
        }
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A commutative semiring `(S, plus, times, zero, one)` whose elements carry
/// their own operations.
pub trait Semiring: Clone + PartialEq + fmt::Debug + Send + Sync {
    const KIND: SemiringKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

/// Sum-product domains that also have subtraction and division, as needed by
/// the inclusion-exclusion formulas.
pub trait Field: Semiring {
    fn negate(&self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn recip(&self) -> Option<Self>;
    fn from_int(value: i64) -> Self;
    fn from_bigint(value: &BigInt) -> Self;
    /// Multiply by `2^exp`.
    fn scale_pow2(&self, exp: i32) -> Self;
}

impl Semiring for BigRational {
    const KIND: SemiringKind = SemiringKind::SumProductExact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for BigRational {
    fn negate(&self) -> Self {
        -self
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn recip(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(BigRational::recip(self))
        }
    }
    fn from_int(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }
    fn from_bigint(value: &BigInt) -> Self {
        BigRational::from_integer(value.clone())
    }
    fn scale_pow2(&self, exp: i32) -> Self {
        let p = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            self * BigRational::from_integer(p)
        } else {
            self / BigRational::from_integer(p)
        }
    }
}

impl Semiring for f64 {
    const KIND: SemiringKind = SemiringKind::SumProductFloat;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Field for f64 {
    fn negate(&self) -> Self {
        -self
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn recip(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn from_int(value: i64) -> Self {
        value as f64
    }
    fn from_bigint(value: &BigInt) -> Self {
        value.to_f64().unwrap_or(f64::NAN)
    }
    fn scale_pow2(&self, exp: i32) -> Self {
        self * 2f64.powi(exp)
    }
}

/// Element of the min-plus semiring. `+inf` is the additive identity and is
/// absorbing under `times`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Tropical(pub f64);

impl Tropical {
    pub const INFINITY: Tropical = Tropical(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }
}

impl Semiring for Tropical {
    const KIND: SemiringKind = SemiringKind::MinPlus;

    fn zero() -> Self {
        Tropical::INFINITY
    }
    fn one() -> Self {
        Tropical(0.0)
    }
    /// Minimum; on ties the left operand wins.
    fn plus(&self, other: &Self) -> Self {
        if other.0 < self.0 {
            *other
        } else {
            *self
        }
    }
    fn times(&self, other: &Self) -> Self {
        if self.is_infinite() || other.is_infinite() {
            Tropical::INFINITY
        } else {
            Tropical(self.0 + other.0)
        }
    }
    fn is_zero(&self) -> bool {
        self.is_infinite()
    }
}

impl fmt::Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Tallies of arithmetic operations performed by one computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCounter {
    pub mults: u64,
    pub adds: u64,
    pub comparisons: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    pub fn total(&self) -> u64 {
        self.mults + self.adds + self.comparisons
    }

    /// Semiring addition, counted as an addition (comparison under min-plus).
    pub fn plus<S: Semiring>(&mut self, x: &S, y: &S) -> S {
        match S::KIND {
            SemiringKind::MinPlus => self.comparisons += 1,
            _ => self.adds += 1,
        }
        x.plus(y)
    }

    /// Semiring multiplication, counted as a multiplication (addition under
    /// min-plus).
    pub fn times<S: Semiring>(&mut self, x: &S, y: &S) -> S {
        match S::KIND {
            SemiringKind::MinPlus => self.adds += 1,
            _ => self.mults += 1,
        }
        x.times(y)
    }

    /// Subtraction costs one addition.
    pub fn minus<F: Field>(&mut self, x: &F, y: &F) -> F {
        self.adds += 1;
        x.minus(y)
    }

    /// Division costs one multiplication.
    pub fn divide<F: Field>(&mut self, x: &F, y: &F) -> Result<F> {
        let inv = y.recip().ok_or(Error::DivisionByZero)?;
        self.mults += 1;
        Ok(x.times(&inv))
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.mults += rhs.mults;
        self.adds += rhs.adds;
        self.comparisons += rhs.comparisons;
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl std::iter::Sum for OpCounter {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(OpCounter::default(), |acc, c| acc + c)
    }
}

/// Runtime-selected semiring working on [`Scalar`] values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiringSpec {
    pub kind: SemiringKind,
}

impl SemiringSpec {
    pub const EXACT: SemiringSpec = SemiringSpec {
        kind: SemiringKind::SumProductExact,
    };
    pub const FLOAT: SemiringSpec = SemiringSpec {
        kind: SemiringKind::SumProductFloat,
    };
    pub const MIN_PLUS: SemiringSpec = SemiringSpec {
        kind: SemiringKind::MinPlus,
    };

    pub fn new(kind: SemiringKind) -> Self {
        SemiringSpec { kind }
    }

    pub fn zero(&self) -> Scalar {
        match self.kind {
            SemiringKind::SumProductExact => Scalar::Exact(<BigRational as Semiring>::zero()),
            SemiringKind::SumProductFloat => Scalar::Float(0.0),
            SemiringKind::MinPlus => Scalar::Tropical(Tropical::INFINITY),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.kind {
            SemiringKind::SumProductExact => Scalar::Exact(<BigRational as Semiring>::one()),
            SemiringKind::SumProductFloat => Scalar::Float(1.0),
            SemiringKind::MinPlus => Scalar::Tropical(Tropical(0.0)),
        }
    }

    pub fn add(&self, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        self.binary(x, y, |a, b| a.plus(b), |a, b| a.plus(b), |a, b| a.plus(b))
    }

    pub fn mul(&self, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        self.binary(x, y, |a, b| a.times(b), |a, b| a.times(b), |a, b| a.times(b))
    }

    pub fn counted_add(&self, ctr: &mut OpCounter, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        let out = self.add(x, y)?;
        match self.kind {
            SemiringKind::MinPlus => ctr.comparisons += 1,
            _ => ctr.adds += 1,
        }
        Ok(out)
    }

    pub fn counted_mul(&self, ctr: &mut OpCounter, x: &Scalar, y: &Scalar) -> Result<Scalar> {
        let out = self.mul(x, y)?;
        match self.kind {
            SemiringKind::MinPlus => ctr.adds += 1,
            _ => ctr.mults += 1,
        }
        Ok(out)
    }

    fn check(&self, x: &Scalar) -> Result<()> {
        if x.kind() == self.kind {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: self.kind.name(),
                found: x.kind().name(),
            })
        }
    }

    fn binary(
        &self,
        x: &Scalar,
        y: &Scalar,
        exact: impl Fn(&BigRational, &BigRational) -> BigRational,
        float: impl Fn(&f64, &f64) -> f64,
        trop: impl Fn(&Tropical, &Tropical) -> Tropical,
    ) -> Result<Scalar> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (x, y) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(float(a, b)),
            (Scalar::Tropical(a), Scalar::Tropical(b)) => Scalar::Tropical(trop(a, b)),
            _ => unreachable!("domains checked above"),
        })
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient for small arguments; panics on `u128` overflow.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub(crate) fn is_positive_integer(q: &BigRational) -> bool {
    q.is_integer() && q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;

    fn q(s: &str) -> Scalar {
        Scalar::Exact(parse_rational(s).unwrap())
    }

    #[test]
    fn exact_add_and_mul() {
        let s = SemiringSpec::EXACT;
        let mut ctr = OpCounter::new();
        assert_eq!(s.counted_add(&mut ctr, &q("1/2"), &q("1/3")).unwrap(), q("5/6"));
        assert_eq!(s.counted_mul(&mut ctr, &q("2/3"), &q("3/4")).unwrap(), q("1/2"));
        assert_eq!(s.counted_add(&mut ctr, &q("7/9"), &s.zero()).unwrap(), q("7/9"));
        assert_eq!(
            ctr,
            OpCounter {
                mults: 1,
                adds: 2,
                comparisons: 0
            }
        );
    }

    #[test]
    fn min_plus_add_and_mul() {
        let s = SemiringSpec::MIN_PLUS;
        let t = |x: f64| Scalar::Tropical(Tropical(x));
        let mut ctr = OpCounter::new();
        assert_eq!(s.counted_add(&mut ctr, &t(3.0), &t(5.0)).unwrap(), t(3.0));
        assert_eq!(s.counted_mul(&mut ctr, &t(3.0), &t(5.0)).unwrap(), t(8.0));
        assert_eq!(
            s.counted_mul(&mut ctr, &s.zero(), &t(5.0)).unwrap(),
            Scalar::Tropical(Tropical::INFINITY)
        );
        assert_eq!(s.counted_add(&mut ctr, &s.zero(), &t(5.0)).unwrap(), t(5.0));
        assert_eq!(
            ctr,
            OpCounter {
                mults: 0,
                adds: 2,
                comparisons: 2
            }
        );
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let s = SemiringSpec::EXACT;
        let mut ctr = OpCounter::new();
        let err = s.counted_add(&mut ctr, &q("1"), &Scalar::Float(1.0)).unwrap_err();
        assert!(matches!(err, Error::DomainMismatch { .. }));
        assert!(s
            .counted_mul(&mut ctr, &Scalar::Float(1.0), &Scalar::Float(1.0))
            .is_err());
        assert_eq!(ctr, OpCounter::default());
    }

    #[test]
    fn tropical_ties_keep_left() {
        let a = Tropical(2.0);
        let b = Tropical(2.0);
        assert_eq!(a.plus(&b), a);
        assert_eq!(Tropical(4.0).plus(&Tropical(1.0)), Tropical(1.0));
    }

    #[test]
    fn counters_merge_by_summation() {
        let a = OpCounter {
            mults: 1,
            adds: 2,
            comparisons: 3,
        };
        let b = OpCounter {
            mults: 10,
            adds: 20,
            comparisons: 30,
        };
        assert_eq!(
            a + b,
            OpCounter {
                mults: 11,
                adds: 22,
                comparisons: 33
            }
        );
        let mut c = a;
        c.reset();
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(binomial_u128(30, 15), 155_117_520);
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(0), BigInt::from(1));
    }
}
