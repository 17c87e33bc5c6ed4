//! Exact scalar abstraction shared by the combinatorial modules.
//!
//! Everything that manipulates Hodge numbers, weights or polygon slopes is
//! written against [`Scalar`], an ordered field with a floor. The crate root
//! fixes the default instantiation to arbitrary-precision rationals; the
//! machine-word rationals are handy for hot loops and tests.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact, totally ordered field element with integer floor.
pub trait Scalar:
    Clone + Ord + Debug + Display + Num + Signed + ToPrimitive + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self;

    /// `num / den`, reduced. Panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self;

    fn floor_val(&self) -> Self;

    /// Fractional part in `[0, 1)`.
    fn fract_val(&self) -> Self {
        self.clone() - self.floor_val()
    }

    /// Denominator in lowest terms, if it fits in a `u64`.
    fn denom_u64(&self) -> Option<u64>;

    /// Numerator in lowest terms, if it fits in an `i64`.
    fn numer_i64(&self) -> Option<i64>;

    fn is_integer_val(&self) -> bool {
        self.denom_u64() == Some(1)
    }

    /// Parses `"a"` or `"a/b"`.
    fn parse(text: &str) -> Option<Self>;
}

impl<I> Scalar for Ratio<I>
where
    I: Clone
        + Integer
        + Signed
        + ToPrimitive
        + FromPrimitive
        + num_bigint::ToBigInt
        + Debug
        + Display
        + FromStr
        + Send
        + Sync
        + 'static,
{
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(I::from_i64(v).expect("integer out of range"))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(
            I::from_i64(num).expect("integer out of range"),
            I::from_i64(den).expect("integer out of range"),
        )
    }

    fn floor_val(&self) -> Self {
        self.floor()
    }

    fn denom_u64(&self) -> Option<u64> {
        self.denom().to_u64()
    }

    fn numer_i64(&self) -> Option<i64> {
        self.numer().to_i64()
    }

    fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: I = num.parse().ok()?;
        let den: I = den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Ratio::new(num, den))
    }
}

/// Converts between two scalar instantiations through their reduced
/// numerator/denominator pair.
pub fn convert<A: Scalar, B: Scalar>(x: &A) -> Option<B> {
    B::parse(&x.to_string())
}

/// Lossless conversion into the arbitrary-precision default.
pub fn to_big<A: Scalar>(x: &A) -> Ratio<BigInt> {
    convert(x).expect("every exact scalar prints as a rational")
}

/// Sum of a slice of scalars.
pub fn sum<T: Scalar>(xs: &[T]) -> T {
    xs.iter().cloned().fold(T::zero(), |acc, x| acc + x)
}

/// `true` when `x` lies in `[0, 1)`.
pub fn in_unit_interval<T: Scalar>(x: &T) -> bool {
    !x.is_negative() && *x < T::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    type Q = Ratio<i64>;
    type BigQ = Ratio<BigInt>;

    #[test]
    fn fract_of_negative() {
        assert_eq!(Q::ratio(-1, 3).fract_val(), Q::ratio(2, 3));
        assert_eq!(BigQ::ratio(5, 3).fract_val(), BigQ::ratio(2, 3));
        assert_eq!(Q::from_int(-2).fract_val(), Q::zero());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Q::parse("1/2"), Some(Q::ratio(1, 2)));
        assert_eq!(Q::parse(" -4/6 "), Some(Q::ratio(-2, 3)));
        assert_eq!(BigQ::parse("7"), Some(BigQ::from_int(7)));
        assert_eq!(Q::parse("1/0"), None);
        assert_eq!(Q::parse("x"), None);
    }

    #[test]
    fn convert_round_trip() {
        let x = Q::ratio(-7, 12);
        let y: BigQ = convert(&x).unwrap();
        assert_eq!(y.to_string(), "-7/12");
        assert_eq!(convert::<BigQ, Q>(&y), Some(x));
        assert!(in_unit_interval(&Q::ratio(11, 12)));
        assert!(!in_unit_interval(&Q::one()));
    }
}
