//! Exact rational numbers.
//!
//! A thin newtype over [`num::BigRational`]. The backing type keeps values
//! reduced with a positive denominator after every operation; this wrapper
//! adds the `"a/b"` text form used by every file format in the crate.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self, Error> {
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_integer(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_big_integer(value: BigInt) -> Self {
        Rational(BigRational::from_integer(value))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True for values in the closed unit interval.
    pub fn is_probability(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num::traits::Pow::pow(&self.0, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
    }
}

impl From<u32> for Rational {
    fn from(value: u32) -> Self {
        Rational::from_integer(i64::from(value))
    }
}

/// Always `a/b`, including integers (`1/1`, `0/1`).
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `a/b` or a bare integer `a`. Surrounding whitespace is ignored.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Rational::from_bigints(n, d)
            }
            None => Ok(Rational::from_big_integer(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_is_always_a_over_b() {
        assert_eq!(Rational::new(6, 16).to_string(), "3/8");
        assert_eq!(Rational::one().to_string(), "1/1");
        assert_eq!(Rational::zero().to_string(), "0/1");
        assert_eq!(Rational::new(1, -2).to_string(), "-1/2");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3/7".parse::<Rational>().unwrap(), Rational::new(3, 7));
        assert_eq!(" 6/14 ".parse::<Rational>().unwrap(), Rational::new(3, 7));
        assert_eq!("2".parse::<Rational>().unwrap(), Rational::from_integer(2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn probability_range() {
        assert!(Rational::zero().is_probability());
        assert!(Rational::one().is_probability());
        assert!(!Rational::new(5, 4).is_probability());
        assert!(!Rational::new(-1, 4).is_probability());
    }

    proptest! {
        #[test]
        fn reduced_with_positive_denominator(n in -1000i64..1000, d in 1i64..1000, neg in any::<bool>()) {
            let d = if neg { -d } else { d };
            let r = Rational::new(n, d);
            prop_assert!(r.denom() > &BigInt::zero());
            prop_assert!(num::Integer::gcd(r.numer(), r.denom()).is_one());
            let again: Rational = r.to_string().parse().unwrap();
            prop_assert_eq!(again, r);
        }

        #[test]
        fn addition_two_ways(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
            let lhs = Rational::new(a, b) + Rational::new(c, d);
            let rhs = Rational::new(a * d + c * b, b * d);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
