//! Exact costs: nonnegative rationals extended with positive infinity.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::error::Error;

/// A cost value. Finite costs are nonnegative rationals kept in lowest
/// terms; `Infinite` absorbs every addition.
///
/// The derived ordering places every finite cost below `Infinite`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cost {
    Finite(BigRational),
    Infinite,
}

impl Cost {
    pub fn zero() -> Self {
        Cost::Finite(BigRational::zero())
    }

    pub fn infinite() -> Self {
        Cost::Infinite
    }

    pub fn integer(value: u64) -> Self {
        Cost::Finite(BigRational::from_integer(BigInt::from(value)))
    }

    /// `numerator / denominator`. Fails on a zero denominator.
    pub fn ratio(numerator: u64, denominator: u64) -> Result<Self, Error> {
        if denominator == 0 {
            return Err(Error::InvalidCost(format!("{numerator}/0")));
        }
        Ok(Cost::Finite(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        )))
    }

    /// Wraps a rational, rejecting negative values.
    pub fn from_rational(value: BigRational) -> Result<Self, Error> {
        if value.is_negative() {
            return Err(Error::InvalidCost(value.to_string()));
        }
        Ok(Cost::Finite(value))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Cost::Finite(v) if v.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }
}

impl Default for Cost {
    fn default() -> Self {
        Cost::zero()
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl<'a> Add<&'a Cost> for &'a Cost {
    type Output = Cost;

    fn add(self, rhs: &'a Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl AddAssign<&Cost> for Cost {
    fn add_assign(&mut self, rhs: &Cost) {
        match (&mut *self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => *a += b,
            _ => *self = Cost::Infinite,
        }
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        let mut total = Cost::zero();
        for c in iter {
            total += &c;
            if total.is_infinite() {
                break;
            }
        }
        total
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        let mut total = Cost::zero();
        for c in iter {
            total += c;
            if total.is_infinite() {
                break;
            }
        }
        total
    }
}

/// Serialized as `p/q` in lowest terms, `p` for integers and `inf` for infinity.
impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Infinite => f.write_str("inf"),
            Cost::Finite(v) if v.is_integer() => write!(f, "{}", v.numer()),
            Cost::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

impl FromStr for Cost {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Cost::Infinite);
        }
        let bad = || Error::InvalidCost(s.to_string());
        let parse_part = |p: &str| -> Result<BigInt, Error> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            p.parse::<BigInt>().map_err(|_| bad())
        };
        let value = match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_part(d)?;
                if d.is_zero() {
                    return Err(bad());
                }
                BigRational::new(parse_part(n)?, d)
            }
            None => BigRational::from_integer(parse_part(s)?),
        };
        Ok(Cost::Finite(value))
    }
}
