//! Exact rational arithmetic for sizes, parts and capacities.
//!
//! Every quantity in a packing is compared against a bin capacity of exactly
//! one, so nothing in the solver paths ever touches floating point. The type
//! wraps `num_rational::Ratio<i128>` and panics on overflow instead of
//! wrapping; the instances handled here have small denominators.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("number `{0}` is too large")]
    Overflow(String),
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    /// Builds `numer / denom`, reducing to lowest terms.
    ///
    /// Panics if `denom` is zero.
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> i128 {
        self.0.ceil().to_integer()
    }

    /// Largest integer not above `self`.
    pub fn floor(&self) -> i128 {
        self.0.floor().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion, for display columns only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with a fixed number of places (display only).
    pub fn to_decimal_string(&self, places: usize) -> String {
        format!("{:.*}", places, self.to_f64())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::from_integer(n)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, integers and plain decimals. A decimal with `d`
    /// fractional digits becomes a fraction over `10^d` before reduction.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let invalid = || ParseRationalError::Invalid(s.to_string());
        let overflow = || ParseRationalError::Overflow(s.to_string());

        if let Some((n, d)) = s.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| invalid())?;
            let d: i128 = d.trim().parse().map_err(|_| invalid())?;
            if d == 0 {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            return Ok(Rational::new(n, d));
        }

        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(invalid());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(invalid());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: i128 = digits.parse().map_err(|_| overflow())?;
        let denom = 10i128.checked_pow(frac_part.len() as u32).ok_or_else(overflow)?;
        let numer = if negative { -numer } else { numer };
        Ok(Rational::new(numer, denom))
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

macro_rules! checked_binop {
    ($trait:ident, $method:ident, $checked:ident, $assign_trait:ident, $assign:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(
                    self.0
                        .$checked(&rhs.0)
                        .unwrap_or_else(|| panic!("rational overflow in {} {} {}", self, stringify!($method), rhs)),
                )
            }
        }

        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                $trait::$method(self, *rhs)
            }
        }

        impl $assign_trait for Rational {
            fn $assign(&mut self, rhs: Rational) {
                *self = $trait::$method(*self, rhs);
            }
        }
    };
}

checked_binop!(Add, add, checked_add, AddAssign, add_assign);
checked_binop!(Sub, sub, checked_sub, SubAssign, sub_assign);

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(
            self.0
                .checked_mul(&rhs.0)
                .unwrap_or_else(|| panic!("rational overflow in {self} * {rhs}")),
        )
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(
            self.0
                .checked_div(&rhs.0)
                .unwrap_or_else(|| panic!("rational overflow in {self} / {rhs}")),
        )
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |acc, x| acc + *x)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

impl PartialEq<i128> for Rational {
    fn eq(&self, other: &i128) -> bool {
        self.0 == Ratio::from_integer(*other)
    }
}

impl PartialOrd<i128> for Rational {
    fn partial_cmp(&self, other: &i128) -> Option<Ordering> {
        Some(self.0.cmp(&Ratio::from_integer(*other)))
    }
}

/// Shorthand for `Rational::new`.
pub fn r(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}
