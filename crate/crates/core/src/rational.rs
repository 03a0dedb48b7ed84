//! Exact rational helpers shared by every module.
//!
//! Fractions are always rendered `num/den` in lowest terms (integers as a bare
//! numerator). No decimal rendering exists anywhere in the crate.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as an exact rational (expected `n` or `n/d`)")]
pub struct ParseRationalError(pub String);

/// Parses `"n"` or `"n/d"`; whitespace around the parts is ignored.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

pub fn render(r: &Rational) -> String {
    // BigRational's Display already reduces and drops a unit denominator.
    r.to_string()
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

/// Wrapper giving a `Rational` serde support as a `"num/den"` string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exact(pub Rational);

impl Exact {
    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl From<Rational> for Exact {
    fn from(r: Rational) -> Self {
        Exact(r)
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Default for Exact {
    fn default() -> Self {
        Exact(Rational::zero())
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ExactVisitor;

        impl Visitor<'_> for ExactVisitor {
            type Value = Exact;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a \"num/den\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                parse(v).map(Exact).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExactVisitor)
    }
}

pub fn one() -> Rational {
    Rational::one()
}
