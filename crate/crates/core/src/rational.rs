//! Exact probabilities.
//!
//! Every weight and value in the crate is a ratio of 64-bit integers. All
//! denominators that occur divide small multiples of 630, so overflow is not
//! a concern for the games built here.

use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;

/// Wire form `{num, den}` used by every JSON document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RationalJson {
    fn from(r: Rational) -> Self {
        RationalJson {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl TryFrom<RationalJson> for Rational {
    type Error = Error;

    fn try_from(r: RationalJson) -> Result<Self> {
        if r.den == 0 {
            return Err(Error::input("rational with zero denominator"));
        }
        Ok(Rational::new(r.num, r.den))
    }
}

pub fn serialize_rational<S: serde::Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    RationalJson::from(*r).serialize(s)
}

/// Parses `"num/den"` or a bare integer. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || {
        Error::input(format!(
            "`{s}` is not an exact rational of the form num/den"
        ))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n = i64::from_str(n.trim()).map_err(|_| bad())?;
            let d = i64::from_str(d.trim()).map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::input(format!("`{s}` has a zero denominator")));
            }
            Ok(Rational::new(n, d))
        }
        None => i64::from_str(s)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

pub fn in_unit_interval(r: Rational) -> bool {
    r >= Rational::zero() && r <= Rational::one()
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Least common multiple of the denominators, i.e. the smallest integer scale
/// that turns every input into an integer.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values.into_iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

pub fn display(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
