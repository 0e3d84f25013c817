use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
///
/// Always renders as `p/q`, including integers (`10/1`), so tables stay
/// column-aligned and machine-parsable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numerator: i64, denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Rational(Ratio::new(numerator, denominator)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn numerator(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator() as f64 / self.denominator() as f64
    }
}

/// Shorthand for tests and closed forms: `ratio(3, 7)`. Panics on a zero
/// denominator.
pub fn ratio(numerator: i64, denominator: i64) -> Rational {
    Rational::new(numerator, denominator).expect("nonzero denominator")
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        Rational::new(p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?)
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

macro_rules! forward_op {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_op!(Add, add);
forward_op!(Sub, sub);
forward_op!(Mul, mul);
forward_op!(Div, div);

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let r = ratio(45, 36);
        assert_eq!((r.numerator(), r.denominator()), (5, 4));
        assert_eq!(ratio(3, -6), ratio(-1, 2));
        assert_eq!(ratio(-1, 2).denominator(), 2);
    }

    #[test]
    fn display_always_has_denominator() {
        assert_eq!(ratio(10, 1).to_string(), "10/1");
        assert_eq!(ratio(3, 7).to_string(), "3/7");
        assert_eq!("3/7".parse::<Rational>().unwrap(), ratio(3, 7));
        assert_eq!("4".parse::<Rational>().unwrap(), ratio(4, 1));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ratio(1, 2) + ratio(1, 3), ratio(5, 6));
        assert_eq!(ratio(5, 1) / ratio(5, 4), ratio(4, 1));
        assert!(ratio(5, 6) < ratio(5, 4));
    }
}
