//! Coordinate scalars: exact rationals for grid geometry and the label-induced
//! map, `f64` for economies evaluated in float mode.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational used throughout the grid and the reverse construction.
pub type Rational = BigRational;

/// Tolerance used when a float coordinate vector is checked for unit sum.
pub const FLOAT_SUM_TOL: f64 = 1e-12;

/// Scalar a price coordinate can be stored in.
pub trait Coord: Clone + PartialOrd + Num + Send + Sync + fmt::Debug {
    /// The grid coordinate `k / m`.
    fn from_grid(k: u64, m: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether `sum` counts as a coordinate total of one.
    fn is_unit_sum(sum: &Self) -> bool;

    fn is_finite(&self) -> bool;

    fn max_zero(&self) -> Self {
        if *self > Self::zero() {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

impl Coord for f64 {
    fn from_grid(k: u64, m: u64) -> Self {
        k as f64 / m as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_unit_sum(sum: &Self) -> bool {
        (sum - 1.0).abs() <= FLOAT_SUM_TOL
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Coord for Rational {
    fn from_grid(k: u64, m: u64) -> Self {
        Rational::new(BigInt::from(k), BigInt::from(m))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_unit_sum(sum: &Self) -> bool {
        sum.is_one()
    }

    fn is_finite(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as a number: {reason}")]
pub struct ParseNumberError {
    pub input: String,
    pub reason: &'static str,
}

fn parse_err(input: &str, reason: &'static str) -> ParseNumberError {
    ParseNumberError {
        input: input.to_string(),
        reason,
    }
}

/// Parses `"a/b"`, an integer, or a decimal literal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(input: &str) -> Result<Rational, ParseNumberError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(parse_err(input, "empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| parse_err(input, "bad numerator"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| parse_err(input, "bad denominator"))?;
        if den.is_zero() {
            return Err(parse_err(input, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).ok_or_else(|| parse_err(input, "not an integer, ratio or decimal"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Renders a rational as `"a/b"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Serde adapter writing a rational as an `"a/b"` string.
pub mod serde_rational {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter for a list of `"a/b"` strings.
pub mod serde_rational_vec {
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(rs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rs.len()))?;
        for r in rs {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts.iter().map(|t| parse_rational(t).map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn parses_ratios_integers_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational(" -6/8 ").unwrap(), q(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5e-1").unwrap(), q(-3, 20));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("2E2").unwrap(), q(200, 1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn format_keeps_denominator() {
        assert_eq!(format_rational(&q(2, 1)), "2/1");
        assert_eq!(format_rational(&q(-3, 12)), "-1/4");
        assert_eq!(parse_rational(&format_rational(&q(5, 7))).unwrap(), q(5, 7));
    }

    #[test]
    fn float_roundtrip_is_exact() {
        let x = 0.1_f64;
        let r = rational_from_f64(x).unwrap();
        assert_eq!(Coord::to_f64(&r), x);
        assert!(rational_from_f64(f64::NAN).is_none());
    }
}
