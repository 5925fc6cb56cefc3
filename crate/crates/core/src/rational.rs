//! Exact rationals, probability values, and decimal rendering.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Significant digits used for every decimal rendering of an exact value.
pub const DECIMAL_DIGITS: usize = 12;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Checked division; the underlying type panics on a zero divisor.
pub fn checked_div(lhs: &Rational, rhs: &Rational) -> Result<Rational> {
    if rhs.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(lhs / rhs)
}

/// Parses an exact rational from `"30"`, `"-3/7"`, `"0.9"` or `"1.5e-3"`.
///
/// Decimal and exponent forms are converted to exact decimal fractions, so
/// `"0.1"` is `1/10` and never a binary-float approximation.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::MalformedRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(bad)?;
        let den = parse_integer(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, unsigned) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= Pow::pow(&ten, scale as u64);
    } else {
        value /= Pow::pow(&ten, scale.unsigned_abs());
    }
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Renders an exact rational with [`DECIMAL_DIGITS`] significant digits,
/// rounding half away from zero. Positional notation is always used.
pub fn format_decimal(value: &Rational) -> String {
    format_decimal_digits(value, DECIMAL_DIGITS)
}

pub fn format_decimal_digits(value: &Rational, digits: usize) -> String {
    assert!(digits > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let sign = if value.is_negative() { "-" } else { "" };
    let v = value.abs();
    let ten = BigInt::from(10);

    // Decimal exponent e with 10^e <= v < 10^(e+1).
    let mut e = v.numer().to_string().len() as i64 - v.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(Pow::pow(&ten, k as u64))
        } else {
            Rational::new(BigInt::one(), Pow::pow(&ten, k.unsigned_abs()))
        }
    };
    while v < pow10(e) {
        e -= 1;
    }
    while v >= pow10(e + 1) {
        e += 1;
    }

    let shift = digits as i64 - 1 - e;
    let scaled = &v * pow10(shift);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut mantissa: BigInt = (scaled + half).floor().to_integer();
    let mut shift = shift;
    if mantissa.to_string().len() > digits {
        mantissa = mantissa.div_floor(&ten);
        shift -= 1;
    }
    let text = mantissa.to_string();

    let body = if shift <= 0 {
        let zeros = "0".repeat(shift.unsigned_abs() as usize);
        format!("{text}{zeros}")
    } else {
        let shift = shift as usize;
        if shift >= text.len() {
            format!("0.{}{}", "0".repeat(shift - text.len()), text)
        } else {
            let (int_part, frac_part) = text.split_at(text.len() - shift);
            format!("{int_part}.{frac_part}")
        }
    };
    format!("{sign}{body}")
}

/// Serde adapter writing rationals as `"p/q"` (or `"p"` for integers).
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of `"p/q"` strings.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|v| v.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// An exact rational constrained to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(Rational);

impl Probability {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value > Rational::one() {
            return Err(Error::NotAProbability(value.to_string()));
        }
        Ok(Self(value))
    }

    pub fn one() -> Self {
        Self(Rational::one())
    }

    pub fn zero() -> Self {
        Self(Rational::zero())
    }

    pub fn half() -> Self {
        Self(ratio(1, 2))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> Self {
        Self(Rational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }

    pub fn decimal(&self) -> String {
        format_decimal(&self.0)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_rational::deserialize(d)?;
        Probability::new(value).map_err(serde::de::Error::custom)
    }
}

/// `floor(2^64 · p)` for `p` in `[0, 1)`, saturating at `u64::MAX` for `p = 1`.
pub(crate) fn u64_threshold(p: &Rational) -> u64 {
    let scaled = p * Rational::from_integer(BigInt::one() << 64);
    let floor = scaled.floor().to_integer();
    match floor.to_biguint() {
        Some(n) if n.bits() <= 64 => n.iter_u64_digits().next().unwrap_or(0),
        Some(_) => u64::MAX,
        None => 0,
    }
}
