//! Dynamically typed scalars and their string forms.
//!
//! Exact rationals render as `"p/q"` (bare `"p"` for integers), floats as
//! decimal literals, and the min-plus infinity as `"inf"`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::semiring::{SemiringKind, Tropical};

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
    Tropical(Tropical),
}

impl Scalar {
    pub fn kind(&self) -> SemiringKind {
        match self {
            Scalar::Exact(_) => SemiringKind::SumProductExact,
            Scalar::Float(_) => SemiringKind::SumProductFloat,
            Scalar::Tropical(_) => SemiringKind::MinPlus,
        }
    }

    /// Parses `text` as an element of the given domain.
    pub fn parse_in(kind: SemiringKind, text: &str) -> Result<Scalar> {
        match kind {
            SemiringKind::SumProductExact => parse_rational(text).map(Scalar::Exact),
            SemiringKind::SumProductFloat => parse_float(text).map(Scalar::Float),
            SemiringKind::MinPlus => parse_tropical(text).map(Scalar::Tropical),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
            Scalar::Tropical(t) => t.0,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => f.write_str(&format_rational(q)),
            Scalar::Float(x) => f.write_str(&format_float(*x)),
            Scalar::Tropical(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    /// Strings containing `/` are exact; `inf` is tropical; anything else
    /// numeric is read as an exact rational.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let kind = if s.trim().eq_ignore_ascii_case("inf") {
            SemiringKind::MinPlus
        } else {
            SemiringKind::SumProductExact
        };
        Scalar::parse_in(kind, &s).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("inf") {
            Ok(Scalar::Tropical(Tropical::INFINITY))
        } else {
            parse_rational(s).map(Scalar::Exact)
        }
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn format_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:?}")
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal (optionally with an
/// exponent) into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::parse("empty number"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::parse(format!("not a number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(numer * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(numer, Pow::pow(&ten, (-scale) as u32))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

pub fn parse_float(text: &str) -> Result<f64> {
    let s = text.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    if s.contains('/') {
        return Ok(rational_to_f64(&parse_rational(s)?));
    }
    s.parse::<f64>()
        .map_err(|_| Error::parse(format!("not a number: {s:?}")))
}

pub fn parse_tropical(text: &str) -> Result<Tropical> {
    parse_float(text).map(Tropical)
}

/// Nearest `f64` to a rational, robust to numerators and denominators far
/// outside the `f64` range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let (sign, ln) = ln_abs_rational(q);
    sign * ln.exp()
}

/// Natural log of `|q|` together with the sign of `q`. Works for values whose
/// magnitude overflows `f64`.
pub fn ln_abs_rational(q: &BigRational) -> (f64, f64) {
    let sign = if q.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
    (sign, ln_abs_bigint(q.numer()) - ln_abs_bigint(q.denom()))
}

pub fn ln_abs_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (x.magnitude() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `p / q` in lowest terms. Panics when `q` is zero.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Serde adapter storing a [`BigRational`] as its `"p/q"` string.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rational(&v).map_err(serde::de::Error::custom)
    }
}

/// Reads a JSON number or string into an exact rational. Numbers go through
/// their decimal text, so `0.1` becomes `1/10`.
pub fn value_to_rational(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::parse(format!("expected a number, found {other}"))),
    }
}
