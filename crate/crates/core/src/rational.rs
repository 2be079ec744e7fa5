//! Exact rationals: text forms and serde helpers.
//!
//! Rationals travel as `"num/den"` strings (`"3"` when the denominator is
//! one) so that reports re-parse bit-exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `"num/den"`, or just `"num"` for integers.
pub fn to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts `"a/b"`, integers, and plain decimals such as `"0.0001"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac;
        let n = if negative { -mag } else { mag };
        return Ok(Rational::new(n, scale));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

/// Decimal rendering truncated toward negative infinity to `digits` places.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (r * Rational::from_integer(scale.clone())).floor().to_integer();
    let negative = scaled.is_negative();
    let (whole, frac) = scaled.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
    }
}

/// Decimal rendering rounded toward positive infinity.
pub fn to_decimal_ceil(r: &Rational, digits: usize) -> String {
    let s = to_decimal(&-r, digits);
    match s.strip_prefix('-') {
        Some(rest) => rest.to_string(),
        None if s.bytes().all(|b| b == b'0' || b == b'.') => s,
        None => format!("-{s}"),
    }
}

/// Smallest multiple of `step` that is `>= r`.
pub fn round_up(r: &Rational, step: &Rational) -> Rational {
    (r / step).ceil() * step
}

/// Approximate value for display.
pub fn to_f64(r: &Rational) -> f64 {
    to_decimal(r, 17).parse().unwrap_or(f64::NAN)
}

/// `#[serde(with = "crate::rational::serde_text")]`
pub mod serde_text {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(D::Error::custom)
    }
}

/// Same as [`serde_text`] for vectors.
pub mod serde_text_vec {
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::to_text(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse(s).map_err(D::Error::custom))
            .collect()
    }
}
