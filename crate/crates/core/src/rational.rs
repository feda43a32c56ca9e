//! Exact rational scalars.
//!
//! Every coefficient, relation value and metric entry in this crate is a
//! [`Q`]. Textual form is always `p/q` or `n`, never a float.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::str::FromStr;

/// Canonical reduced rational (denominator positive).
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `n`, `-n`, `p/q` or `-p/q`. Whitespace around the literal is ignored.
pub fn parse(text: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let ok_digits = |s: &str, allow_sign: bool| {
        let s = if allow_sign { s.strip_prefix('-').unwrap_or(s) } else { s };
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok_digits(num, true) || !ok_digits(den, false) {
        return Err(err());
    }
    let n = BigInt::from_str(num).map_err(|_| err())?;
    let d = BigInt::from_str(den).map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

/// `p/q` or `n`; identical to the `Display` of [`Q`], spelled out for clarity at call sites.
pub fn show(q: &Q) -> String {
    q.to_string()
}

pub fn is_integer(q: &Q) -> bool {
    q.is_integer()
}

pub fn abs(q: &Q) -> Q {
    q.abs()
}

pub fn min(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Serde adapter storing a rational as its canonical string.
pub mod as_string {
    use super::Q;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(D::Error::custom)
    }
}
