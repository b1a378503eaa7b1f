//! Exact rational scalars and their canonical text form.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::str::FromStr;

use crate::error::Error;

/// The scalar field: arbitrary-precision rationals in lowest terms.
pub type Q = num_rational::BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> Q {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Q::from_integer(acc)
}

pub fn inv_factorial(n: usize) -> Q {
    factorial(n).recip()
}

pub fn binomial(n: usize, k: usize) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `(-1)^k` as a rational.
pub fn sign_q(negative: bool) -> Q {
    if negative {
        -Q::one()
    } else {
        Q::one()
    }
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Q::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        Ok(Q::from_integer(n))
    }
}

/// Canonical text form: `"p/q"` in lowest terms with positive denominator, or `"p"`.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = String::deserialize(d)?;
        parse_q(&raw).map_err(serde::de::Error::custom)
    }
}
