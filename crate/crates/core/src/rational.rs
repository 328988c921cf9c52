//! Exact rational endpoints for the one-dimensional engines.
//!
//! Endpoints are `Ratio<i128>`. Every finite `f64` with a moderate exponent
//! converts exactly, and all arithmetic is checked: an overflow surfaces as
//! an argument error instead of wrapping.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};

use crate::error::{arg_err, Error, Result};

pub type Rational = Ratio<i128>;

fn overflow() -> Error {
    Error::Argument("rational arithmetic overflowed i128".into())
}

/// The exact value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return arg_err(format!("{x} has no rational value"));
    }
    if x == 0.0 {
        return Ok(Rational::zero());
    }
    let bits = x.to_bits();
    let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = if exponent == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    } as i128;
    let e = exponent - 1075;
    let trailing = mantissa.trailing_zeros() as i32;
    let (mantissa, e) = (mantissa >> trailing, e + trailing);
    if e >= 0 {
        if e > 126 - (128 - mantissa.leading_zeros() as i32) {
            return arg_err(format!("{x} is too large for exact endpoints"));
        }
        Ok(Rational::from_integer(sign * (mantissa << e)))
    } else {
        if -e > 126 {
            return arg_err(format!("{x} is too small for exact endpoints"));
        }
        Ok(Rational::new(sign * mantissa, 1i128 << (-e)))
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    let n = *r.numer();
    let d = *r.denom();
    // Both parts fit in 53 bits for every endpoint built from f64 inputs and
    // small integers, where this quotient is correctly rounded.
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) => a / b,
        _ => f64::NAN,
    }
}

pub fn add(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_add(b).ok_or_else(overflow)
}

pub fn sub(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_sub(b).ok_or_else(overflow)
}

pub fn mul(a: &Rational, b: &Rational) -> Result<Rational> {
    a.checked_mul(b).ok_or_else(overflow)
}

pub fn div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return arg_err("division by zero");
    }
    a.checked_div(b).ok_or_else(overflow)
}

pub fn integer(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// `base^exp` for a nonnegative integer exponent, checked.
pub fn pow(base: &Rational, exp: u32) -> Result<Rational> {
    let mut out = integer(1);
    for _ in 0..exp {
        out = mul(&out, base)?;
    }
    Ok(out)
}

/// Parses `"a/b"`, `"a"` or a decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("bad rational {s:?}")))?;
        let d: i128 = d
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("bad rational {s:?}")))?;
        if d == 0 {
            return arg_err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<i128>() {
        return Ok(integer(n));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let joined = format!("{whole}{frac}");
        if let (Ok(n), true) = (joined.parse::<i128>(), digits <= 30) {
            return Ok(Rational::new(n, 10i128.pow(digits)));
        }
    }
    arg_err(format!("bad rational {s:?}"))
}

/// Reads a JSON number (exact binary value) or string (see [`parse`]).
pub fn from_json(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(integer(i as i128))
            } else {
                from_f64(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        serde_json::Value::String(s) => parse(s),
        other => arg_err(format!("expected a number or rational string, got {other}")),
    }
}

/// Writes `"a/b"`, or `"a"` for integers.
pub fn to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
