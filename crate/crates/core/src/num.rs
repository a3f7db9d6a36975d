//! Exact and floating scalars.
//!
//! Values read from inputs stay rational when they can (integers, `p/q`
//! strings, finite decimals, dyadic floats); anything else falls back to
//! binary64 and is flagged as such.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational used by every exact code path.
pub type Rational = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRealError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// A scalar that is exact when the source allowed it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    Float(f64),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => to_f64(q),
            Real::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            Real::Exact(q) => Some(*q),
            Real::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    /// Exact value when the float is a dyadic with a short mantissa.
    pub fn from_f64(x: f64) -> Real {
        match dyadic(x) {
            Some(q) => Real::Exact(q),
            None => Real::Float(x),
        }
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Self {
        Real::Exact(q)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::from_f64(x)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::Exact(Rational::from_integer(n as i128))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => f.write_str(&rational_string(q)),
            Real::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Real {
    type Err = ParseRealError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseRealError::Empty);
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| ParseRealError::Invalid(s.into()))?;
            let q: i128 = q.trim().parse().map_err(|_| ParseRealError::Invalid(s.into()))?;
            if q == 0 {
                return Err(ParseRealError::ZeroDenominator(s.into()));
            }
            return Ok(Real::Exact(Rational::new(p, q)));
        }
        if let Some(q) = parse_decimal(t) {
            return Ok(Real::Exact(q));
        }
        let x: f64 = t.parse().map_err(|_| ParseRealError::Invalid(s.into()))?;
        if !x.is_finite() {
            return Err(ParseRealError::Invalid(s.into()));
        }
        Ok(Real::from_f64(x))
    }
}

/// Plain decimal literal like `-0.125` or `3`, read exactly.
fn parse_decimal(t: &str) -> Option<Rational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if frac_part.contains('.') || frac_part.len() > 30 || int_part.len() > 30 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() {
        return None;
    }
    let num: i128 = digits.parse().ok()?;
    let den = 10i128.checked_pow(frac_part.len() as u32)?;
    let q = Rational::new(num, den);
    Some(if neg { -q } else { q })
}

pub fn to_f64(q: &Rational) -> f64 {
    let n = *q.numer();
    let d = *q.denom();
    if n.unsigned_abs() <= (1u128 << 53) && d <= (1i128 << 53) {
        // both exact, so one correctly rounded division
        return n as f64 / d as f64;
    }
    if n.unsigned_abs() < (1u128 << 100) && d < (1i128 << 100) {
        let (i, r) = n.div_mod_floor(&d);
        i as f64 + r as f64 / d as f64
    } else {
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    }
}

/// `x` as an exact rational if its binary expansion has at most 48 fractional bits.
pub fn dyadic(x: f64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let mut scaled = x;
    let mut den: i128 = 1;
    for _ in 0..=48 {
        if scaled.fract() == 0.0 {
            return Some(Rational::new(scaled as i128, den));
        }
        scaled *= 2.0;
        den *= 2;
    }
    None
}

/// Always `p/q`, also for integers.
pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Serde helper writing a rational as `"p/q"`.
pub fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(q))
}

pub fn parse_rational(s: &str) -> Result<Rational, ParseRealError> {
    match s.parse::<Real>()? {
        Real::Exact(q) => Ok(q),
        Real::Float(_) => Err(ParseRealError::Invalid(s.into())),
    }
}

pub fn checked_add(a: &Rational, b: &Rational) -> Option<Rational> {
    a.checked_add(b)
}

pub fn checked_sub(a: &Rational, b: &Rational) -> Option<Rational> {
    a.checked_sub(b)
}

pub fn checked_mul(a: &Rational, b: &Rational) -> Option<Rational> {
    a.checked_mul(b)
}

pub fn checked_div(a: &Rational, b: &Rational) -> Option<Rational> {
    a.checked_div(b)
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

pub fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

/// Floor of an exact rational as an integer.
pub fn floor(q: &Rational) -> i128 {
    Integer::div_floor(q.numer(), q.denom())
}

/// Ceiling of an exact rational as an integer.
pub fn ceil(q: &Rational) -> i128 {
    -Integer::div_floor(&(-*q.numer()), q.denom())
}

/// Round to 12 significant digits, the precision used in reports.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal() {
        assert_eq!("1/3".parse::<Real>().unwrap(), Real::Exact(Rational::new(1, 3)));
        assert_eq!("0.125".parse::<Real>().unwrap(), Real::Exact(Rational::new(1, 8)));
        assert_eq!("-2".parse::<Real>().unwrap(), Real::Exact(Rational::from_integer(-2)));
        assert!(matches!("1e-3".parse::<Real>().unwrap(), Real::Float(_)));
        assert!("1/0".parse::<Real>().is_err());
    }

    #[test]
    fn dyadic_detection() {
        assert_eq!(dyadic(0.75), Some(Rational::new(3, 4)));
        assert_eq!(dyadic(0.1), None);
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(floor(&Rational::new(-1, 3)), -1);
        assert_eq!(ceil(&Rational::new(-1, 3)), 0);
        assert_eq!(ceil(&Rational::new(7, 7)), 1);
    }
}
