//! Exact rational arithmetic helpers.
//!
//! All probabilities in this crate are [`BigRational`] values. Floating point
//! appears only at the reporting boundary, where values are rounded
//! half-to-even at a configurable number of decimal digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The exact number type used throughout the crate.
pub type Rat = BigRational;

/// Builds `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Builds `n / d` from unsigned counts. Panics if `d == 0`.
pub fn rat_u64(n: u64, d: u64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `10^-digits` as an exact rational, used for tolerance comparisons.
pub fn pow10_reciprocal(digits: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}

/// Converts a finite `f64` to the exact rational it represents.
pub fn from_f64(value: f64) -> Option<Rat> {
    Rat::from_float(value)
}

/// Parses a number literal into an exact rational.
///
/// Accepts integer (`"42"`), decimal (`"0.016"`, `"-3.5"`), and fraction
/// (`"1/500"`) forms. Decimal literals convert exactly (no float round trip).
pub fn parse_number(text: &str) -> Option<Rat> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut numerator: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().ok()?
    };
    let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
    numerator *= &scale;
    if !frac_part.is_empty() {
        numerator += frac_part.parse::<BigInt>().ok()?;
    }
    Some(Rat::new(numerator * BigInt::from(sign), scale))
}

/// Rounds `value * 10^digits` to the nearest integer, ties to even.
fn round_scaled(value: &Rat, digits: u32) -> BigInt {
    let scaled = value * Rat::from_integer(BigInt::from(10u32).pow(digits));
    let floor = scaled.floor().to_integer();
    let frac = &scaled - Rat::from_integer(floor.clone());
    match frac.cmp(&rat(1, 2)) {
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Equal if (&floor % 2) == BigInt::zero() => floor,
        std::cmp::Ordering::Equal => floor + 1,
    }
}

/// Rounds to `digits` decimal places, half to even, returning an exact rational.
pub fn round_half_even(value: &Rat, digits: u32) -> Rat {
    Rat::new(round_scaled(value, digits), BigInt::from(10u32).pow(digits))
}

/// Renders `value` rounded half-to-even at `digits` decimal places.
///
/// Trailing zeros in the fractional part are trimmed, but at least one
/// fractional digit is kept (so `1` renders as `"1.0"`, not `"1"`), except
/// when `digits == 0`.
pub fn decimal_string(value: &Rat, digits: u32) -> String {
    let scaled = round_scaled(value, digits);
    if digits == 0 {
        return scaled.to_string();
    }
    let negative = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    let width = digits as usize + 1;
    if body.len() < width {
        body = format!("{:0>width$}", body, width = width);
    }
    let split = body.len() - digits as usize;
    let int_part = &body[..split];
    let mut frac_part = body[split..].trim_end_matches('0').to_string();
    if frac_part.is_empty() {
        frac_part.push('0');
    }
    let sign = if negative { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Renders the exact value as a `numerator/denominator` string.
pub fn rational_string(value: &Rat) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Nearest-`f64` view of an exact rational.
pub fn to_f64(value: &Rat) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
