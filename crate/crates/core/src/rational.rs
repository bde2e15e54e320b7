//! Exact rationals and the text format used on every input surface.
//!
//! Accepted forms are `a/b` (integers, `b > 0`), plain integers and decimals
//! such as `0.6`, which parse to the exact value `3/5`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let fail = |reason: &str| Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(fail("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_int(num.trim()).ok_or_else(|| fail("bad numerator"))?;
        let den: BigInt = parse_int(den.trim()).ok_or_else(|| fail("bad denominator"))?;
        if !den.is_positive() {
            return Err(fail("denominator must be positive"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(fail("no digits"));
        }
        if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail("bad decimal digits"));
        }
        let digits = format!("{whole}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| fail("bad decimal digits"))?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u8), frac.len());
        return Ok(Rational::new(num, den));
    }
    parse_int(s)
        .map(Rational::from_integer)
        .ok_or_else(|| fail("expected a/b, an integer or a decimal"))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `⌊x⌋` for a nonnegative rational, as a machine integer.
///
/// Panics if the value is negative or does not fit in `u64`; callers only use
/// it on quantities bounded by node counts.
pub fn floor_u64(x: &Rational) -> u64 {
    x.floor().to_integer().to_u64().expect("floor out of u64 range")
}

/// `⌈x⌉` for a nonnegative rational, as a machine integer.
pub fn ceil_u64(x: &Rational) -> u64 {
    x.ceil().to_integer().to_u64().expect("ceil out of u64 range")
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub(crate) fn in_open_unit_interval(x: &Rational) -> bool {
    x.is_positive() && x < &Rational::one()
}
