//! Exact rational helpers: parsing user input, fraction strings and
//! fixed-precision decimal rendering.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational used for every value in the crate.
pub type Rational = BigRational;

/// Error returned when a string is not a decimal or `p/q` rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

fn parse_err(input: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        input: input.to_string(),
        reason,
    }
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.25"` exactly.
///
/// Exponent notation is rejected; decimal input never passes through `f64`.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(parse_err(input, "empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(|| parse_err(input, "bad numerator"))?;
        let den = parse_integer(den.trim()).ok_or_else(|| parse_err(input, "bad denominator"))?;
        if den.is_zero() {
            return Err(parse_err(input, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, fraction) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(parse_err(input, "no digits"));
    }
    if !whole
        .bytes()
        .chain(fraction.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(parse_err(input, "expected digits, '.', or 'p/q'"));
    }
    let mut digits = String::with_capacity(whole.len() + fraction.len());
    digits.push_str(whole);
    digits.push_str(fraction);
    let mut num: BigInt = digits.parse().map_err(|_| parse_err(input, "no digits"))?;
    if negative {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10u32), fraction.len());
    Ok(Rational::new(num, den))
}

/// Renders as `"p/q"`, always including the denominator (`50` becomes `"50/1"`).
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Display adapter that always prints `p/q`.
pub struct Fraction<'a>(pub &'a Rational);

impl fmt::Display for Fraction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&to_fraction_string(self.0))
    }
}

/// Rounds to `precision` decimal places with ties going to the even digit.
pub fn round_half_even(r: &Rational, precision: u32) -> BigInt {
    let scale = num_traits::pow(BigInt::from(10u32), precision as usize);
    let scaled = r * Rational::from_integer(scale);
    let (q, rem) = scaled.numer().div_mod_floor(scaled.denom());
    // 0 <= rem < denom
    let twice: BigInt = &rem * 2;
    match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

/// Fixed-point decimal string, round-half-even at `precision` places.
pub fn render_decimal(r: &Rational, precision: u32) -> String {
    let units = round_half_even(r, precision);
    let negative = units.is_negative();
    let digits = units.abs().to_string();
    let p = precision as usize;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if p == 0 {
        out.push_str(&digits);
        return out;
    }
    let padded = format!("{digits:0>width$}", width = p + 1);
    let (whole, fraction) = padded.split_at(padded.len() - p);
    out.push_str(whole);
    out.push('.');
    out.push_str(fraction);
    out
}

/// Sum of a slice of rationals.
pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
