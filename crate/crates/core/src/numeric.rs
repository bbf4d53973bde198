//! Exact rational numbers.
//!
//! Every length, volume and bound in the crate is a [`Rational`]. Inputs are
//! accepted as `p/q` fractions or as plain decimals (`0.3` is exactly `3/10`).

use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `num / den` reduced to lowest terms. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a decimal such as `"-0.125"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Domain(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Domain(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let denom = num::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Lowest-terms text form: `"3/10"`, or `"2"` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Nearest `f64`, for display only.
pub fn to_f64(x: &Rational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge operands: scale both down to keep the quotient representable
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(900);
            let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Decimal rendering with `places` digits after the point, rounded toward zero.
pub fn format_decimal(x: &Rational, places: usize) -> String {
    let scale = num::pow(BigInt::from(10), places);
    let scaled = (x.abs() * Rational::from_integer(scale.clone())).trunc().to_integer();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let sign = if x.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = places)
    }
}

pub fn ceil_to_u64(x: &Rational) -> u64 {
    x.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// `base^exp` for a small exponent.
pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn product<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter().fold(Rational::one(), |acc, x| acc * x)
}

pub fn sum<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

/// True when `0 < x <= 1`.
pub fn in_unit_interval(x: &Rational) -> bool {
    x.is_positive() && *x <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_is_exact() {
        assert_eq!(parse_rational("0.3").unwrap(), rat(3, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
    }

    #[test]
    fn fraction_is_reduced() {
        let x = parse_rational("6/8").unwrap();
        assert_eq!(x, rat(3, 4));
        assert_eq!(format_rational(&x), "3/4");
        assert_eq!(format_rational(&int(2)), "2");
    }

    #[test]
    fn garbage_rejected() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&rat(26, 15), 6), "1.733333");
        assert_eq!(format_decimal(&rat(-1, 3), 3), "-0.333");
        assert_eq!(format_decimal(&int(3), 2), "3.00");
    }
}
