//! Rational helpers shared by the exact modules.

use alloc::format;
use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `n / d` as a rational. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Out of range: divide the saturated conversions.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact binary expansion of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Serializes as `"p/q"`, or `"p"` for integers.
pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"`, `"p/q"`, `"-p/q"` or a plain decimal such as `"0.9"`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        if !whole_digits.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut digits = String::from(whole_digits);
        digits.push_str(frac);
        let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Some(if negative { -q } else { q });
    }
    BigInt::from_str(text).ok().map(Rational::from_integer)
}

/// `base^exp` for a nonnegative integer exponent.
pub fn pow_u32(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Compares `x^p` with `y^q` for positive rationals `x, y` and a positive
/// rational exponent ratio, i.e. returns the ordering of `x^(num/den)`
/// against `y` without leaving the rationals.
pub fn cmp_rational_power(x: &Rational, exponent: &Rational, y: &Rational) -> core::cmp::Ordering {
    debug_assert!(x.is_positive() && y.is_positive() && exponent.is_positive());
    let num = exponent.numer().to_u32().expect("exponent numerator fits u32");
    let den = exponent.denom().to_u32().expect("exponent denominator fits u32");
    pow_u32(x, num).cmp(&pow_u32(y, den))
}
