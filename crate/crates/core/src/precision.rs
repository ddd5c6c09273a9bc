//! Precision bookkeeping and exact/decimal conversions.
//!
//! Every floating-point routine in the crate takes its precision as an
//! explicit argument; there is no global precision state.

use std::fmt;
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type BigReal = Float;
pub type BigComplex = Complex;

/// Binary precision that holds `digits` significant decimal digits plus a
/// few spare bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

/// Decimal digits represented by a binary precision (rounded down).
pub fn digits_for_bits(bits: u32) -> u32 {
    (f64::from(bits.saturating_sub(8)) / std::f64::consts::LOG2_10).floor() as u32
}

pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

/// Euler–Mascheroni constant.
pub fn euler_gamma(bits: u32) -> Float {
    Float::with_val(bits, Constant::Euler)
}

/// Correctly rounded scientific notation with `digits` significant digits,
/// formatted as `-1.2345e-6`. Zero prints as `0e0`, non-finite values as
/// `nan`/`inf`/`-inf`.
pub fn to_sci(x: &Float, digits: u32) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    if x.is_zero() {
        return "0e0".into();
    }
    let (negative, mantissa, exp) = x.to_sign_string_exp(10, Some(digits.max(1) as usize));
    let exp = exp.unwrap_or(0) - 1;
    let (head, tail) = mantissa.split_at(1);
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Fixed-point notation with `decimals` digits after the point.
pub fn to_fixed(x: &Float, decimals: u32) -> String {
    let scale = Integer::from(10).pow(decimals);
    let scaled = Float::with_val(x.prec() + 64, x * &scale);
    let rounded = scaled.to_integer().unwrap_or_default();
    let negative = rounded < 0;
    let digits = rounded.abs().to_string();
    let d = decimals as usize;
    let padded = if digits.len() <= d { format!("{}{}", "0".repeat(d + 1 - digits.len()), digits) } else { digits };
    let (int, frac) = padded.split_at(padded.len() - d);
    let sign = if negative { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Parses `"0.005"`, `"5e-3"`, `"1/200"` or `"-3"` into an exact rational.
pub fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = Integer::from_str(n.trim()).ok()?;
        let d = Integer::from_str(d.trim()).ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::from((n, d)));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut value = Rational::from(Integer::from_str(&digits).ok()?);
    let shift = exp - frac.len() as i32;
    let p = Integer::from(10).pow(shift.unsigned_abs());
    if shift >= 0 {
        value *= p;
    } else {
        value /= p;
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Exact decimal rendering when the denominator divides a power of ten,
/// otherwise `numerator/denominator`.
pub fn rational_to_string(r: &Rational) -> String {
    let mut den = r.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_divisible_u(2) {
        den /= 2;
        twos += 1;
    }
    while den.is_divisible_u(5) {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = Rational::from(r * Integer::from(10).pow(places));
    let int = scaled.numer().clone();
    let negative = int < 0;
    let digits = int.abs().to_string();
    let d = places as usize;
    let padded = if digits.len() <= d { format!("{}{}", "0".repeat(d + 1 - digits.len()), digits) } else { digits };
    let (whole, frac) = padded.split_at(padded.len() - d);
    let sign = if negative { "-" } else { "" };
    if d == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

/// A strictly positive coupling constant, held exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Coupling(Rational);

impl Coupling {
    pub fn new(g: Rational) -> Result<Self> {
        if g <= 0 {
            return Err(Error::InvalidInput(format!("coupling must be positive, got {g}")));
        }
        Ok(Self(g))
    }

    pub fn rational(&self) -> &Rational {
        &self.0
    }

    pub fn to_float(&self, bits: u32) -> Float {
        Float::with_val(bits, &self.0)
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_exact(s).ok_or_else(|| Error::InvalidInput(format!("cannot parse coupling {s:?}")))?;
        Self::new(r)
    }
}

impl TryFrom<String> for Coupling {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Coupling> for String {
    fn from(c: Coupling) -> String {
        c.to_string()
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational_to_string(&self.0))
    }
}

/// A value together with a non-negative error estimate.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: Float,
    pub error: Float,
}

impl Estimate {
    pub fn new(value: Float, error: Float) -> Self {
        debug_assert!(!error.is_sign_negative());
        Self { value, error }
    }

    pub fn exact(value: Float) -> Self {
        let error = Float::new(value.prec());
        Self { value, error }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_formatting() {
        let x = Float::with_val(200, 1) / 3u32;
        assert_eq!(to_sci(&x, 5), "3.3333e-1");
        let y = Float::with_val(200, -12345.678);
        assert_eq!(to_sci(&y, 3), "-1.23e4");
        assert_eq!(to_sci(&Float::new(53), 4), "0e0");
    }

    #[test]
    fn fixed_formatting() {
        let x = Float::with_val(200, 1.0107795);
        assert_eq!(to_fixed(&x, 5), "1.01078");
        assert_eq!(to_fixed(&Float::with_val(100, -0.004), 2), "0.00");
        assert_eq!(to_fixed(&Float::with_val(100, 0.04), 1), "0.0");
        assert_eq!(to_fixed(&Float::with_val(100, 2.5), 0), "2");
    }

    #[test]
    fn exact_parsing() {
        assert_eq!(parse_exact("0.005").unwrap(), Rational::from((1, 200)));
        assert_eq!(parse_exact("5e-3").unwrap(), Rational::from((1, 200)));
        assert_eq!(parse_exact("1/200").unwrap(), Rational::from((1, 200)));
        assert_eq!(parse_exact("-1.5E2").unwrap(), Rational::from(-150));
        assert_eq!(parse_exact(".25").unwrap(), Rational::from((1, 4)));
        assert!(parse_exact("1/0").is_none());
        assert!(parse_exact("abc").is_none());
        assert!(parse_exact(".").is_none());
    }

    #[test]
    fn coupling_display_round_trips() {
        for s in ["0.005", "0.1", "1/3", "2"] {
            let c: Coupling = s.parse().unwrap();
            let again: Coupling = c.to_string().parse().unwrap();
            assert_eq!(c, again);
        }
        assert_eq!("0.010".parse::<Coupling>().unwrap().to_string(), "0.01");
        assert!("-0.1".parse::<Coupling>().is_err());
        assert!("0".parse::<Coupling>().is_err());
    }
}
