//! Richardson extrapolation and the large-order growth of the perturbative
//! coefficients.
//!
//! The coefficients behave as
//! `E_K ~ -(3^(K+1) K! / pi) (a0 + a1/K + a2/K^2 + ...)` with
//! `a0 = 1`, `a1 = -53/18`, `a2 = -1277/648`.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_series::RationalSeries;
use crate::precision::{bits_for_digits, digits_for_bits, pi, to_sci};

/// Values `s_K` for consecutive `K = start, start + 1, ...`.
#[derive(Clone, Debug)]
pub struct KSequence {
    pub start: u64,
    pub values: Vec<Float>,
}

impl KSequence {
    pub fn new(start: u64, values: Vec<Float>) -> Result<Self> {
        if start == 0 {
            return Err(Error::InvalidInput("Richardson sequences are indexed from K >= 1".into()));
        }
        Ok(Self { start, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lowest precision among the values.
    pub fn precision(&self) -> u32 {
        self.values.iter().map(|v| v.prec()).min().unwrap_or(64)
    }
}

/// Result of an extrapolation together with the spread between the last
/// two stages of the tableau.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    pub value: Float,
    pub increment: Float,
}

/// Evaluates at `x = 0` the polynomial through the points `(nodes[i], values[i])`
/// (Neville's scheme). This is Richardson elimination for any error
/// expansion in powers of the node variable.
pub fn extrapolate_to_zero(nodes: &[Float], values: &[Float], bits: u32) -> Result<Extrapolation> {
    if nodes.len() != values.len() || nodes.is_empty() {
        return Err(Error::InsufficientData { needed: 1, have: nodes.len().min(values.len()) });
    }
    let n = nodes.len();
    let mut table: Vec<Float> = values.iter().map(|v| Float::with_val(bits, v)).collect();
    // Value of the degree-(n-2) fit through the last n-1 points.
    let mut previous = table[n - 1].clone();
    for m in 1..n {
        for i in 0..n - m {
            let num = Float::with_val(bits, &nodes[i + m] * &table[i]) - Float::with_val(bits, &nodes[i] * &table[i + 1]);
            let den = Float::with_val(bits, &nodes[i + m] - &nodes[i]);
            if den.is_zero() {
                return Err(Error::InvalidInput("extrapolation nodes must be distinct".into()));
            }
            table[i] = num / den;
        }
        if m == n - 2 {
            previous = table[1].clone();
        }
    }
    let value = table[0].clone();
    let increment = if n == 1 { Float::new(bits) } else { Float::with_val(bits, &value - &previous).abs() };
    Ok(Extrapolation { value, increment })
}

/// Order-`order` Richardson limit of `s_K` assuming `s_K = s + c1/K + c2/K^2 + ...`,
/// built from the last `order + 1` terms of the sequence.
///
/// The tableau loses roughly `log10(sum |weights|)` digits; the arithmetic
/// runs with that many extra bits and the returned value carries the
/// precision of the inputs.
pub fn richardson_extrapolate(seq: &KSequence, order: usize) -> Result<Float> {
    Ok(richardson_with_increment(seq, order)?.value)
}

pub fn richardson_with_increment(seq: &KSequence, order: usize) -> Result<Extrapolation> {
    if seq.len() < order + 1 {
        return Err(Error::InsufficientData { needed: order + 1, have: seq.len() });
    }
    let input_bits = seq.precision();
    let first = seq.len() - order - 1;
    let k0 = seq.start + first as u64;
    let bits = input_bits + amplification_bits(k0, order);
    let nodes: Vec<Float> = (0..=order as u64).map(|j| Float::with_val(bits, 1) / (k0 + j)).collect();
    let ext = extrapolate_to_zero(&nodes, &seq.values[first..], bits)?;
    Ok(Extrapolation {
        value: Float::with_val(input_bits, &ext.value),
        increment: Float::with_val(input_bits, &ext.increment),
    })
}

/// Bits lost to cancellation in the consecutive-K Richardson formula
/// `sum_j (-1)^(m+j) (K+j)^m s_{K+j} / (j! (m-j)!)`.
fn amplification_bits(k0: u64, order: usize) -> u32 {
    let m = order as f64;
    let mut log_sum = f64::NEG_INFINITY;
    for j in 0..=order {
        let jf = j as f64;
        let term = m * ((k0 as f64) + jf).ln() - ln_factorial(jf) - ln_factorial(m - jf);
        log_sum = log_add(log_sum, term);
    }
    (log_sum.max(0.0) / std::f64::consts::LN_2).ceil() as u32 + 16
}

fn ln_factorial(x: f64) -> f64 {
    (1..=x as u64).map(|i| (i as f64).ln()).sum()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Estimated coefficients of the growth bracket and their stability.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub a0: Float,
    pub a1: Float,
    pub a2: Float,
    pub window: (u64, u64),
    pub order: usize,
    /// Spread of the last two stages for `a0`, `a1`, `a2`.
    pub spreads: [Float; 3],
    /// Largest spread relative to the size of its coefficient.
    pub residual: Float,
    pub digits: u32,
}

#[derive(Serialize)]
struct GrowthJson {
    schema: &'static str,
    k_min: u64,
    k_max: u64,
    order: usize,
    a0: String,
    a1: String,
    a2: String,
    spreads: [String; 3],
    residual: String,
}

impl GrowthReport {
    pub fn to_json(&self) -> String {
        let d = self.digits;
        let json = GrowthJson {
            schema: "dwell.growth/1",
            k_min: self.window.0,
            k_max: self.window.1,
            order: self.order,
            a0: to_sci(&self.a0, d),
            a1: to_sci(&self.a1, d),
            a2: to_sci(&self.a2, d),
            spreads: self.spreads.clone().map(|s| to_sci(&s, 6)),
            residual: to_sci(&self.residual, 6),
        };
        serde_json::to_string_pretty(&json).expect("growth report serializes")
    }
}

/// `r_K = -pi E_K / (3^(K+1) K!)` for `K` in `window` (inclusive).
pub fn normalized_ratios(coeffs: &RationalSeries, window: (usize, usize), bits: u32) -> Result<KSequence> {
    let (lo, hi) = window;
    if lo == 0 || lo >= hi {
        return Err(Error::InvalidInput(format!("window ({lo}, {hi}) must satisfy 1 <= K_min < K_max")));
    }
    if hi > coeffs.order() {
        return Err(Error::InsufficientData { needed: hi + 1, have: coeffs.order() + 1 });
    }
    let pi = pi(bits);
    let mut factorial = Integer::from(Integer::factorial(lo as u32));
    let mut power = Integer::from(3).pow(lo as u32 + 1);
    let mut values = Vec::with_capacity(hi - lo + 1);
    for k in lo..=hi {
        if k > lo {
            factorial *= k as u32;
            power *= 3u32;
        }
        let scaled = Rational::from(coeffs.coeff(k) / Rational::from(Integer::from(&factorial * &power)));
        values.push(-Float::with_val(bits, &scaled) * &pi);
    }
    KSequence::new(lo as u64, values)
}

/// Richardson estimates of `a0, a1, a2` from `r_K` over `window`.
///
/// `order` defaults to the window length minus one (all points in a single
/// tableau); `digits` sets the reported precision. The working precision
/// adds the digits the tableau amplifies rounding by, plus 20.
pub fn growth_coefficients(
    coeffs: &RationalSeries,
    window: (usize, usize),
    order: Option<usize>,
    digits: u32,
) -> Result<GrowthReport> {
    let (lo, hi) = window;
    let points = hi.saturating_sub(lo) + 1;
    let order = order.unwrap_or(points.saturating_sub(1));
    if order < 2 || order + 1 > points {
        return Err(Error::InsufficientData { needed: order.max(2) + 1, have: points });
    }
    let guard = 20 + lagrange_amplification_digits(lo, hi) + (2.0 * (hi as f64).log10()).ceil() as u32;
    let bits = bits_for_digits(digits + guard);
    let r = normalized_ratios(coeffs, window, bits)?;

    let stage0 = richardson_with_increment(&r, order)?;
    let a0 = stage0.value;

    let s1: Vec<Float> = r
        .values
        .iter()
        .zip(lo as u64..)
        .map(|(v, k)| Float::with_val(bits, v - &a0) * k)
        .collect();
    let stage1 = richardson_with_increment(&KSequence::new(lo as u64, s1)?, order)?;
    let a1 = stage1.value;

    let s2: Vec<Float> = r
        .values
        .iter()
        .zip(lo as u64..)
        .map(|(v, k)| (Float::with_val(bits, v - &a0) - Float::with_val(bits, &a1 / k)) * (k * k))
        .collect();
    let stage2 = richardson_with_increment(&KSequence::new(lo as u64, s2)?, order)?;
    let a2 = stage2.value;

    let spreads = [stage0.increment, stage1.increment, stage2.increment];
    let mut residual = Float::new(bits);
    for (spread, coeff) in spreads.iter().zip([&a0, &a1, &a2]) {
        let rel = if coeff.is_zero() {
            spread.clone()
        } else {
            Float::with_val(bits, spread / coeff).abs()
        };
        if rel > residual {
            residual = rel;
        }
    }
    let out_bits = bits_for_digits(digits);
    Ok(GrowthReport {
        a0: Float::with_val(out_bits, &a0),
        a1: Float::with_val(out_bits, &a1),
        a2: Float::with_val(out_bits, &a2),
        window: (lo as u64, hi as u64),
        order,
        spreads: spreads.map(|s| Float::with_val(out_bits, &s)),
        residual: Float::with_val(out_bits, &residual),
        digits: digits.min(digits_for_bits(out_bits)),
    })
}

/// Decimal digits lost when extrapolating to `1/K = 0` through every node
/// of the window: `log10 sum_j |L_j(0)|` for the Lagrange basis in `1/K`.
fn lagrange_amplification_digits(lo: usize, hi: usize) -> u32 {
    let log_terms: Vec<f64> = (lo..=hi)
        .map(|j| {
            (lo..=hi)
                .filter(|&i| i != j)
                .map(|i| (j as f64).ln() - (j as f64 - i as f64).abs().ln())
                .sum()
        })
        .collect();
    let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let total = max + log_terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
    (total / std::f64::consts::LN_10).ceil().max(0.0) as u32
}

/// `-(3^(K+1) K! / pi) (1 - (53/18)/K - (1277/648)/K^2)`, truncated at `1/K^2`.
pub fn predicted_coefficient(k: u64, digits: u32) -> Result<Float> {
    if k == 0 {
        return Err(Error::InvalidInput("predicted coefficient needs K >= 1".into()));
    }
    let bits = bits_for_digits(digits + 10);
    let k_big = Integer::from(k);
    let bracket = Rational::from(1)
        - Rational::from((53, 18)) / Rational::from(&k_big)
        - Rational::from((1277, 648)) / Rational::from(k_big.clone().square());
    let base = Integer::from(3).pow(k as u32 + 1) * Integer::from(Integer::factorial(k as u32));
    let exact_part = Rational::from(bracket * base);
    let value = -Float::with_val(bits, &exact_part) / pi(bits);
    Ok(Float::with_val(bits_for_digits(digits), &value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(start: u64, f: impl Fn(u64) -> Float, n: u64) -> KSequence {
        KSequence::new(start, (start..start + n).map(f).collect()).unwrap()
    }

    #[test]
    fn amplification_grows_with_window() {
        assert_eq!(lagrange_amplification_digits(160, 200), 55);
        assert!(lagrange_amplification_digits(20, 40) < lagrange_amplification_digits(100, 120));
        assert_eq!(lagrange_amplification_digits(5, 5), 0);
    }

    #[test]
    fn constant_sequence() {
        let c = Float::with_val(200, 7) / 3u32;
        let s = seq(1, |_| c.clone(), 4);
        let v = richardson_extrapolate(&s, 2).unwrap();
        assert!(Float::with_val(200, &v - &c).abs() < Float::with_val(200, 1e-55));
    }

    #[test]
    fn first_order_kills_one_over_k() {
        let bits = 200;
        let s = seq(10, |k| Float::with_val(bits, 1) + Float::with_val(bits, 1) / k, 5);
        let v = richardson_extrapolate(&s, 1).unwrap();
        assert!(Float::with_val(bits, &v - 1u32).abs() < Float::with_val(bits, 1e-55));
    }

    #[test]
    fn annihilates_polynomials_in_inverse_k() {
        let bits = 300;
        // 2 - 3/K + 5/K^2 - 7/K^3 + 11/K^4
        let f = |k: u64| {
            let x = Float::with_val(bits, 1) / k;
            let mut acc = Float::with_val(bits, 11);
            for c in [-7i32, 5, -3, 2] {
                acc = acc * &x + c;
            }
            acc
        };
        let s = seq(50, f, 8);
        for order in 4..=7 {
            let v = richardson_extrapolate(&s, order).unwrap();
            assert!(Float::with_val(bits, &v - 2u32).abs() < Float::with_val(bits, 1e-75), "order {order}");
        }
        // order 3 leaves an O(1/K^4) error.
        let v = richardson_extrapolate(&s, 3).unwrap();
        assert!(Float::with_val(bits, &v - 2u32).abs() > Float::with_val(bits, 1e-12));
    }

    #[test]
    fn too_short_is_an_error() {
        let s = seq(1, |_| Float::with_val(64, 1), 3);
        assert!(matches!(richardson_extrapolate(&s, 3), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn output_precision_matches_input() {
        let s = seq(5, |k| Float::with_val(120, 1) / k, 6);
        assert_eq!(richardson_extrapolate(&s, 5).unwrap().prec(), 120);
    }

    #[test]
    fn predicted_first_coefficient() {
        let v = predicted_coefficient(1, 30).unwrap().to_f64();
        let expect = -9.0 * (1.0 - 53.0 / 18.0 - 1277.0 / 648.0) / std::f64::consts::PI;
        assert!((v - expect).abs() < 1e-12 * expect.abs());
        assert!(predicted_coefficient(0, 30).is_err());
    }

    #[test]
    fn window_validation() {
        let coeffs = crate::exact_series::bender_wu_coefficients(0, 10);
        assert!(growth_coefficients(&coeffs, (5, 20), None, 20).is_err());
        assert!(growth_coefficients(&coeffs, (8, 9), None, 20).is_err());
        assert!(growth_coefficients(&coeffs, (3, 10), Some(3), 20).is_ok());
    }
}
