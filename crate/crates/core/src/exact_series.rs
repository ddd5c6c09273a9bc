//! Exact perturbative coefficients of the double-well ground-state doublet.
//!
//! The Hamiltonian is rescaled with `q = sqrt(g) x`, which turns it into
//! `-1/2 d^2/dx^2 + x^2/2 - sqrt(g) x^3 + (g/2) x^4`. The eigenfunction is
//! expanded as `exp(-x^2/2) * sum_k s^k P_k(x)` with `s = sqrt(g)` and each
//! `P_k` a polynomial. Every order is a triangular solve over the rationals.

use std::fmt;
use std::str::FromStr;

use rug::ops::{DivRounding, Pow};
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::series::Bivariate;

/// Power series in one variable with dense exact rational coefficients.
///
/// `coeffs[k]` is the coefficient of `variable^k`; the series is known
/// through `variable^order` with `order = coeffs.len() - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSeries {
    variable: String,
    coeffs: Vec<Rational>,
}

impl RationalSeries {
    pub fn new(variable: impl Into<String>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self { variable: variable.into(), coeffs })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    /// Highest retained power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Keeps terms through `variable^order`.
    pub fn truncated(&self, order: usize) -> Self {
        let end = (order + 1).min(self.coeffs.len());
        Self { variable: self.variable.clone(), coeffs: self.coeffs[..end].to_vec() }
    }

    /// Serializes as `K<TAB>numerator/denominator`, one line per coefficient.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{}\t{}/{}\n", k, c.numer(), c.denom()));
        }
        out
    }

    /// Parses the format written by [`RationalSeries::to_text`]. Indices
    /// must be dense and start at zero.
    pub fn from_text(variable: impl Into<String>, text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let bad = |why: &str| Error::Parse { line: lineno + 1, reason: why.to_string() };
            let (idx, value) = line.split_once('\t').ok_or_else(|| bad("missing tab separator"))?;
            let idx: usize = idx.trim().parse().map_err(|_| bad("index is not an integer"))?;
            if idx != coeffs.len() {
                return Err(bad("coefficient indices must be dense and ascending"));
            }
            let value = parse_rational(value.trim()).ok_or_else(|| bad("malformed rational"))?;
            coeffs.push(value);
        }
        Self::new(variable, coeffs)
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = Integer::from_str(num).ok()?;
    let den = Integer::from_str(den).ok()?;
    if den <= 0 {
        return None;
    }
    Some(Rational::from((num, den)))
}

/// Coefficients `E_{N,0} .. E_{N,k_max}` of the perturbation series in `g`
/// for the `N`-th unperturbed level.
///
/// Deterministic and exact; for `N = 0` the run to `k_max = 200` takes about
/// a minute in release builds.
pub fn bender_wu_coefficients(n: u32, k_max: u32) -> RationalSeries {
    let n_level = n as usize;
    let half_orders = 2 * k_max as usize;

    // P_0 solves (L - N) P_0 = 0, normalised to a unit coefficient of x^N.
    let mut p0 = vec![Rational::new(); n_level + 1];
    p0[n_level] = Rational::from(1);
    for m in (0..n_level).rev() {
        if (n_level - m) % 2 == 1 {
            continue;
        }
        let lift = Rational::from(((m + 2) * (m + 1)) as u64) * &p0[m + 2] / 2u32;
        p0[m] = lift / Rational::from(m as i64 - n_level as i64);
    }

    let mut polys: Vec<Vec<Rational>> = vec![p0];
    // eps[j] is the energy correction at order s^j.
    let mut eps: Vec<Rational> = vec![Rational::from((2 * n as u64 + 1, 2u64))];

    for k in 1..=half_orders {
        let degree = n_level + 3 * k;
        let mut rhs = vec![Rational::new(); degree + 1];

        // x^3 P_{k-1}
        for (m, c) in polys[k - 1].iter().enumerate() {
            if *c != 0 {
                rhs[m + 3] += c;
            }
        }
        // -1/2 x^4 P_{k-2}
        if k >= 2 {
            for (m, c) in polys[k - 2].iter().enumerate() {
                if *c != 0 {
                    rhs[m + 4] -= Rational::from(c / 2u32);
                }
            }
        }
        // sum_{1 <= j < k} eps_j P_{k-j}; odd-order corrections vanish
        for j in 1..k {
            if eps[j] == 0 {
                continue;
            }
            for (m, c) in polys[k - j].iter().enumerate() {
                if *c != 0 {
                    rhs[m] += Rational::from(&eps[j] * c);
                }
            }
        }

        let mut pk = vec![Rational::new(); degree + 1];
        // Coefficients above x^N follow from the top down.
        for m in (n_level + 1..=degree).rev() {
            let lift = if m + 2 <= degree {
                Rational::from(((m + 2) * (m + 1)) as u64) * &pk[m + 2] / 2u32
            } else {
                Rational::new()
            };
            let total = lift + &rhs[m];
            if total != 0 {
                pk[m] = total / Rational::from((m - n_level) as u64);
            }
        }
        // Solvability at x^N fixes eps_k; a_{k,N} = 0 fixes the gauge.
        let lift_n = Rational::from(((n_level + 2) * (n_level + 1)) as u64) * &pk[n_level + 2] / 2u32;
        let e_k = -(lift_n + &rhs[n_level]);
        for m in (0..n_level).rev() {
            let lift = Rational::from(((m + 2) * (m + 1)) as u64) * &pk[m + 2] / 2u32;
            let total = lift + &rhs[m] + Rational::from(&e_k * &polys[0][m]);
            pk[m] = total / Rational::from(m as i64 - n_level as i64);
        }
        eps.push(e_k);
        polys.push(pk);
    }

    let coeffs = eps.into_iter().step_by(2).collect();
    RationalSeries { variable: "g".to_string(), coeffs }
}

/// Solves `D(E, g) = N + 1/2` for `E(g)` order by order in `g`.
///
/// `d` must contain `E` at order `g^0` with unit coefficient (as every
/// physical D-function does); `order` may not exceed the truncation of `d`.
pub fn invert_d_series(d: &Bivariate, n: u32, order: usize) -> Result<RationalSeries> {
    if order > d.known_order() {
        return Err(Error::UnsupportedOrder {
            what: "D-series inversion",
            requested: order,
            supported: d.known_order(),
        });
    }
    let lead = d.coeff(0, 1);
    if lead == 0 || d.degree_in_e(0) > 1 {
        return Err(Error::InvalidInput(
            "D(E, 0) must be linear in E with a nonzero coefficient".into(),
        ));
    }
    let target = Rational::from((2 * n as u64 + 1, 2u64));
    let mut coeffs = vec![(target - d.coeff(0, 0)) / lead.clone()];
    for l in 1..=order {
        // Residual of D(E_trial) at g^l with the unknown E_l set to zero.
        let mut trial = coeffs.clone();
        trial.push(Rational::new());
        let residual = d.compose_in_e(&trial, l)[l].clone();
        coeffs.push(-residual / lead.clone());
    }
    RationalSeries::new("g", coeffs)
}

/// Correctly rounded (ties to even) scientific notation with `digits`
/// significant digits, e.g. `-4.50e0`.
pub fn coefficient_decimal(c: &Rational, digits: u32) -> String {
    let digits = digits.max(1);
    if *c == 0 {
        let zeros = "0".repeat(digits as usize - 1);
        return if digits == 1 { "0e0".to_string() } else { format!("0.{zeros}e0") };
    }
    let negative = *c < 0;
    let mag = Rational::from(c.abs_ref());

    // Initial exponent guess from bit lengths, then corrected.
    let approx = mag.numer().significant_bits() as i64 - mag.denom().significant_bits() as i64;
    let mut exp10 = ((approx as f64) * std::f64::consts::LOG10_2).floor() as i64;
    loop {
        let low = pow10(exp10);
        if mag < low {
            exp10 -= 1;
            continue;
        }
        let high = pow10(exp10 + 1);
        if mag >= high {
            exp10 += 1;
            continue;
        }
        break;
    }

    let mut mantissa = round_half_even(&(mag.clone() * pow10(digits as i64 - 1 - exp10)));
    if mantissa == Integer::from(10).pow(digits) {
        mantissa /= 10;
        exp10 += 1;
    }
    let text = mantissa.to_string();
    let (head, tail) = text.split_at(1);
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp10}")
    } else {
        format!("{sign}{head}.{tail}e{exp10}")
    }
}

fn pow10(e: i64) -> Rational {
    let p = Integer::from(10).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from(p)
    } else {
        Rational::from((Integer::from(1), p))
    }
}

fn round_half_even(x: &Rational) -> Integer {
    let (num, den) = (x.numer(), x.denom());
    let floor = num.clone().div_floor(den);
    let rem = Rational::from(x - &floor);
    let half = Rational::from((1, 2));
    match rem.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn harmonic_limit() {
        let s = bender_wu_coefficients(0, 0);
        assert_eq!(s.coeffs(), &[q(1, 2)]);
        let s = bender_wu_coefficients(3, 0);
        assert_eq!(s.coeffs(), &[q(7, 2)]);
    }

    #[test]
    fn low_orders_ground_state() {
        let s = bender_wu_coefficients(0, 2);
        assert_eq!(s.coeffs(), &[q(1, 2), q(-1, 1), q(-9, 2)]);
    }

    #[test]
    fn low_orders_first_excited_level() {
        // D(E, g) = 3/2 to first order: E_1 = -(3 E^2 + 1/4) at E = 3/2.
        let s = bender_wu_coefficients(1, 2);
        let d = Bivariate::double_well_d();
        let oracle = invert_d_series(&d, 1, 2).unwrap();
        assert_eq!(s.coeff(1), &q(-7, 1));
        assert_eq!(s, oracle);
    }

    #[test]
    fn agrees_with_d_inversion_for_low_levels() {
        let d = Bivariate::double_well_d();
        for n in 0..4 {
            assert_eq!(bender_wu_coefficients(n, 2), invert_d_series(&d, n, 2).unwrap(), "N = {n}");
        }
    }

    #[test]
    fn identity_d_inverts_to_constant() {
        let d = Bivariate::identity_d(5);
        let s = invert_d_series(&d, 0, 5).unwrap();
        assert_eq!(s.coeffs(), &[q(1, 2), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn inversion_beyond_truncation_is_rejected() {
        let d = Bivariate::double_well_d();
        assert!(matches!(invert_d_series(&d, 0, 3), Err(Error::UnsupportedOrder { .. })));
    }

    #[test]
    fn signs_and_ratio_growth() {
        let s = bender_wu_coefficients(0, 40);
        for k in 1..=40 {
            assert!(*s.coeff(k) < 0, "E_{k} should be negative");
        }
        // E_{K+1} / (3 (K+1) E_K) - 1 shrinks roughly like 1/K.
        let dev = |k: usize| {
            let r = Rational::from(s.coeff(k + 1) / s.coeff(k)) / Rational::from(3 * (k as u64 + 1));
            (r - 1u32).abs().to_f64()
        };
        assert!(dev(39) < dev(20));
        assert!(dev(39) * 39.0 < 3.0);
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(coefficient_decimal(&q(1, 2), 5), "5.0000e-1");
        assert_eq!(coefficient_decimal(&q(-9, 2), 3), "-4.50e0");
        assert_eq!(coefficient_decimal(&q(1, 3), 4), "3.333e-1");
        assert_eq!(coefficient_decimal(&q(2, 3), 1), "7e-1");
        assert_eq!(coefficient_decimal(&q(9999, 1), 3), "1.00e4");
        // ties go to even
        assert_eq!(coefficient_decimal(&q(125, 1000), 2), "1.2e-1");
        assert_eq!(coefficient_decimal(&q(135, 1000), 2), "1.4e-1");
        assert_eq!(coefficient_decimal(&q(0, 1), 3), "0.00e0");
    }

    #[test]
    fn text_format_rejects_gaps() {
        assert!(RationalSeries::from_text("g", "0\t1/2\n2\t-1/1\n").is_err());
        assert!(RationalSeries::from_text("g", "0\t1/0\n").is_err());
        assert!(RationalSeries::from_text("g", "0 1/2\n").is_err());
        assert!(RationalSeries::from_text("g", "").is_err());
    }
}
