//! Instanton trans-series of the double-well levels and the function
//! `Delta(g) = 4 (mean - Re Borel) / (splitting^2 ln(2 e^gamma / g))`.
//!
//! The n-instanton contribution to `E_{N,±}` is
//! `(2/g)^{N n} xi^n sum_{k<n} lambda^k sum_l eps_{nkl} g^l` with
//! `xi = exp(-1/(6g)) / sqrt(pi g)` and `lambda = ln(-2/g)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::borel::{real_borel_sum, Side};
use crate::error::{Error, Result};
use crate::precision::{bits_for_digits, parse_exact, rational_to_string, to_fixed, to_sci, Coupling, Estimate};
use crate::exact_series::RationalSeries;
use crate::spectral::{eigenvalue, Method, SolverConfig, SpectralResult};

/// Highest power of `g` for which epsilon coefficients are tabulated.
pub const MAX_G_ORDER: u32 = 2;

/// `r0 + r1 * gamma`, gamma the Euler–Mascheroni constant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GammaRational {
    pub r0: Rational,
    pub r1: Rational,
}

impl GammaRational {
    pub fn new(r0: impl Into<Rational>, r1: impl Into<Rational>) -> Self {
        Self { r0: r0.into(), r1: r1.into() }
    }

    pub fn rational(r0: impl Into<Rational>) -> Self {
        Self { r0: r0.into(), r1: Rational::new() }
    }

    pub fn gamma() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.r0 == 0 && self.r1 == 0
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self { r0: Rational::from(&self.r0 * c), r1: Rational::from(&self.r1 * c) }
    }

    pub fn eval(&self, bits: u32) -> Float {
        let gamma = Float::with_val(bits, Constant::Euler);
        Float::with_val(bits, &self.r0) + gamma * &self.r1
    }
}

impl Add for &GammaRational {
    type Output = GammaRational;
    fn add(self, rhs: &GammaRational) -> GammaRational {
        GammaRational { r0: Rational::from(&self.r0 + &rhs.r0), r1: Rational::from(&self.r1 + &rhs.r1) }
    }
}

impl Sub for &GammaRational {
    type Output = GammaRational;
    fn sub(self, rhs: &GammaRational) -> GammaRational {
        GammaRational { r0: Rational::from(&self.r0 - &rhs.r0), r1: Rational::from(&self.r1 - &rhs.r1) }
    }
}

impl Neg for &GammaRational {
    type Output = GammaRational;
    fn neg(self) -> GammaRational {
        GammaRational { r0: Rational::from(-&self.r0), r1: Rational::from(-&self.r1) }
    }
}

impl Mul<&Rational> for &GammaRational {
    type Output = GammaRational;
    fn mul(self, rhs: &Rational) -> GammaRational {
        self.scaled(rhs)
    }
}

impl fmt::Display for GammaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r0 == 0, self.r1 == 0) {
            (_, true) => write!(f, "{}", rational_to_string(&self.r0)),
            (true, false) => write!(f, "{} γ", rational_to_string(&self.r1)),
            (false, false) => {
                let sign = if self.r1 < 0 { '-' } else { '+' };
                write!(f, "{} {} {} γ", rational_to_string(&self.r0), sign, rational_to_string(&self.r1.clone().abs()))
            }
        }
    }
}

/// Parity under the reflection `q -> 1 - q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Parity {
    pub fn sign(self) -> i32 {
        match self {
            Parity::Plus => 1,
            Parity::Minus => -1,
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Plus => Parity::Minus,
            Parity::Minus => Parity::Plus,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Plus => "+",
            Parity::Minus => "-",
        })
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "even" => Ok(Parity::Plus),
            "-" | "minus" | "odd" => Ok(Parity::Minus),
            other => Err(Error::InvalidInput(format!("unknown parity {other:?}; expected + or -"))),
        }
    }
}

/// Index of one epsilon coefficient: level `N`, parity, instanton order
/// `n`, power `k` of lambda and power `l` of g.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpsilonKey {
    pub level: u32,
    pub parity: Parity,
    pub n: u32,
    pub k: u32,
    pub l: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpsilonTable {
    entries: BTreeMap<EpsilonKey, GammaRational>,
}

pub const EPSILON_SCHEMA: &str = "dwell.epsilon/1";

#[derive(Serialize, Deserialize)]
struct EpsilonJson {
    schema: String,
    entries: Vec<EpsilonEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EpsilonEntryJson {
    #[serde(rename = "N")]
    level: u32,
    parity: Parity,
    n: u32,
    k: u32,
    l: u32,
    r0: String,
    r1: String,
}

impl EpsilonTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Ground-doublet coefficients for `n <= 2`, `l <= 2`.
    pub fn ground_doublet() -> Self {
        let mut table = Self::new();
        let q = |n: i64, d: i64| Rational::from((n, d));
        let one_instanton_plus = [
            GammaRational::rational(-1),
            GammaRational::rational(q(71, 12)),
            GammaRational::rational(q(6299, 288)),
        ];
        let two_instanton = [
            // k = 0
            [GammaRational::gamma(), GammaRational::new(q(-23, 2), q(-53, 6)), GammaRational::new(q(13, 12), q(-1277, 72))],
            // k = 1
            [GammaRational::rational(1), GammaRational::rational(q(-53, 6)), GammaRational::rational(q(-1277, 72))],
        ];
        for parity in [Parity::Plus, Parity::Minus] {
            for (l, value) in one_instanton_plus.iter().enumerate() {
                let v = if parity == Parity::Plus { value.clone() } else { -value };
                table.insert(EpsilonKey { level: 0, parity, n: 1, k: 0, l: l as u32 }, v);
            }
            for (k, row) in two_instanton.iter().enumerate() {
                for (l, value) in row.iter().enumerate() {
                    table.insert(EpsilonKey { level: 0, parity, n: 2, k: k as u32, l: l as u32 }, value.clone());
                }
            }
        }
        table
    }

    pub fn insert(&mut self, key: EpsilonKey, value: GammaRational) {
        self.entries.insert(key, value);
    }

    pub fn get(&self, key: &EpsilonKey) -> Option<&GammaRational> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EpsilonKey, &GammaRational)> {
        self.entries.iter()
    }

    /// Keeps only entries with `l <= l_max`.
    pub fn truncated(&self, l_max: u32) -> Self {
        Self { entries: self.entries.iter().filter(|(k, _)| k.l <= l_max).map(|(k, v)| (*k, v.clone())).collect() }
    }

    /// Checks `eps^+ = (-1)^n eps^-` for every entry whose partner exists.
    pub fn parity_relation_holds(&self) -> bool {
        self.entries.iter().all(|(key, value)| {
            let partner = EpsilonKey { parity: key.parity.flipped(), ..*key };
            match self.entries.get(&partner) {
                Some(other) if key.n % 2 == 1 => *other == -value,
                Some(other) => other == value,
                None => true,
            }
        })
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|(key, value)| EpsilonEntryJson {
                level: key.level,
                parity: key.parity,
                n: key.n,
                k: key.k,
                l: key.l,
                r0: rational_to_string(&value.r0),
                r1: rational_to_string(&value.r1),
            })
            .collect();
        serde_json::to_string_pretty(&EpsilonJson { schema: EPSILON_SCHEMA.into(), entries }).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: EpsilonJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("epsilon table: {e}")))?;
        if parsed.schema != EPSILON_SCHEMA {
            return Err(Error::InvalidInput(format!("epsilon table schema {:?}, expected {EPSILON_SCHEMA:?}", parsed.schema)));
        }
        let mut table = Self::new();
        for e in parsed.entries {
            if e.n == 0 || e.k >= e.n {
                return Err(Error::InvalidInput(format!("epsilon entry n={} k={} violates 0 <= k < n", e.n, e.k)));
            }
            let parse = |s: &str| {
                parse_exact(s).ok_or_else(|| Error::InvalidInput(format!("epsilon table: bad rational {s:?}")))
            };
            let value = GammaRational { r0: parse(&e.r0)?, r1: parse(&e.r1)? };
            table.insert(EpsilonKey { level: e.level, parity: e.parity, n: e.n, k: e.k, l: e.l }, value);
        }
        Ok(table)
    }
}

/// `xi = exp(-1/(6g)) / sqrt(pi g)` and `lambda = ln(2/g) + i sign pi`,
/// where the sign is `+` above the cut and `-` below. This is the branch of
/// `ln(-2/g)` whose two-instanton imaginary part cancels that of the
/// lateral Borel sum taken on the same side.
pub fn instanton_variables(g: &Coupling, side: Side, digits: u32) -> (Float, Complex) {
    let bits = bits_for_digits(digits + 10);
    let gf = g.to_float(bits);
    let pi = Float::with_val(bits, Constant::Pi);
    let exponent = Float::with_val(bits, -Float::with_val(bits, 6u32 * &gf).recip());
    let xi = exponent.exp() / Float::with_val(bits, &pi * &gf).sqrt();
    let log = Float::with_val(bits, 2u32 / &gf).ln();
    let lambda = Complex::with_val(bits, (log, pi * side.sign()));
    (xi, lambda)
}

fn check_g_order(l_max: u32) -> Result<()> {
    if l_max > MAX_G_ORDER {
        return Err(Error::UnsupportedOrder { what: "g-order of instanton coefficients", requested: l_max as usize, supported: MAX_G_ORDER as usize });
    }
    Ok(())
}

/// The n-instanton contribution to `E_{N,parity}` truncated at `g^{l_max}`.
pub fn instanton_energy(
    table: &EpsilonTable,
    level: u32,
    parity: Parity,
    n: u32,
    g: &Coupling,
    side: Side,
    l_max: u32,
    digits: u32,
) -> Result<Complex> {
    check_g_order(l_max)?;
    if n == 0 {
        return Err(Error::InvalidInput("instanton order must be at least 1".into()));
    }
    let bits = bits_for_digits(digits + 10);
    let (xi, lambda) = instanton_variables(g, side, digits);
    let gf = g.to_float(bits);
    let mut sum = Complex::new(bits);
    let mut lambda_power = Complex::with_val(bits, 1);
    for k in 0..n {
        let mut inner = Float::new(bits);
        let mut g_power = Float::with_val(bits, 1);
        for l in 0..=l_max {
            let key = EpsilonKey { level, parity, n, k, l };
            let eps = table.get(&key).ok_or(Error::UnsupportedOrder {
                what: "epsilon coefficient (no tabulated value for this N, n, k, l)",
                requested: l as usize,
                supported: table
                    .iter()
                    .filter(|(kk, _)| kk.level == level && kk.parity == parity && kk.n == n && kk.k == k)
                    .map(|(kk, _)| kk.l as usize)
                    .max()
                    .unwrap_or(0),
            })?;
            inner += Float::with_val(bits, eps.eval(bits) * &g_power);
            g_power *= &gf;
        }
        sum += Complex::with_val(bits, &lambda_power * &inner);
        lambda_power *= &lambda;
    }
    let prefactor = Float::with_val(bits, 2u32 / &gf).pow(level * n) * xi.pow(n);
    Ok(sum * prefactor)
}

/// Bracket `1 - (71/12) g - (6299/288) g^2` of the one-instanton splitting,
/// as exact coefficients.
pub fn separation_coefficients() -> [Rational; 3] {
    [Rational::from(1), Rational::from((-71, 12)), Rational::from((-6299, 288))]
}

/// `(a_l, b_l)` such that the two-instanton displacement is
/// `xi^2 sum_l g^l (a_l L + b_l)` with `L = ln(2 e^gamma / g)`.
pub fn displacement_coefficients() -> [(Rational, Rational); 3] {
    [
        (Rational::from(1), Rational::new()),
        (Rational::from((-53, 6)), Rational::from((-23, 2))),
        (Rational::from((-1277, 72)), Rational::from((13, 12))),
    ]
}

fn polynomial_in_g(coeffs: &[Rational], g: &Float) -> Float {
    let mut acc = Float::new(g.prec());
    for c in coeffs.iter().rev() {
        acc = acc * g + c;
    }
    acc
}

/// `E_{0,-} - E_{0,+} ~ 2 xi (1 - (71/12) g - (6299/288) g^2)` through `g^{l_max}`.
pub fn separation_series(g: &Coupling, l_max: u32, digits: u32) -> Result<Float> {
    check_g_order(l_max)?;
    let bits = bits_for_digits(digits + 10);
    let (xi, _) = instanton_variables(g, Side::Above, digits);
    let coeffs = separation_coefficients();
    let bracket = polynomial_in_g(&coeffs[..=l_max as usize], &g.to_float(bits));
    Ok(xi * bracket * 2u32)
}

/// `L = ln(2 e^gamma / g)`.
pub fn log_with_gamma(g: &Coupling, bits: u32) -> Float {
    let gf = g.to_float(bits);
    Float::with_val(bits, 2u32 / &gf).ln() + Float::with_val(bits, Constant::Euler)
}

/// `mean - Re Borel ~ xi^2 [L + g(-(53/6)L - 23/2) + g^2(-(1277/72)L + 13/12)]`
/// through `g^{l_max}`.
pub fn displacement_series(g: &Coupling, l_max: u32, digits: u32) -> Result<Float> {
    check_g_order(l_max)?;
    let bits = bits_for_digits(digits + 10);
    let (xi, _) = instanton_variables(g, Side::Above, digits);
    let big_l = log_with_gamma(g, bits);
    let gf = g.to_float(bits);
    let mut bracket = Float::new(bits);
    let mut g_power = Float::with_val(bits, 1);
    for (a, b) in displacement_coefficients().iter().take(l_max as usize + 1) {
        let term = Float::with_val(bits, &big_l * a) + b;
        bracket += term * &g_power;
        g_power *= &gf;
    }
    Ok(Float::with_val(bits, xi.square_ref()) * bracket)
}

/// Small-g expansion of Delta: `sum_l g^l sum_j c[l][j] / L^j`, obtained by
/// dividing the displacement bracket by `L` times the squared separation
/// bracket and expanding through `g^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaExpansion {
    pub coefficients: Vec<Vec<Rational>>,
}

impl DeltaExpansion {
    pub fn coeff(&self, l: usize, j: usize) -> Rational {
        self.coefficients.get(l).and_then(|row| row.get(j)).cloned().unwrap_or_default()
    }
}

pub fn delta_expansion(order: u32) -> Result<DeltaExpansion> {
    check_g_order(order)?;
    let upto = order as usize;
    // 1 / s(g)^2 as a power series, s = separation bracket.
    let s = separation_coefficients();
    let s2 = crate::series::mul_truncated(&s, &s, upto);
    let mut inv = vec![Rational::new(); upto + 1];
    inv[0] = Rational::from(1);
    for l in 1..=upto {
        let mut acc = Rational::new();
        for j in 1..=l {
            acc -= Rational::from(&s2[j] * &inv[l - j]);
        }
        inv[l] = acc;
    }
    // Displacement / L = a_l + b_l / L.
    let disp = displacement_coefficients();
    let mut coefficients = vec![vec![Rational::new(); 2]; upto + 1];
    for (l, row) in coefficients.iter_mut().enumerate() {
        for m in 0..=l {
            let (a, b) = &disp[m];
            row[0] += Rational::from(a * &inv[l - m]);
            row[1] += Rational::from(b * &inv[l - m]);
        }
    }
    Ok(DeltaExpansion { coefficients })
}

/// How the `1/L` dependence of the Delta asymptotics is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaForm {
    /// Powers of `1/L`, `L = ln(2 e^gamma / g)`, kept exactly.
    Composed,
    /// Each `1/L^j` re-expanded in `1/ln(2/g)`, keeping terms through `1/ln^3(2/g)`.
    InverseLog,
}

impl std::str::FromStr for DeltaForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "composed" => Ok(DeltaForm::Composed),
            "inverse-log" => Ok(DeltaForm::InverseLog),
            other => Err(Error::InvalidInput(format!("unknown asymptotic form {other:?}; expected composed or inverse-log"))),
        }
    }
}

const INVERSE_LOG_TERMS: u32 = 3;

pub fn delta_asymptotic(g: &Coupling, order: u32, form: DeltaForm, digits: u32) -> Result<Float> {
    let expansion = delta_expansion(order)?;
    let bits = bits_for_digits(digits + 10);
    let gf = g.to_float(bits);
    let gamma = Float::with_val(bits, Constant::Euler);
    let ell = Float::with_val(bits, 2u32 / &gf).ln();
    let big_l = Float::with_val(bits, &ell + &gamma);
    let mut total = Float::new(bits);
    let mut g_power = Float::with_val(bits, 1);
    for row in &expansion.coefficients {
        let mut term = Float::new(bits);
        for (j, c) in row.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let factor = if j == 0 {
                Float::with_val(bits, 1)
            } else {
                match form {
                    DeltaForm::Composed => Float::with_val(bits, big_l.clone().pow(-(j as i32))),
                    DeltaForm::InverseLog => inverse_power_reexpanded(j as u32, &ell, &gamma),
                }
            };
            term += factor * c;
        }
        total += term * &g_power;
        g_power *= &gf;
    }
    Ok(total)
}

/// `(ell + gamma)^{-j}` expanded in `1/ell`, truncated after `ell^{-3}`.
fn inverse_power_reexpanded(j: u32, ell: &Float, gamma: &Float) -> Float {
    let bits = ell.prec();
    let mut sum = Float::new(bits);
    // (1 + x)^{-j} = sum_m binom(-j, m) x^m with x = gamma / ell.
    let mut binom = Rational::from(1);
    for m in 0..=INVERSE_LOG_TERMS.saturating_sub(j) {
        if m > 0 {
            binom *= Rational::from((-((j + m - 1) as i64), m as i64));
        }
        let term = Float::with_val(bits, gamma.clone().pow(m)) * &binom / Float::with_val(bits, ell.clone().pow(j + m));
        sum += term;
    }
    sum
}

/// Delta with its inputs and a first-order propagated error.
#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub g: Coupling,
    pub delta: Estimate,
    pub low_confidence: bool,
    pub asymptotic: Float,
    pub separation: Estimate,
    pub mean: Estimate,
    pub displacement: Estimate,
    pub borel: Estimate,
    pub digits: u32,
}

#[derive(Serialize)]
struct DeltaJson {
    schema: &'static str,
    g: String,
    delta: String,
    error: String,
    low_confidence: bool,
    delta_asymptotic: String,
    separation: String,
    separation_error: String,
    mean: String,
    mean_error: String,
    displacement: String,
    displacement_error: String,
    borel_real: String,
    borel_error: String,
}

impl DeltaReport {
    pub fn to_json(&self) -> String {
        let d = self.digits;
        let json = DeltaJson {
            schema: "dwell.delta/1",
            g: self.g.to_string(),
            delta: to_sci(&self.delta.value, 12),
            error: to_sci(&self.delta.error, 3),
            low_confidence: self.low_confidence,
            delta_asymptotic: to_fixed(&self.asymptotic, 5),
            separation: to_sci(&self.separation.value, 20),
            separation_error: to_sci(&self.separation.error, 3),
            mean: to_sci(&self.mean.value, d),
            mean_error: to_sci(&self.mean.error, 3),
            displacement: to_sci(&self.displacement.value, 20),
            displacement_error: to_sci(&self.displacement.error, 3),
            borel_real: to_sci(&self.borel.value, d),
            borel_error: to_sci(&self.borel.error, 3),
        };
        serde_json::to_string_pretty(&json).expect("delta report serializes")
    }
}

/// `Delta = 4 (mean(E) - borel) / ((E_- - E_+)^2 L)`.
///
/// The error adds the absolute contributions of the level and Borel errors
/// linearly. If it exceeds the value the report is flagged low-confidence.
pub fn delta_numeric(
    g: &Coupling,
    e_minus: &SpectralResult,
    e_plus: &SpectralResult,
    borel_real: &Estimate,
    digits: u32,
) -> Result<DeltaReport> {
    for r in [e_minus, e_plus] {
        if r.g != *g {
            return Err(Error::InvalidInput(format!("spectral result at g = {} does not match g = {g}", r.g)));
        }
    }
    if e_minus.parity != Parity::Minus || e_plus.parity != Parity::Plus {
        return Err(Error::InvalidInput("delta_numeric needs the (-) level first and the (+) level second".into()));
    }
    let bits = e_minus.energy.prec().max(e_plus.energy.prec()).max(borel_real.value.prec());
    let splitting = Float::with_val(bits, &e_minus.energy - &e_plus.energy);
    let splitting_error = Float::with_val(bits, &e_minus.error + &e_plus.error);
    let mean = Float::with_val(bits, &e_minus.energy + &e_plus.energy) / 2u32;
    let mean_error = Float::with_val(bits, &splitting_error / 2u32);
    let displacement = Float::with_val(bits, &mean - &borel_real.value);
    let displacement_error = Float::with_val(bits, &mean_error + &borel_real.error);
    let big_l = log_with_gamma(g, bits);
    let denom = Float::with_val(bits, splitting.square_ref()) * &big_l;
    let delta = Float::with_val(bits, &displacement * 4u32) / &denom;

    let rel_disp = if displacement.is_zero() {
        Float::with_val(bits, f64::INFINITY)
    } else {
        Float::with_val(bits, &displacement_error / &displacement).abs()
    };
    let rel_split = Float::with_val(bits, &splitting_error / &splitting).abs() * 2u32;
    let error = Float::with_val(bits, delta.clone().abs() * Float::with_val(bits, &rel_disp + &rel_split));
    let low_confidence = !(error < delta.clone().abs());
    Ok(DeltaReport {
        g: g.clone(),
        asymptotic: delta_asymptotic(g, MAX_G_ORDER, DeltaForm::Composed, digits)?,
        delta: Estimate::new(delta, error),
        low_confidence,
        separation: Estimate::new(splitting, splitting_error),
        mean: Estimate::new(mean, mean_error),
        displacement: Estimate::new(displacement, displacement_error),
        borel: borel_real.clone(),
        digits,
    })
}

/// Delta at `g` from both ground-doublet levels at `digits` target digits
/// and the real Borel sum of `series` at the same precision.
pub fn compute_delta(g: &Coupling, series: &RationalSeries, method: Method, digits: u32) -> Result<DeltaReport> {
    let config = SolverConfig::new(digits, g);
    let plus = eigenvalue(0, Parity::Plus, g, method, &config)?;
    let minus = eigenvalue(0, Parity::Minus, g, method, &config)?;
    let borel = real_borel_sum(series, g, digits)?;
    delta_numeric(g, &minus, &plus, &borel.estimate(), digits)
}

/// CSV with columns `g,delta_numeric,error,delta_asymptotic`, rows in the
/// order given.
pub fn table1_csv(reports: &[DeltaReport]) -> String {
    let mut out = String::from("g,delta_numeric,error,delta_asymptotic\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.g,
            to_fixed(&r.delta.value, 6),
            to_sci(&r.delta.error, 2),
            to_fixed(&r.asymptotic, 5)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Coupling {
        s.parse().unwrap()
    }

    #[test]
    fn xi_at_one_sixth() {
        let (xi, _) = instanton_variables(&g("1/6"), Side::Above, 30);
        let bits = xi.prec();
        let pi = Float::with_val(bits, Constant::Pi);
        let expected = Float::with_val(bits, -1).exp() / Float::with_val(bits, pi / 6u32).sqrt();
        assert!(Float::with_val(bits, &xi - &expected).abs() < 1e-35);
    }

    #[test]
    fn xi_size_at_small_coupling() {
        let (xi, _) = instanton_variables(&g("0.001"), Side::Above, 20);
        let two_xi = Float::with_val(xi.prec(), &xi * 2u32);
        assert_eq!(to_sci(&two_xi, 3), "1.48e-71");
    }

    #[test]
    fn lambda_branch_by_side() {
        let bits = bits_for_digits(40);
        let pi = Float::with_val(bits, Constant::Pi);
        let (_, above) = instanton_variables(&g("0.01"), Side::Above, 30);
        let (_, below) = instanton_variables(&g("0.01"), Side::Below, 30);
        assert!(Float::with_val(bits, above.imag() - &pi).abs() < 1e-38);
        assert!(Float::with_val(bits, below.imag() + &pi).abs() < 1e-38);
        let log200 = Float::with_val(bits, 200).ln();
        assert!(Float::with_val(bits, above.real() - &log200).abs() < 1e-38);
    }

    #[test]
    fn table_has_parity_relation_and_twelve_values_per_parity() {
        let table = EpsilonTable::ground_doublet();
        assert_eq!(table.len(), 18);
        assert!(table.parity_relation_holds());
        let key = EpsilonKey { level: 0, parity: Parity::Plus, n: 1, k: 0, l: 2 };
        assert_eq!(table.get(&key).unwrap(), &GammaRational::rational(Rational::from((6299, 288))));
    }

    #[test]
    fn table_json_round_trip() {
        let table = EpsilonTable::ground_doublet();
        let back = EpsilonTable::from_json(&table.to_json()).unwrap();
        assert_eq!(table, back);
        assert!(EpsilonTable::from_json(r#"{"schema":"other","entries":[]}"#).is_err());
    }

    #[test]
    fn one_instanton_terms_are_opposite() {
        let table = EpsilonTable::ground_doublet();
        let gg = g("0.01");
        let plus = instanton_energy(&table, 0, Parity::Plus, 1, &gg, Side::Above, 2, 30).unwrap();
        let minus = instanton_energy(&table, 0, Parity::Minus, 1, &gg, Side::Above, 2, 30).unwrap();
        let sum = Complex::with_val(plus.prec().0, &plus + &minus);
        assert!(sum.real().is_zero() && sum.imag().is_zero());
        assert!(plus.imag().is_zero());
    }

    #[test]
    fn one_instanton_matches_half_separation() {
        let table = EpsilonTable::ground_doublet();
        let gg = g("0.005");
        let minus = instanton_energy(&table, 0, Parity::Minus, 1, &gg, Side::Below, 2, 30).unwrap();
        let sep = separation_series(&gg, 2, 30).unwrap();
        let diff = Float::with_val(sep.prec(), minus.real() * 2u32) - &sep;
        assert!(Float::with_val(sep.prec(), &diff / &sep).abs() < 1e-30);
    }

    #[test]
    fn displacement_coefficients_match_two_instanton_table() {
        // Re lambda = ln(2/g) = L - gamma, so a_l L + b_l = eps_21l ln(2/g) + eps_20l
        // requires eps_21l = a_l and eps_20l = a_l gamma + b_l.
        let table = EpsilonTable::ground_doublet();
        for parity in [Parity::Plus, Parity::Minus] {
            for (l, (a, b)) in displacement_coefficients().iter().enumerate() {
                let k1 = table.get(&EpsilonKey { level: 0, parity, n: 2, k: 1, l: l as u32 }).unwrap();
                let k0 = table.get(&EpsilonKey { level: 0, parity, n: 2, k: 0, l: l as u32 }).unwrap();
                assert_eq!(*k1, GammaRational::rational(a.clone()));
                assert_eq!(*k0, GammaRational::new(b.clone(), a.clone()));
            }
        }
    }

    #[test]
    fn separation_truncation_difference() {
        let gg = g("0.005");
        let s1 = separation_series(&gg, 1, 30).unwrap();
        let s2 = separation_series(&gg, 2, 30).unwrap();
        let rel = (Float::with_val(s1.prec(), &s1 - &s2) / &s2).to_f64();
        let expected = 6299.0 / 288.0 * 0.005f64.powi(2) / (1.0 - 71.0 / 12.0 * 0.005 - 6299.0 / 288.0 * 0.005f64.powi(2));
        assert!((rel - expected).abs() < 1e-12);
        assert!((rel.abs() / (6299.0 / 288.0 * 0.005f64.powi(2)) - 1.0).abs() < 0.05);
    }

    #[test]
    fn order_three_is_rejected() {
        let gg = g("0.01");
        assert!(matches!(separation_series(&gg, 3, 20), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(displacement_series(&gg, 3, 20), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(delta_asymptotic(&gg, 3, DeltaForm::Composed, 20), Err(Error::UnsupportedOrder { .. })));
    }

    #[test]
    fn composed_expansion_constants() {
        let e = delta_expansion(2).unwrap();
        assert_eq!(e.coeff(0, 0), 1);
        assert_eq!(e.coeff(0, 1), 0);
        assert_eq!(e.coeff(1, 0), 3);
        assert_eq!(e.coeff(1, 1), Rational::from((-23, 2)));
        assert_eq!(e.coeff(2, 0), Rational::from((53, 2)));
        assert_eq!(e.coeff(2, 1), -135);
    }

    #[test]
    fn asymptotic_values() {
        let cases = [("0.005", "1.00640"), ("0.007", "1.00832"), ("0.01", "1.01078")];
        for (gs, expected) in cases {
            let v = delta_asymptotic(&g(gs), 2, DeltaForm::Composed, 30).unwrap();
            assert_eq!(to_fixed(&v, 5), expected, "g = {gs}");
        }
        let v = delta_asymptotic(&g("0.1"), 2, DeltaForm::InverseLog, 30).unwrap();
        assert_eq!(to_fixed(&v, 5), "0.86029");
    }

    #[test]
    fn gamma_rational_display() {
        let v = GammaRational::new(Rational::from((13, 12)), Rational::from((-1277, 72)));
        assert_eq!(v.to_string(), "13/12 - 1277/72 γ");
        assert_eq!(GammaRational::gamma().to_string(), "1 γ");
        assert_eq!(GammaRational::rational(-1).to_string(), "-1");
    }
}
