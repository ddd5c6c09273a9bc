//! Exact trans-series solution of the quantization condition
//!
//! `Gamma(1/2 - D) (-2/g)^D exp(-A/2) / sqrt(2 pi) = ± i`
//!
//! in powers of the instanton weight. Writing `D = N + 1/2 + delta` and
//! `A = 1/(3g) + a`, and taking `(-2/g)^(1/2) = e^(lambda/2) = i sqrt(2/g)`,
//! the condition becomes
//!
//! `1/Gamma(-N - delta) = ± (-1)^N w e^(delta lambda) e^(-a/2)`
//!
//! with `w = (2/g)^N xi`. Substituting `E = E0(g) + sum_n w^n P_n(lambda, g)`
//! and matching powers of `w` determines each `P_n` linearly. The
//! coefficients of `g^l` in every sector need `D` and `A` through `g^l`.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact_series::invert_d_series;
use crate::instanton::{EpsilonKey, EpsilonTable, GammaRational, Parity};
use crate::series::Bivariate;

/// Formal constants of the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    /// `ln(-2/g)`
    Lambda,
    /// Euler's constant.
    Gamma,
    Zeta2,
    Zeta3,
}

const SYMBOLS: [Symbol; 4] = [Symbol::Lambda, Symbol::Gamma, Symbol::Zeta2, Symbol::Zeta3];

impl Symbol {
    fn index(self) -> usize {
        self as usize
    }

    fn name(self) -> &'static str {
        match self {
            Symbol::Lambda => "λ",
            Symbol::Gamma => "γ",
            Symbol::Zeta2 => "ζ(2)",
            Symbol::Zeta3 => "ζ(3)",
        }
    }
}

type Monomial = [u32; 4];

/// Polynomial in the formal symbols with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Rational>) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 4], c.into());
        p
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut m = [0; 4];
        m[s.index()] = 1;
        let mut p = Self::zero();
        p.add_term(m, Rational::from(1));
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial with the given exponents of
    /// `(lambda, gamma, zeta2, zeta3)`.
    pub fn coeff(&self, exponents: [u32; 4]) -> Rational {
        self.terms.get(&exponents).cloned().unwrap_or_default()
    }

    /// The constant term, if the polynomial has no other terms.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::new()),
            1 => self.terms.get(&[0; 4]).cloned(),
            _ => None,
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, Rational::from(v * c));
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Self {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(*m, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Self {
        self.add(&other.scaled(&Rational::from(-1)))
    }

    pub fn mul(&self, other: &Poly) -> Self {
        let mut out = Self::zero();
        for (ma, va) in &self.terms {
            for (mb, vb) in &other.terms {
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
                out.add_term(m, Rational::from(va * vb));
            }
        }
        out
    }

    /// Splits off powers of lambda: `sum_k lambda^k c_k`, each `c_k` of the
    /// form `r0 + r1 gamma`.
    pub fn lambda_coefficients(&self) -> Result<BTreeMap<u32, GammaRational>> {
        let mut out: BTreeMap<u32, GammaRational> = BTreeMap::new();
        for (m, v) in &self.terms {
            if m[2] != 0 || m[3] != 0 || m[1] > 1 {
                return Err(Error::InvalidInput(format!("coefficient {self} is not of the form r0 + r1 γ per power of λ")));
            }
            let entry = out.entry(m[0]).or_default();
            if m[1] == 0 {
                entry.r0 += v;
            } else {
                entry.r1 += v;
            }
        }
        Ok(out)
    }
}

impl From<&GammaRational> for Poly {
    fn from(v: &GammaRational) -> Self {
        Poly::constant(v.r0.clone()).add(&Poly::symbol(Symbol::Gamma).scaled(&v.r1))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, v)) in self.terms.iter().enumerate() {
            let negative = *v < 0;
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = Rational::from(v.abs_ref());
            let symbols: Vec<String> = SYMBOLS
                .iter()
                .filter(|s| m[s.index()] > 0)
                .map(|s| match m[s.index()] {
                    1 => s.name().to_string(),
                    e => format!("{}^{e}", s.name()),
                })
                .collect();
            if symbols.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude == 1 {
                f.write_str(&symbols.join(" "))?;
            } else {
                write!(f, "{magnitude} {}", symbols.join(" "))?;
            }
        }
        Ok(())
    }
}

fn series_mul(a: &[Poly], b: &[Poly], upto: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); upto + 1];
    for (i, x) in a.iter().enumerate().take(upto + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(upto + 1 - i) {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// `exp(x)` for a series without constant term.
fn series_exp(x: &[Poly], upto: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); upto + 1];
    out[0] = Poly::constant(1);
    let mut power = out.clone();
    for k in 1..=upto {
        power = series_mul(&power, x, upto);
        let inv = Rational::from((1, Integer::from(Integer::factorial(k as u32))));
        for (o, p) in out.iter_mut().zip(&power) {
            *o = o.add(&p.scaled(&inv));
        }
    }
    out
}

/// `1/a` for a series whose constant term is a nonzero rational.
fn series_inv(a: &[Poly], upto: usize) -> Result<Vec<Poly>> {
    let lead = a
        .first()
        .and_then(Poly::as_rational)
        .filter(|c| *c != 0)
        .ok_or_else(|| Error::InvalidInput("series inverse needs a nonzero rational constant term".into()))?;
    let inv_lead = lead.recip();
    let mut out = vec![Poly::zero(); upto + 1];
    out[0] = Poly::constant(inv_lead.clone());
    for k in 1..=upto {
        let mut s = Poly::zero();
        for j in 1..=k.min(a.len() - 1) {
            s = s.add(&a[j].mul(&out[k - j]));
        }
        out[k] = s.scaled(&Rational::from(-&inv_lead));
    }
    Ok(out)
}

/// Generalized harmonic number `sum_{k=1}^{n} k^(-s)`.
fn harmonic(n: u32, s: u32) -> Rational {
    (1..=n).map(|k| Rational::from((1, Integer::from(k).pow(s)))).sum()
}

/// Highest supported order of the Laurent expansion of `Gamma` at a pole.
pub const MAX_LAURENT_ORDER: usize = 2;

/// `Gamma(1 + N + delta) sin(pi delta) / (pi delta N!)` through `delta^3`.
fn regular_factor(level: u32) -> Vec<Poly> {
    let upto = 3;
    let gamma = Poly::symbol(Symbol::Gamma);
    let zeta2 = Poly::symbol(Symbol::Zeta2);
    let zeta3 = Poly::symbol(Symbol::Zeta3);
    // log Gamma(1 + N + delta) - log N! = psi(N+1) delta + psi'(N+1) delta^2/2 + psi''(N+1) delta^3/6
    let c1 = Poly::constant(harmonic(level, 1)).sub(&gamma);
    let c2 = zeta2.sub(&Poly::constant(harmonic(level, 2))).scaled(&Rational::from((1, 2)));
    let c3 = zeta3.sub(&Poly::constant(harmonic(level, 3))).scaled(&Rational::from((-1, 3)));
    let log = vec![Poly::zero(), c1, c2, c3];
    // sin(pi delta)/(pi delta) = 1 - zeta(2) delta^2 + O(delta^4)
    let sinc = vec![Poly::constant(1), Poly::zero(), zeta2.scaled(&Rational::from(-1)), Poly::zero()];
    series_mul(&series_exp(&log, upto), &sinc, upto)
}

/// Coefficients of `delta^m`, `m >= -1`, of a Laurent expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    coeffs: Vec<Poly>,
}

impl LaurentSeries {
    /// Highest power of `delta` kept.
    pub fn order(&self) -> i32 {
        self.coeffs.len() as i32 - 2
    }

    /// Coefficient of `delta^m` for `-1 <= m <= order`.
    pub fn coeff(&self, m: i32) -> &Poly {
        &self.coeffs[(m + 1) as usize]
    }

    pub fn residue(&self) -> &Poly {
        self.coeff(-1)
    }
}

/// Laurent expansion of `Gamma(-N - delta)` about `delta = 0` through
/// `delta^order`.
pub fn gamma_pole_expansion(level: u32, order: usize) -> Result<LaurentSeries> {
    if order > MAX_LAURENT_ORDER {
        return Err(Error::UnsupportedOrder { what: "Laurent expansion of Gamma", requested: order, supported: MAX_LAURENT_ORDER });
    }
    // Gamma(-N - delta) = (-1)^(N+1) / (N! delta) / G(delta)
    let inverse = series_inv(&regular_factor(level), order + 1)?;
    let sign = if level % 2 == 0 { -1 } else { 1 };
    let prefactor = Rational::from((sign, Integer::from(Integer::factorial(level))));
    Ok(LaurentSeries { coeffs: inverse.iter().map(|c| c.scaled(&prefactor)).collect() })
}

/// Coefficients `f_1 .. f_m_max` of `1/Gamma(-N - delta) = sum f_m delta^m`.
fn reciprocal_gamma_coefficients(level: u32, m_max: usize) -> Vec<Poly> {
    let regular = regular_factor(level);
    let sign = if level % 2 == 0 { -1 } else { 1 };
    let prefactor = Rational::from(Integer::from(Integer::factorial(level)) * sign);
    (1..=m_max).map(|m| regular[m - 1].scaled(&prefactor)).collect()
}

/// Energy as `sum_n w^n sum_{k,l} c_{nkl} lambda^k g^l`, with `w = (2/g)^N xi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransSeries {
    pub level: u32,
    pub parity: Parity,
    pub max_l: u32,
    /// `sectors[n][(k, l)]`; sector 0 holds the perturbative coefficients at `k = 0`.
    pub sectors: BTreeMap<u32, BTreeMap<(u32, u32), GammaRational>>,
}

impl TransSeries {
    pub fn get(&self, n: u32, k: u32, l: u32) -> Option<&GammaRational> {
        self.sectors.get(&n).and_then(|s| s.get(&(k, l)))
    }

    /// The `n >= 1` sectors as epsilon coefficients, zeros included.
    pub fn epsilon_entries(&self) -> impl Iterator<Item = (EpsilonKey, GammaRational)> + '_ {
        self.sectors.iter().filter(|(n, _)| **n >= 1).flat_map(move |(n, sector)| {
            sector.iter().map(move |((k, l), v)| {
                (EpsilonKey { level: self.level, parity: self.parity, n: *n, k: *k, l: *l }, v.clone())
            })
        })
    }
}

pub const MAX_INSTANTON_ORDER: u32 = 2;

/// Double series indexed `[power of w][power of g]`.
type WSeries = Vec<Vec<Poly>>;

fn w_zero(n_max: usize, l_max: usize) -> WSeries {
    vec![vec![Poly::zero(); l_max + 1]; n_max + 1]
}

fn w_from_g(g: &[Rational], n_max: usize, l_max: usize) -> WSeries {
    let mut out = w_zero(n_max, l_max);
    for (l, c) in g.iter().enumerate().take(l_max + 1) {
        out[0][l] = Poly::constant(c.clone());
    }
    out
}

fn w_add(a: &WSeries, b: &WSeries) -> WSeries {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.add(q)).collect()).collect()
}

fn w_scale(a: &WSeries, c: &Poly) -> WSeries {
    a.iter().map(|row| row.iter().map(|p| p.mul(c)).collect()).collect()
}

fn w_mul(a: &WSeries, b: &WSeries) -> WSeries {
    let n_max = a.len() - 1;
    let l_max = a[0].len() - 1;
    let mut out = w_zero(n_max, l_max);
    for i in 0..=n_max {
        for j in 0..=n_max - i {
            let product = series_mul(&a[i], &b[j], l_max);
            out[i + j] = out[i + j].iter().zip(&product).map(|(p, q)| p.add(q)).collect();
        }
    }
    out
}

/// `exp(x)` for `x` with vanishing `w^0 g^0` term, hence nilpotent.
fn w_exp(x: &WSeries) -> WSeries {
    let n_max = x.len() - 1;
    let l_max = x[0].len() - 1;
    let mut out = w_zero(n_max, l_max);
    out[0][0] = Poly::constant(1);
    let mut power = out.clone();
    for k in 1..=n_max + l_max {
        power = w_mul(&power, x);
        let inv = Poly::constant(Rational::from((1, Integer::from(Integer::factorial(k as u32)))));
        out = w_add(&out, &w_scale(&power, &inv));
    }
    out
}

/// `sum_p c_p x^p` with `g`-series coefficients `c_p`.
fn w_polynomial(coeffs: &[WSeries], x: &WSeries) -> WSeries {
    let n_max = x.len() - 1;
    let l_max = x[0].len() - 1;
    let mut out = w_zero(n_max, l_max);
    let mut power = w_zero(n_max, l_max);
    power[0][0] = Poly::constant(1);
    for c in coeffs {
        out = w_add(&out, &w_mul(c, &power));
        power = w_mul(&power, x);
    }
    out
}

/// Taylor coefficients `f^(p)(E0)/p!` for `p = 0 ..= p_max` as `w`-series.
fn taylor_at(f: &Bivariate, e0: &[Rational], p_max: usize, n_max: usize, l_max: usize) -> Vec<WSeries> {
    let mut derivative = f.clone();
    let mut out = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let values = derivative.compose_in_e(e0, l_max);
        let inv = Rational::from((1, Integer::from(Integer::factorial(p as u32))));
        let scaled: Vec<Rational> = values.into_iter().map(|v| v * &inv).collect();
        out.push(w_from_g(&scaled, n_max, l_max));
        derivative = derivative.derivative_e();
    }
    out
}

/// Solves the quantization condition with the given `D` and regular part
/// `a = A - 1/(3g)` of `A`, for instanton orders `n <= n_max` and powers
/// `g^l`, `l <= l_max`.
pub fn expand_quantization(
    d: &Bivariate,
    a_regular: &Bivariate,
    level: u32,
    parity: Parity,
    n_max: u32,
    l_max: u32,
) -> Result<TransSeries> {
    if n_max > MAX_INSTANTON_ORDER {
        return Err(Error::UnsupportedOrder {
            what: "instanton order of the quantization expansion",
            requested: n_max as usize,
            supported: MAX_INSTANTON_ORDER as usize,
        });
    }
    let supported = d.known_order().min(a_regular.known_order());
    if l_max as usize > supported {
        return Err(Error::UnsupportedOrder {
            what: "power of g in the quantization expansion (D and A truncation)",
            requested: l_max as usize,
            supported,
        });
    }
    if a_regular.degree_in_e(0) > 0 || a_regular.coeff(0, 0) != 0 {
        return Err(Error::InvalidInput("the regular part of A must vanish at g = 0".into()));
    }
    let (nm, lm) = (n_max as usize, l_max as usize);
    let e0 = invert_d_series(d, level, lm)?;
    let e0: Vec<Rational> = e0.coeffs().to_vec();

    let mut d_taylor = taylor_at(d, &e0, nm, nm, lm);
    // delta = D(E) - N - 1/2 has no constant term
    d_taylor[0] = w_zero(nm, lm);
    let a_taylor = taylor_at(a_regular, &e0, nm, nm, lm);
    let f: Vec<WSeries> = std::iter::once(Poly::zero())
        .chain(reciprocal_gamma_coefficients(level, nm))
        .map(|c| {
            let mut s = w_zero(nm, lm);
            s[0][0] = c;
            s
        })
        .collect();
    let chi = parity.sign() * if level % 2 == 0 { 1 } else { -1 };
    let lambda = Poly::symbol(Symbol::Lambda);
    let minus_half = Poly::constant(Rational::from((-1, 2)));

    // Linear coefficient f_1 D'(E0) of the new unknown at each order.
    let linear: Vec<Poly> = {
        let f1 = f[1][0][0].clone();
        d_taylor[1][0].iter().map(|c| c.mul(&f1)).collect()
    };
    let linear_inv = series_inv(&linear, lm)?;

    let mut eps = w_zero(nm, lm);
    for n in 1..=nm {
        let delta = w_polynomial(&d_taylor, &eps);
        let lhs = w_polynomial(&f, &delta);
        let a = w_polynomial(&a_taylor, &eps);
        let exponent = w_add(&w_scale(&delta, &lambda), &w_scale(&a, &minus_half));
        let tail = w_exp(&exponent);
        // chi * w * tail
        let mut rhs = w_zero(nm, lm);
        for i in 0..nm {
            rhs[i + 1] = tail[i].iter().map(|p| p.scaled(&Rational::from(chi))).collect();
        }
        let residual: Vec<Poly> = lhs[n].iter().zip(&rhs[n]).map(|(x, y)| x.sub(y)).collect();
        eps[n] = series_mul(&residual, &linear_inv, lm).iter().map(|p| p.scaled(&Rational::from(-1))).collect();
    }

    let mut sectors = BTreeMap::new();
    let perturbative: BTreeMap<(u32, u32), GammaRational> =
        e0.iter().enumerate().map(|(l, c)| ((0, l as u32), GammaRational::rational(c.clone()))).collect();
    sectors.insert(0, perturbative);
    for (n, row) in eps.iter().enumerate().skip(1) {
        let mut sector = BTreeMap::new();
        for (l, p) in row.iter().enumerate() {
            let by_power = p.lambda_coefficients()?;
            if let Some(&k) = by_power.keys().find(|&&k| k as usize >= n) {
                return Err(Error::Numerical(format!("sector {n} produced a power λ^{k} beyond n - 1")));
            }
            for k in 0..n as u32 {
                let v = by_power.get(&k).cloned().unwrap_or_default();
                sector.insert((k, l as u32), v);
            }
        }
        sectors.insert(n as u32, sector);
    }
    Ok(TransSeries { level, parity, max_l: l_max, sectors })
}

/// Epsilon coefficients of both parities of level `N` for the double well.
pub fn derive_epsilon_table(level: u32, n_max: u32, l_max: u32) -> Result<EpsilonTable> {
    let d = Bivariate::double_well_d();
    let a = Bivariate::double_well_a_regular();
    let mut table = EpsilonTable::new();
    for parity in [Parity::Plus, Parity::Minus] {
        let series = expand_quantization(&d, &a, level, parity, n_max, l_max)?;
        for (key, value) in series.epsilon_entries() {
            table.insert(key, value);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;
    use rug::ops::Pow;
    use rug::Float;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn eval(p: &Poly, bits: u32) -> Float {
        let gamma = Float::with_val(bits, Constant::Euler);
        let zeta2 = Float::with_val(bits, 2u32).zeta();
        let zeta3 = Float::with_val(bits, 3u32).zeta();
        let mut s = Float::new(bits);
        for (m, v) in &p.terms {
            assert_eq!(m[0], 0);
            s += Float::with_val(bits, v) * gamma.clone().pow(m[1]) * zeta2.clone().pow(m[2]) * zeta3.clone().pow(m[3]);
        }
        s
    }

    #[test]
    fn gamma_at_zero() {
        let s = gamma_pole_expansion(0, 0).unwrap();
        assert_eq!(*s.residue(), Poly::constant(-1));
        assert_eq!(*s.coeff(0), Poly::symbol(Symbol::Gamma).scaled(&q(-1, 1)));
    }

    #[test]
    fn gamma_at_minus_one() {
        let s = gamma_pole_expansion(1, 0).unwrap();
        assert_eq!(*s.residue(), Poly::constant(1));
        assert_eq!(*s.coeff(0), Poly::symbol(Symbol::Gamma).sub(&Poly::constant(1)));
    }

    #[test]
    fn laurent_matches_high_precision_gamma() {
        let bits = 1000;
        for level in 0..4u32 {
            let s = gamma_pole_expansion(level, 2).unwrap();
            for delta_exp in [-30i32, -10] {
                let delta = Float::with_val(bits, 10u32).pow(delta_exp);
                let exact = Float::with_val(bits, -Float::with_val(bits, level) - &delta).gamma();
                let mut approx = Float::new(bits);
                for m in -1..=2 {
                    approx += eval(s.coeff(m), bits) * Float::with_val(bits, delta.clone().pow(m));
                }
                let rel = Float::with_val(bits, (exact.clone() - &approx) / &exact).abs();
                // truncation error is O(delta^4) relative to the pole term
                let bound = Float::with_val(bits, delta.clone().pow(4u32)) * 100u32;
                assert!(rel < bound, "N {level} delta 1e{delta_exp}: rel {}", rel.to_f64());
            }
        }
    }

    #[test]
    fn laurent_order_is_limited() {
        assert!(gamma_pole_expansion(0, 3).is_err());
    }

    #[test]
    fn reproduces_the_tabulated_coefficients() {
        let derived = derive_epsilon_table(0, 2, 2).unwrap();
        assert_eq!(derived, EpsilonTable::ground_doublet());
        assert_eq!(derived.to_json(), EpsilonTable::ground_doublet().to_json());
    }

    #[test]
    fn selected_coefficients() {
        let d = Bivariate::double_well_d();
        let a = Bivariate::double_well_a_regular();
        let s = expand_quantization(&d, &a, 0, Parity::Plus, 2, 2).unwrap();
        assert_eq!(*s.get(1, 0, 0).unwrap(), GammaRational::rational(-1));
        assert_eq!(*s.get(2, 0, 0).unwrap(), GammaRational::gamma());
        assert_eq!(*s.get(2, 1, 1).unwrap(), GammaRational::rational(q(-53, 6)));
        assert_eq!(*s.get(2, 0, 2).unwrap(), GammaRational::new(q(13, 12), q(-1277, 72)));
    }

    #[test]
    fn perturbative_sector_matches_inversion() {
        let d = Bivariate::double_well_d();
        let a = Bivariate::double_well_a_regular();
        for level in 0..3 {
            let s = expand_quantization(&d, &a, level, Parity::Minus, 1, 2).unwrap();
            let e0 = invert_d_series(&d, level, 2).unwrap();
            for l in 0..=2u32 {
                assert_eq!(s.get(0, 0, l).unwrap().r0, *e0.coeff(l as usize));
            }
        }
    }

    #[test]
    fn parity_relation_emerges() {
        for level in 0..3 {
            assert!(derive_epsilon_table(level, 2, 2).unwrap().parity_relation_holds());
        }
    }

    #[test]
    fn first_excited_doublet() {
        let table = derive_epsilon_table(1, 2, 2).unwrap();
        let key = |n, k, l| EpsilonKey { level: 1, parity: Parity::Plus, n, k, l };
        assert_eq!(*table.get(&key(1, 0, 0)).unwrap(), GammaRational::rational(-1));
        assert_eq!(*table.get(&key(1, 0, 1)).unwrap(), GammaRational::rational(q(347, 12)));
        assert_eq!(*table.get(&key(1, 0, 2)).unwrap(), GammaRational::rational(q(-5317, 288)));
        assert_eq!(*table.get(&key(2, 0, 0)).unwrap(), GammaRational::new(-1, 1));
        assert_eq!(*table.get(&key(2, 0, 1)).unwrap(), GammaRational::new(q(61, 3), q(-293, 6)));
        assert_eq!(*table.get(&key(2, 1, 2)).unwrap(), GammaRational::rational(q(39823, 72)));
    }

    #[test]
    fn truncation_limits_are_reported() {
        let d = Bivariate::double_well_d();
        let a = Bivariate::double_well_a_regular();
        assert!(matches!(expand_quantization(&d, &a, 0, Parity::Plus, 2, 3), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(expand_quantization(&d, &a, 0, Parity::Plus, 3, 2), Err(Error::UnsupportedOrder { .. })));
        let short_a = Bivariate::new(vec![vec![], vec![q(19, 12), q(0, 1), q(17, 1)]], 1);
        assert!(expand_quantization(&d, &short_a, 0, Parity::Plus, 2, 2).is_err());
        assert!(expand_quantization(&d, &short_a, 0, Parity::Plus, 2, 1).is_ok());
    }

    #[test]
    fn poly_display() {
        let p = Poly::constant(q(13, 12)).sub(&Poly::symbol(Symbol::Gamma).scaled(&q(1277, 72))).add(&Poly::symbol(Symbol::Lambda));
        assert_eq!(p.to_string(), "13/12 - 1277/72 γ + λ");
    }
}
