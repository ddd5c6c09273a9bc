//! Lateral Borel–Padé summation of non-alternating divergent series.
//!
//! The transform divides the `K`-th coefficient by `K!`; the summed value is
//! `(1/g) * integral of exp(-t/g) B(t) dt` along a ray `arg t = +theta`
//! (side [`Side::Above`]) or `-theta` ([`Side::Below`]). `B` is continued
//! beyond its disc of convergence by diagonal Padé approximants.

use std::fmt;
use std::sync::OnceLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_series::RationalSeries;
use crate::linalg::solve_augmented;
use crate::precision::{bits_for_digits, to_sci, Coupling, Estimate};
use crate::quadrature::gauss_legendre;

/// Which side of the positive real axis the Laplace ray passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Above,
    Below,
}

impl Side {
    pub fn sign(self) -> i32 {
        match self {
            Side::Above => 1,
            Side::Below => -1,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Above => "above",
            Side::Below => "below",
        })
    }
}

/// Location of the nearest Borel-plane singularity, from coefficient ratios.
#[derive(Clone, Debug)]
pub struct Singularity {
    pub distance: Float,
    pub on_positive_axis: bool,
}

#[derive(Clone, Debug)]
pub struct BorelTransform {
    coefficients: Vec<Rational>,
    singularity: Option<Singularity>,
}

impl BorelTransform {
    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn singularity(&self) -> Option<&Singularity> {
        self.singularity.as_ref()
    }
}

/// `b_K = c_K / K!`. The singularity estimate is `|b_{K-1} / b_K|` at the
/// highest available pair with nonzero entries.
pub fn borel_transform(series: &RationalSeries) -> BorelTransform {
    let mut factorial = Integer::from(1);
    let mut coefficients = Vec::with_capacity(series.order() + 1);
    for (k, c) in series.coeffs().iter().enumerate() {
        if k > 0 {
            factorial *= k as u32;
        }
        coefficients.push(Rational::from(c / Rational::from(&factorial)));
    }
    let singularity = (1..coefficients.len()).rev().find_map(|k| {
        let (prev, last) = (&coefficients[k - 1], &coefficients[k]);
        if *prev == 0 || *last == 0 {
            return None;
        }
        let ratio = Rational::from(prev / last);
        Some(Singularity {
            on_positive_axis: ratio > 0,
            distance: Float::with_val(128, ratio.abs()),
        })
    });
    BorelTransform { coefficients, singularity }
}

/// `P(t) / Q(t)` with `Q(0) = 1`, stored in the variable `u = t / scale`.
#[derive(Debug)]
pub struct Pade {
    numer: Vec<Float>,
    denom: Vec<Float>,
    scale: Float,
    requested: (usize, usize),
    bits: u32,
    coeff_bits: u32,
    poles: OnceLock<Vec<Complex>>,
}

impl Clone for Pade {
    fn clone(&self) -> Self {
        Self {
            numer: self.numer.clone(),
            denom: self.denom.clone(),
            scale: self.scale.clone(),
            requested: self.requested,
            bits: self.bits,
            coeff_bits: self.coeff_bits,
            poles: OnceLock::new(),
        }
    }
}

impl Pade {
    /// Degrees `(L, M)` actually achieved.
    pub fn order(&self) -> (usize, usize) {
        (self.numer.len() - 1, self.denom.len() - 1)
    }

    pub fn requested_order(&self) -> (usize, usize) {
        self.requested
    }

    pub fn was_reduced(&self) -> bool {
        self.order() != self.requested
    }

    pub fn precision(&self) -> u32 {
        self.bits
    }

    /// Numerator coefficients in powers of `t`.
    pub fn numerator_in_t(&self) -> Vec<Float> {
        unscale(&self.numer, &self.scale)
    }

    /// Denominator coefficients in powers of `t`, constant term 1.
    pub fn denominator_in_t(&self) -> Vec<Float> {
        unscale(&self.denom, &self.scale)
    }

    /// Horner evaluation cancels about `degree * log2|u|` bits away from the
    /// unit disc, so the evaluation precision grows with `|u|`.
    fn eval_bits(&self, log2_u: i32) -> u32 {
        let degree = self.numer.len().max(self.denom.len()) as u32;
        let extra = degree * log2_u.max(0) as u32;
        (self.bits + extra + 16).min(self.coeff_bits)
    }

    pub fn eval(&self, t: &Complex) -> Complex {
        let log2_u = Float::with_val(64, t.abs_ref()).get_exp().unwrap_or(0) - self.scale.get_exp().unwrap_or(0) + 1;
        let prec = self.eval_bits(log2_u);
        let u = Complex::with_val(prec, t / &self.scale);
        let p = horner(&self.numer, &u);
        let q = horner(&self.denom, &u);
        Complex::with_val(self.bits, p / q)
    }

    pub fn eval_real(&self, t: &Float) -> Float {
        let log2_u = t.get_exp().unwrap_or(0) - self.scale.get_exp().unwrap_or(0) + 1;
        let prec = self.eval_bits(log2_u);
        let u = Float::with_val(prec, t / &self.scale);
        let mut p = Float::new(prec);
        for c in self.numer.iter().rev() {
            p = p * &u + c;
        }
        let mut q = Float::new(prec);
        for c in self.denom.iter().rev() {
            q = q * &u + c;
        }
        Float::with_val(self.bits, p / q)
    }

    /// Zeros of the denominator in the `t` plane (Aberth–Ehrlich iteration).
    pub fn poles(&self) -> &[Complex] {
        self.poles.get_or_init(|| {
            let roots = polynomial_roots(&self.denom, self.bits);
            roots.into_iter().map(|r| Complex::with_val(self.bits, r * &self.scale)).collect()
        })
    }

    /// Residue of the approximant at a pole in the `t` plane.
    pub fn residue(&self, pole: &Complex) -> Complex {
        let u = Complex::with_val(self.coeff_bits, pole / &self.scale);
        let deriv: Vec<Float> =
            self.denom.iter().enumerate().skip(1).map(|(i, c)| Float::with_val(self.coeff_bits, c * i as u32)).collect();
        let p = horner(&self.numer, &u);
        let dq = horner(&deriv, &u);
        Complex::with_val(self.bits, p / dq) * &self.scale
    }

    /// Poles that are real up to working-precision noise.
    pub fn real_poles(&self) -> Vec<Float> {
        let tol_exp = -(self.bits as i32) / 4;
        self.poles()
            .iter()
            .filter(|p| {
                let im = p.imag().clone().abs();
                let mag = Float::with_val(self.bits, p.abs_ref());
                im.is_zero() || im.get_exp().unwrap_or(i32::MIN) < mag.get_exp().unwrap_or(0) + tol_exp
            })
            .map(|p| p.real().clone())
            .collect()
    }
}

fn unscale(coeffs: &[Float], scale: &Float) -> Vec<Float> {
    let prec = scale.prec();
    let mut factor = Float::with_val(prec, 1);
    coeffs
        .iter()
        .map(|c| {
            let v = Float::with_val(prec, c / &factor);
            factor *= scale;
            v
        })
        .collect()
}

fn horner(coeffs: &[Float], z: &Complex) -> Complex {
    let mut acc = Complex::new(z.prec());
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

/// Precision used for the Padé linear solve: Hankel systems lose digits
/// roughly in proportion to their size.
pub fn pade_solve_bits(l: usize, m: usize, digits: u32) -> u32 {
    bits_for_digits(digits + 20) + 12 * (l + m) as u32
}

/// `[L/M]` Padé approximant of the transform, evaluated with `digits`
/// significant digits. Coefficients enter exactly; the solve runs in
/// floating point at [`pade_solve_bits`]. A singular system reduces both
/// degrees by one until it becomes regular.
pub fn pade_approximant(transform: &BorelTransform, l: usize, m: usize, digits: u32) -> Result<Pade> {
    let available = transform.coefficients.len();
    if l + m + 1 > available {
        return Err(Error::InsufficientData { needed: l + m + 1, have: available });
    }
    let bits = bits_for_digits(digits + 20);
    let solve_bits = pade_solve_bits(l, m, digits);
    // Power-of-two rescaling keeps the Hankel entries of order one.
    let scale_exp = match &transform.singularity {
        Some(s) if !s.distance.is_zero() => s.distance.to_f64().log2().round() as i32,
        _ => 0,
    };
    let scale = Float::with_val(solve_bits, Float::i_exp(1, scale_exp));
    let mut factor = Float::with_val(solve_bits, 1);
    let b: Vec<Float> = transform.coefficients[..l + m + 1]
        .iter()
        .map(|c| {
            let v = Float::with_val(solve_bits, c) * &factor;
            factor *= &scale;
            v
        })
        .collect();

    let (mut l_cur, mut m_cur) = (l, m);
    loop {
        if let Some(denom) = pade_denominator(&b, l_cur, m_cur, solve_bits) {
            let numer: Vec<Float> = (0..=l_cur)
                .map(|i| {
                    let mut s = Float::new(solve_bits);
                    for (j, q) in denom.iter().enumerate().take(i.min(m_cur) + 1) {
                        s += Float::with_val(solve_bits, q * &b[i - j]);
                    }
                    s
                })
                .collect();
            return Ok(Pade {
                numer,
                denom,
                scale,
                requested: (l, m),
                bits,
                coeff_bits: solve_bits,
                poles: OnceLock::new(),
            });
        }
        if l_cur == 0 || m_cur == 0 {
            return Err(Error::Numerical(format!("Padé system singular for every order up to [{l}/{m}]")));
        }
        l_cur -= 1;
        m_cur -= 1;
    }
}

/// Solves `sum_{j=0}^{M} q_j b_{L+i-j} = 0`, `i = 1..M`, with `q_0 = 1`.
fn pade_denominator(b: &[Float], l: usize, m: usize, bits: u32) -> Option<Vec<Float>> {
    if m == 0 {
        return Some(vec![Float::with_val(bits, 1)]);
    }
    let entry = |idx: i64| if idx >= 0 { b[idx as usize].clone() } else { Float::new(bits) };
    let mut a: Vec<Vec<Float>> = (1..=m)
        .map(|i| {
            let mut row: Vec<Float> = (1..=m).map(|j| entry(l as i64 + i as i64 - j as i64)).collect();
            row.push(-entry((l + i) as i64));
            row
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r[..m].iter())
        .map(|x| x.clone().abs())
        .fold(Float::new(bits), |acc, x| if x > acc { x } else { acc });
    if scale.is_zero() {
        return None;
    }
    let threshold = Float::with_val(bits, &scale) >> (bits / 2);
    let q_tail = solve_augmented(&mut a, m, &threshold)?;
    let mut q = Vec::with_capacity(m + 1);
    q.push(Float::with_val(bits, 1));
    q.extend(q_tail);
    Some(q)
}

/// All complex roots of `sum_i c_i z^i` by Aberth–Ehrlich iteration.
fn polynomial_roots(coeffs: &[Float], bits: u32) -> Vec<Complex> {
    let mut c: Vec<Float> = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let work = bits + 32;
    let lead = Float::with_val(work, &c[n]);
    let monic: Vec<Float> = c.iter().map(|x| Float::with_val(work, x / &lead)).collect();
    let deriv: Vec<Float> = (1..=n).map(|i| Float::with_val(work, &monic[i] * i as u32)).collect();

    // Cauchy-type radius for the starting circle.
    let radius = monic[..n]
        .iter()
        .map(|x| x.to_f64().abs())
        .fold(0.0f64, f64::max)
        .max(1e-300)
        .powf(1.0 / n as f64)
        .max(1e-3);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex::with_val(work, (radius * angle.cos(), radius * angle.sin()))
        })
        .collect();

    // Pole locations only steer the ray, so half the working precision is plenty.
    let tol_exp = -(bits as i32) / 2;
    let mut done = vec![false; n];
    for _ in 0..500 {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let p = horner(&monic, &z[i]);
            if p.real().is_zero() && p.imag().is_zero() {
                done[i] = true;
                continue;
            }
            let dp = horner(&deriv, &z[i]);
            let ratio = Complex::with_val(work, &p / &dp);
            let mut sum = Complex::new(work);
            for j in 0..n {
                if j != i {
                    let diff = Complex::with_val(work, &z[i] - &z[j]);
                    sum += diff.recip();
                }
            }
            let denom = Complex::with_val(work, 1) - Complex::with_val(work, &ratio * &sum);
            let step = ratio / denom;
            let step_exp = Float::with_val(64, step.abs_ref()).get_exp().unwrap_or(i32::MIN);
            let z_exp = Float::with_val(64, z[i].abs_ref()).get_exp().unwrap_or(0);
            z[i] -= step;
            if step_exp < z_exp + tol_exp {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    z.into_iter().map(|r| Complex::with_val(bits, r)).collect()
}

/// One lateral Laplace integral with its diagnostics.
#[derive(Clone, Debug)]
pub struct LateralSum {
    pub value: Complex,
    pub side: Side,
    pub g: Coupling,
    pub pade_order: (usize, usize),
    pub angle: Float,
    pub nodes: usize,
    /// Heuristic: difference between the last two quadrature refinements.
    pub error: Float,
    pub digits: u32,
}

#[derive(Serialize)]
struct LateralJson<'a> {
    schema: &'static str,
    g: String,
    side: Side,
    real: String,
    imag: String,
    pade_order: [usize; 2],
    angle: String,
    nodes: usize,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

impl LateralSum {
    pub fn to_json(&self) -> String {
        let json = LateralJson {
            schema: "dwell.lateral/1",
            g: self.g.to_string(),
            side: self.side,
            real: to_sci(self.value.real(), self.digits),
            imag: to_sci(self.value.imag(), self.digits),
            pade_order: [self.pade_order.0, self.pade_order.1],
            angle: to_sci(&self.angle, 12),
            nodes: self.nodes,
            error: to_sci(&self.error, 6),
            note: Some("error is a heuristic estimate, not a bound"),
        };
        serde_json::to_string_pretty(&json).expect("lateral sum serializes")
    }
}

const GL_NODES: usize = 32;
const MIN_ANGLE_DIVISOR: u32 = 64;
const MIN_POLE_SEPARATION: f64 = 0.02;

/// `(1/g) * integral_0^{inf e^{±i theta}} exp(-t/g) pade(t) dt`.
///
/// The ray starts at `theta = pi/4`. If a pole with a visible residue term
/// lies within 0.02 rad of the ray, the angle steps toward the axis in
/// multiples of `pi/64`; if none of those is clear the call fails.
pub fn lateral_laplace(pade: &Pade, g: &Coupling, side: Side, digits: u32) -> Result<LateralSum> {
    let bits = bits_for_digits(digits + 20);
    let theta = choose_angle(pade, g, side, digits, bits)?;
    let signed = Float::with_val(bits, &theta * side.sign());

    let cos = Float::with_val(bits, theta.cos_ref());
    let tan = Float::with_val(bits, theta.tan_ref());
    let direction = Complex::with_val(bits, (Float::with_val(bits, signed.cos_ref()), Float::with_val(bits, signed.sin_ref())));
    let gf = g.to_float(bits);
    // t = step * v along the ray, with |exp(-t/g)| = exp(-v).
    let step = Complex::with_val(bits, &direction * Float::with_val(bits, &gf / &cos));
    let decay = Complex::with_val(bits, (Float::with_val(bits, -1), Float::with_val(bits, &tan * -side.sign())));

    // Truncation of the v-range: exp(-V) below the target plus headroom for
    // the size of the approximant along the ray.
    let v_max = (f64::from(digits) + 25.0) * std::f64::consts::LN_10 + 10.0;
    let rule = gauss_legendre(GL_NODES, bits);
    let tol = Float::with_val(bits, Float::i_exp(1, -((f64::from(digits) + 2.0) * std::f64::consts::LOG2_10) as i32));

    let ray = Ray { pade, rule: &rule, step: &step, decay: &decay, bits };
    let (integral, diff, evaluations) = ray.adaptive(v_max, &tol)?;
    let value = Complex::with_val(bits, &integral * &direction) / &cos;
    let error = Float::with_val(bits, &diff / &cos);
    Ok(LateralSum { value, side, g: g.clone(), pade_order: pade.order(), angle: signed, nodes: evaluations, error, digits })
}

struct Ray<'a> {
    pade: &'a Pade,
    rule: &'a [(Float, Float)],
    step: &'a Complex,
    decay: &'a Complex,
    bits: u32,
}

const INITIAL_PANELS: u32 = 16;
const MAX_DEPTH: u32 = 40;

impl Ray<'_> {
    fn panel(&self, a: &Float, b: &Float) -> Complex {
        let bits = self.bits;
        let half = Float::with_val(bits, b - a) / 2u32;
        let mid = Float::with_val(bits, a + b) / 2u32;
        let mut total = Complex::new(bits);
        for (x, w) in self.rule {
            let v = Float::with_val(bits, x * &half) + &mid;
            let t = Complex::with_val(bits, self.step * &v);
            let kernel = Complex::with_val(bits, self.decay * &v).exp();
            let f = self.pade.eval(&t);
            total += Complex::with_val(bits, &kernel * &f) * Float::with_val(bits, w * &half);
        }
        total
    }

    /// Bisects each panel until the two halves agree with the whole to
    /// within the panel's share of `tol`. Returns the integral, the summed
    /// refinement changes and the number of integrand evaluations.
    fn adaptive(&self, v_max: f64, tol: &Float) -> Result<(Complex, Float, usize)> {
        let bits = self.bits;
        let length = Float::with_val(bits, v_max);
        let width = Float::with_val(bits, &length / INITIAL_PANELS);
        let mut stack: Vec<(Float, Float, Complex, u32)> = (0..INITIAL_PANELS)
            .map(|k| {
                let a = Float::with_val(bits, &width * k);
                let b = Float::with_val(bits, &width * (k + 1));
                let whole = self.panel(&a, &b);
                (a, b, whole, 0)
            })
            .collect();
        let mut evaluations = INITIAL_PANELS as usize * self.rule.len();
        let mut total = Complex::new(bits);
        let mut change = Float::new(bits);
        while let Some((a, b, whole, depth)) = stack.pop() {
            let mid = Float::with_val(bits, &a + &b) / 2u32;
            let left = self.panel(&a, &mid);
            let right = self.panel(&mid, &b);
            evaluations += 2 * self.rule.len();
            let refined = Complex::with_val(bits, &left + &right);
            let diff = Float::with_val(bits, Complex::with_val(bits, &refined - &whole).abs_ref());
            let share = Float::with_val(bits, tol * Float::with_val(bits, &b - &a)) / &length;
            if diff <= share {
                total += refined;
                change += diff;
            } else if depth >= MAX_DEPTH {
                return Err(Error::Numerical(format!(
                    "lateral Laplace integral did not converge on [{}, {}]: change {}",
                    to_sci(&a, 6),
                    to_sci(&b, 6),
                    to_sci(&diff, 3)
                )));
            } else {
                stack.push((a, mid.clone(), left, depth + 1));
                stack.push((mid, b, right, depth + 1));
            }
        }
        Ok((total, change, evaluations))
    }
}

fn choose_angle(pade: &Pade, g: &Coupling, side: Side, digits: u32, bits: u32) -> Result<Float> {
    let gf = g.to_float(64).to_f64();
    let cutoff = (f64::from(digits) + 20.0) * std::f64::consts::LN_10;
    // Arguments (on the chosen side) of poles whose residue term
    // 2 pi |Res exp(-p/g)| / g is visible at the target digits.
    let mut significant: Vec<f64> = Vec::new();
    for p in pade.poles() {
        let (re, im) = (p.real().to_f64(), p.imag().to_f64() * f64::from(side.sign()));
        if im <= 0.0 || re <= 0.0 {
            continue;
        }
        let residue = Float::with_val(64, pade.residue(p).abs_ref()).to_f64();
        let log_weight = residue.ln() + (2.0 * std::f64::consts::PI / gf).ln() - re / gf;
        if log_weight > -cutoff {
            significant.push(im.atan2(re));
        }
    }
    let quarter = std::f64::consts::FRAC_PI_4;
    let step = std::f64::consts::PI / f64::from(MIN_ANGLE_DIVISOR);
    let candidates = std::iter::once(quarter).chain((1..16).map(|k| quarter - f64::from(k) * step));
    for theta in candidates {
        if significant.iter().all(|arg| (arg - theta).abs() > MIN_POLE_SEPARATION) {
            let pi = Float::with_val(bits, Constant::Pi);
            // Exact multiples of pi/64 keep the angle reproducible at any precision.
            let k = ((quarter - theta) / step).round() as u32;
            return Ok(Float::with_val(bits, &pi / 4u32) - Float::with_val(bits, &pi * k) / MIN_ANGLE_DIVISOR);
        }
    }
    Err(Error::Numerical(format!(
        "no ray between pi/64 and pi/4 on side {side} keeps {MIN_POLE_SEPARATION} rad from the significant Padé poles at arguments {significant:?}"
    )))
}

/// Real part of the lateral Borel sum with a heuristic error estimate.
#[derive(Clone, Debug)]
pub struct BorelSum {
    pub value: Float,
    pub error: Float,
    pub above: LateralSum,
    pub below: LateralSum,
    pub comparison_order: (usize, usize),
}

#[derive(Serialize)]
struct BorelSumJson {
    schema: &'static str,
    g: String,
    value: String,
    error: String,
    pade_order: [usize; 2],
    comparison_order: [usize; 2],
    imag_above: String,
    note: &'static str,
}

impl BorelSum {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value.clone(), self.error.clone())
    }

    pub fn to_json(&self) -> String {
        let json = BorelSumJson {
            schema: "dwell.borel/1",
            g: self.above.g.to_string(),
            value: to_sci(&self.value, self.above.digits),
            error: to_sci(&self.error, 6),
            pade_order: [self.above.pade_order.0, self.above.pade_order.1],
            comparison_order: [self.comparison_order.0, self.comparison_order.1],
            imag_above: to_sci(self.above.value.imag(), 12),
            note: "error is a heuristic estimate, not a bound",
        };
        serde_json::to_string_pretty(&json).expect("borel sum serializes")
    }
}

/// Default diagonal order for `n` available coefficients: `floor((n-1)/2)`,
/// capped at 80.
pub fn default_pade_degree(available: usize) -> usize {
    (available.saturating_sub(1) / 2).min(80)
}

/// Mean of the two lateral sums. The error estimate is the largest of the
/// quadrature refinement change, the change against a Padé order ten
/// lower, and the mismatch between the two real parts.
pub fn real_borel_sum(series: &RationalSeries, g: &Coupling, digits: u32) -> Result<BorelSum> {
    let transform = borel_transform(series);
    let degree = default_pade_degree(transform.coefficients.len());
    real_borel_sum_with_order(&transform, degree, degree.saturating_sub(10), g, digits)
}

pub fn real_borel_sum_with_order(
    transform: &BorelTransform,
    degree: usize,
    comparison_degree: usize,
    g: &Coupling,
    digits: u32,
) -> Result<BorelSum> {
    let bits = bits_for_digits(digits + 20);
    let pade = pade_approximant(transform, degree, degree, digits)?;
    let above = lateral_laplace(&pade, g, Side::Above, digits)?;
    let below = lateral_laplace(&pade, g, Side::Below, digits)?;
    let mean = Float::with_val(bits, above.value.real() + below.value.real()) / 2u32;
    let mut error = above.error.clone().max(&below.error);
    let mismatch = Float::with_val(bits, above.value.real() - below.value.real()).abs();
    error = error.max(&mismatch);

    let comparison_order = if comparison_degree < degree {
        let coarse = pade_approximant(transform, comparison_degree, comparison_degree, digits)?;
        let coarse_above = lateral_laplace(&coarse, g, Side::Above, digits)?;
        let change = Float::with_val(bits, coarse_above.value.real() - above.value.real()).abs();
        error = error.max(&change).max(&coarse_above.error);
        coarse.order()
    } else {
        pade.order()
    };
    Ok(BorelSum { value: mean, error, above, below, comparison_order })
}

/// Sum of `c_K g^K` for a finite list, used as the reference for convergent input.
pub fn direct_sum(series: &RationalSeries, g: &Coupling) -> Rational {
    let mut acc = Rational::new();
    let mut power = Rational::from(1);
    for c in series.coeffs() {
        acc += Rational::from(c * &power);
        power *= g.rational();
    }
    acc
}

/// `K! * x^K` as an exact rational, a convenience for building test series.
pub fn factorial_times_power(k: u32, x: &Rational) -> Rational {
    Rational::from(Integer::factorial(k)) * Rational::from(x.clone().pow(k as i32))
}
