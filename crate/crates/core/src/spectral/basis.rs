//! Rayleigh–Ritz in oscillator eigenfunctions centred at both wells.
//!
//! With `phi_n^R`, `phi_n^L` the unit-frequency Hermite functions at
//! `y = +a` and `y = -a`, the reflection maps `phi_n^R` to `(-1)^n phi_n^L`,
//! so `chi_n = phi_n^R ± (-1)^n phi_n^L` spans one parity block. Around the
//! right well the Hamiltonian reads `-(1/2) d^2/dz^2 + z^2/2 + sqrt(g) z^3
//! + (g/2) z^4`; the left well flips the cubic term. Matrix elements follow
//! exactly from ladder operators and the displacement overlaps
//! `<phi_m^R | phi_j^L>`.

use rug::Float;

use crate::error::{Error, Result};
use crate::instanton::Parity;
use crate::linalg::{dot, is_positive_definite, negative_inertia, solve, Matrix};
use crate::precision::{to_sci, Coupling};

use super::{Method, Potential, SolverConfig, SpectralResult};

/// Coefficients of `(h0 + s z^3 + c z^4) phi_n` in the same oscillator
/// basis, as `(index, value)` pairs.
fn ladder_column(n: usize, cubic: &Float, quartic: &Float, roots: &[Float], bits: u32) -> Vec<(usize, Float)> {
    let width = 9;
    let lo = n.saturating_sub(4);
    // Dense window over indices lo .. lo + width.
    let apply_z = |v: &[Float]| -> Vec<Float> {
        let mut out = vec![Float::new(bits); width];
        for (offset, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = lo + offset;
            // z |k> = (sqrt(k) |k-1> + sqrt(k+1) |k+1>) / sqrt(2)
            if k > 0 && offset > 0 {
                out[offset - 1] += Float::with_val(bits, c * &roots[k]);
            }
            if offset + 1 < width {
                out[offset + 1] += Float::with_val(bits, c * &roots[k + 1]);
            }
        }
        let half = Float::with_val(bits, 2).sqrt().recip();
        out.into_iter().map(|x| x * &half).collect()
    };
    let mut v = vec![Float::new(bits); width];
    v[n - lo] = Float::with_val(bits, 1);
    let z1 = apply_z(&v);
    let z2 = apply_z(&z1);
    let z3 = apply_z(&z2);
    let z4 = apply_z(&z3);
    let mut out = Vec::with_capacity(width);
    for offset in 0..width {
        let mut c = Float::with_val(bits, &z3[offset] * cubic) + Float::with_val(bits, &z4[offset] * quartic);
        if lo + offset == n {
            c += Float::with_val(bits, n as u32) + 0.5f64;
        }
        if !c.is_zero() {
            out.push((lo + offset, c));
        }
    }
    out
}

/// `O[m][j] = <phi_m(. - d) | phi_j>` for `m < rows`, `j < cols`.
fn displacement_overlaps(d: &Float, rows: usize, cols: usize, roots: &[Float], bits: u32) -> Vec<Vec<Float>> {
    let mut o = vec![vec![Float::new(bits); cols]; rows];
    let scaled = Float::with_val(bits, d / Float::with_val(bits, 2).sqrt());
    let mut first = Float::with_val(bits, -Float::with_val(bits, d.square_ref()) / 4u32).exp();
    for j in 0..cols {
        o[0][j] = first.clone();
        // (d/sqrt 2)^{j+1} / sqrt((j+1)!)
        first = first * &scaled / &roots[j + 1];
    }
    let sqrt2 = Float::with_val(bits, 2).sqrt();
    for m in 0..rows.saturating_sub(1) {
        let denom = Float::with_val(bits, &sqrt2 * &roots[m + 1]);
        for j in 0..cols {
            // O_{m+1,j} = (sqrt(2j) O_{m,j-1} - d O_{m,j}) / sqrt(2(m+1))
            let mut v = Float::with_val(bits, -Float::with_val(bits, d * &o[m][j]));
            if j > 0 {
                v += Float::with_val(bits, &sqrt2 * &roots[j]) * &o[m][j - 1];
            }
            o[m + 1][j] = v / &denom;
        }
    }
    o
}

/// Hamiltonian and overlap of one parity block.
struct Block {
    h: Matrix,
    s: Matrix,
}

fn roots_table(len: usize, bits: u32) -> Vec<Float> {
    (0..len).map(|k| Float::with_val(bits, k as u32).sqrt()).collect()
}

fn double_well_block(g: &Coupling, parity: Parity, size: usize, bits: u32) -> Block {
    let roots = roots_table(size + 8, bits);
    let gf = g.to_float(bits);
    let root_g = Float::with_val(bits, gf.sqrt_ref());
    let quartic = Float::with_val(bits, &gf / 2u32);
    let neg_root_g = Float::with_val(bits, -&root_g);
    let d = Float::with_val(bits, root_g.recip_ref());
    let overlaps = displacement_overlaps(&d, size, size + 5, &roots, bits);
    let p = parity.sign();
    let mut h = Matrix::zeros(size, bits);
    let mut s = Matrix::zeros(size, bits);
    for n in 0..size {
        let sign = if n % 2 == 0 { p } else { -p };
        let right = ladder_column(n, &root_g, &quartic, &roots, bits);
        let left = ladder_column(n, &neg_root_g, &quartic, &roots, bits);
        for m in 0..size {
            let mut cross = Float::new(bits);
            for (j, c) in &left {
                cross += Float::with_val(bits, c * &overlaps[m][*j]);
            }
            let mut h_mn = cross * sign;
            if let Some((_, c)) = right.iter().find(|(j, _)| *j == m) {
                h_mn += c;
            }
            h.set(m, n, h_mn);
            let mut s_mn = Float::with_val(bits, &overlaps[m][n] * sign);
            if m == n {
                s_mn += 1u32;
            }
            s.set(m, n, s_mn);
        }
    }
    symmetrize(&mut h);
    symmetrize(&mut s);
    Block { h, s }
}

fn harmonic_block(parity: Parity, size: usize, bits: u32) -> Block {
    let mut h = Matrix::zeros(size, bits);
    let mut s = Matrix::zeros(size, bits);
    let first = if parity == Parity::Plus { 0 } else { 1 };
    for i in 0..size {
        let n = first + 2 * i;
        h.set(i, i, Float::with_val(bits, n as u32) + 0.5f64);
        s.set(i, i, Float::with_val(bits, 1));
    }
    Block { h, s }
}

fn symmetrize(a: &mut Matrix) {
    let n = a.dim();
    for i in 0..n {
        for j in i + 1..n {
            let avg = Float::with_val(a.get(i, j).prec(), a.get(i, j) + a.get(j, i)) / 2u32;
            a.set(i, j, avg.clone());
            a.set(j, i, avg);
        }
    }
}

fn count_below(block: &Block, sigma: &Float) -> usize {
    negative_inertia(&block.h.shifted(sigma, &block.s))
}

fn bisect(block: &Block, level: u32, bits: u32) -> Result<Float> {
    let target = level as usize;
    let mut lo = Float::new(bits);
    while count_below(block, &lo) > target {
        lo -= 1u32;
    }
    let mut hi = Float::with_val(bits, 2 * level + 2);
    let mut steps = 0;
    while count_below(block, &hi) <= target {
        hi *= 2u32;
        steps += 1;
        if steps > 60 {
            return Err(Error::Numerical(format!("basis block has no eigenvalue with index {level}")));
        }
    }
    for _ in 0..50 {
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        if count_below(block, &mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(bits, &lo + &hi) / 2u32)
}

/// Rayleigh-quotient iteration from `sigma` and starting vector `x`.
/// Stops at convergence or once rounding noise stops the updates from
/// shrinking; the last update is returned as the noise level.
fn rayleigh(block: &Block, mut sigma: Float, mut x: Vec<Float>, bits: u32) -> Result<(Float, Vec<Float>, Float)> {
    let tol_exp = -(bits as i32) + 8;
    let mut last: Option<Float> = None;
    for _ in 0..100 {
        let rhs = block.s.mul_vec(&x);
        let shifted = block.h.shifted(&sigma, &block.s);
        let Some(y) = solve(&shifted, &rhs) else {
            // sigma is an eigenvalue to working precision
            return Ok((sigma, x, Float::new(bits)));
        };
        let norm = dot(&y, &block.s.mul_vec(&y)).sqrt();
        x = y.into_iter().map(|v| v / &norm).collect();
        let next = dot(&x, &block.h.mul_vec(&x));
        let change = Float::with_val(bits, &next - &sigma).abs();
        sigma = next;
        if change.is_zero() || change.get_exp().unwrap_or(i32::MIN) < sigma.get_exp().unwrap_or(0) + tol_exp {
            return Ok((sigma, x, change));
        }
        if let Some(prev) = &last {
            if change > Float::with_val(bits, prev >> 2u32) {
                return Ok((sigma, x, change));
            }
        }
        last = Some(change);
    }
    Err(Error::Numerical("basis Rayleigh-quotient iteration did not converge".into()))
}

fn index_is(block: &Block, energy: &Float, level: u32, bits: u32) -> bool {
    let delta = Float::with_val(bits, 1e-6);
    let below = count_below(block, &Float::with_val(bits, energy - &delta));
    let above = count_below(block, &Float::with_val(bits, energy + &delta));
    below == level as usize && above == level as usize + 1
}

enum Failure {
    /// Rounding noise reached the tolerance; more bits will help.
    Precision,
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Other(e)
    }
}

const MAX_PRECISION_RETRIES: u32 = 4;

/// Energy with index `level` in one parity block for each basis size of
/// the schedule, until two successive sizes agree to the target.
pub fn basis_eigenvalue(level: u32, parity: Parity, g: &Coupling, config: &SolverConfig) -> Result<SpectralResult> {
    config.validate(g)?;
    let mut history = Vec::new();
    let mut extra = 64;
    for _ in 0..MAX_PRECISION_RETRIES {
        history.clear();
        match run_schedule(level, parity, g, config, config.working_bits() + extra, &mut history) {
            Ok(r) => return Ok(r),
            Err(Failure::Other(e)) => return Err(e),
            Err(Failure::Precision) => extra *= 2,
        }
    }
    Err(Error::Numerical(format!(
        "basis overlap too ill-conditioned at size {} even with {} guard bits",
        history.last().map_or(0, |(s, _)| *s),
        extra / 2
    )))
}

/// Energies per schedule size, for monotonicity checks.
pub fn basis_energies(level: u32, parity: Parity, g: &Coupling, config: &SolverConfig) -> Result<Vec<(usize, Float)>> {
    config.validate(g)?;
    let mut history = Vec::new();
    let bits = config.working_bits() + 64;
    match run_schedule(level, parity, g, config, bits, &mut history) {
        Err(Failure::Other(e)) if history.is_empty() => Err(e),
        _ => Ok(history),
    }
}

fn run_schedule(
    level: u32,
    parity: Parity,
    g: &Coupling,
    config: &SolverConfig,
    bits: u32,
    history: &mut Vec<(usize, Float)>,
) -> std::result::Result<SpectralResult, Failure> {
    let tolerance = Float::with_val(bits, Float::i_exp(1, -(f64::from(config.target_digits) * std::f64::consts::LOG2_10).ceil() as i32));
    let noise_limit = Float::with_val(bits, &tolerance >> 8u32);
    let mut vector: Vec<Float> = Vec::new();
    for &size in &config.basis_sizes {
        let block = match config.potential {
            Potential::DoubleWell => double_well_block(g, parity, size, bits),
            Potential::Harmonic => harmonic_block(parity, size, bits),
        };
        if !is_positive_definite(&block.s) {
            return Err(Failure::Precision);
        }
        let start = match history.last() {
            Some((_, e)) if index_is(&block, e, level, bits) => e.clone(),
            _ => bisect(&block, level, bits)?,
        };
        vector.resize(size, Float::new(bits));
        if vector.iter().all(Float::is_zero) {
            vector.iter_mut().for_each(|v| *v = Float::with_val(bits, 1));
        }
        let (mut energy, mut x, mut noise) = rayleigh(&block, start, vector.clone(), bits)?;
        if !index_is(&block, &energy, level, bits) {
            // The iteration slid to a neighbouring level; restart from a bracket.
            let bracket = bisect(&block, level, bits)?;
            let ones = vec![Float::with_val(bits, 1); size];
            (energy, x, noise) = rayleigh(&block, bracket, ones, bits)?;
            if !index_is(&block, &energy, level, bits) {
                return Err(Error::Numerical(format!("basis eigenvalue of size {size} failed its inertia check")).into());
            }
        }
        if noise > noise_limit {
            return Err(Failure::Precision);
        }
        vector = x;
        if let Some((_, previous)) = history.last() {
            let change = Float::with_val(bits, &energy - previous).abs();
            if change <= tolerance {
                history.push((size, energy.clone()));
                return Ok(SpectralResult {
                    energy,
                    level,
                    parity,
                    g: g.clone(),
                    method: Method::Basis,
                    size,
                    error: change,
                    digits: config.target_digits,
                });
            }
        }
        history.push((size, energy));
    }
    let (size, last) = history.last().cloned().unwrap_or((0, Float::new(bits)));
    let change = match history.len() {
        n if n >= 2 => Float::with_val(bits, &history[n - 1].1 - &history[n - 2].1).abs(),
        _ => Float::with_val(bits, f64::INFINITY),
    };
    Err(Error::Numerical(format!(
        "basis schedule exhausted at size {size}: energy {} still changing by {}",
        to_sci(&last, 20),
        to_sci(&change, 3)
    ))
    .into())
}
