//! Three-point finite differences on `[0, Y]` with a parity condition at
//! `y = 0` and `psi(Y) = 0`, extrapolated to zero step in powers of `h^2`.
//!
//! The discrete eigenvalue is found by shooting: the recurrence
//! `psi_{i+1} = (2 + c_i) psi_i - psi_{i-1}`, `c_i = 2 h^2 (W_i - E)`,
//! runs through the leading principal minors of the tridiagonal matrix, so
//! its sign changes count the eigenvalues below `E` and Newton on `psi_n(E)`
//! converges to the one selected by that count.

use std::fs;
use std::path::Path;

use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::asymptotics::extrapolate_to_zero;
use crate::error::{Error, Result};
use crate::instanton::Parity;
use crate::precision::{to_sci, Coupling};

use super::{Method, Potential, SolverConfig, SpectralResult};

const CHECKPOINT_HEADER: &str = "dwell-lattice-checkpoint 1";
const MIN_LEVELS: usize = 3;
const DOMAIN_RETRIES: usize = 3;

struct Shooter {
    bits: u32,
    potential: Potential,
    g: Float,
}

struct Shot {
    value: Float,
    derivative: Float,
    sign_changes: usize,
}

impl Shooter {
    fn new(g: &Coupling, potential: Potential, bits: u32) -> Self {
        Self { bits, potential, g: g.to_float(bits) }
    }

    fn shoot(&self, energy: &Float, n: usize, h: &Float, parity: Parity, with_derivative: bool) -> Shot {
        let bits = self.bits;
        let h2 = Float::with_val(bits, h.square_ref());
        let two_h2 = Float::with_val(bits, &h2 * 2u32);
        // 2 h^2 W_i = scale * (1 - k * i^2)^2 for the double well,
        // scale * i^2 for the oscillator.
        let (k, scale) = match self.potential {
            Potential::DoubleWell => {
                let k = Float::with_val(bits, &self.g * &h2) * 4u32;
                let scale = Float::with_val(bits, &two_h2 / Float::with_val(bits, &self.g * 32u32));
                (k, scale)
            }
            Potential::Harmonic => (Float::new(bits), Float::with_val(bits, h2.square_ref())),
        };
        let shift = Float::with_val(bits, &two_h2 * energy);
        let potential_term = |i: u64, t: &mut Float, c: &mut Float| {
            let i2 = i * i;
            match self.potential {
                Potential::DoubleWell => {
                    t.assign(&k * i2);
                    *t -= 1u32;
                    t.square_mut();
                    c.assign(&*t * &scale);
                }
                Potential::Harmonic => {
                    c.assign(&scale * i2);
                }
            }
            *c -= &shift;
        };

        let mut t = Float::new(bits);
        let mut c = Float::new(bits);
        let (mut p0, mut p1, mut d0, mut d1);
        let mut sign_changes = 0;
        match parity {
            Parity::Plus => {
                potential_term(0, &mut t, &mut c);
                p0 = Float::with_val(bits, 1);
                p1 = Float::with_val(bits, &c / 2u32) + 1u32;
                d0 = Float::new(bits);
                d1 = Float::with_val(bits, -&h2);
                if p1.is_sign_negative() {
                    sign_changes += 1;
                }
            }
            Parity::Minus => {
                p0 = Float::new(bits);
                p1 = Float::with_val(bits, 1);
                d0 = Float::new(bits);
                d1 = Float::new(bits);
            }
        }
        let mut next = Float::new(bits);
        let mut dnext = Float::new(bits);
        for i in 1..n {
            potential_term(i as u64, &mut t, &mut c);
            c += 2u32;
            next.assign(&c * &p1);
            next -= &p0;
            if with_derivative {
                dnext.assign(&c * &d1);
                dnext -= &d0;
                t.assign(&two_h2 * &p1);
                dnext -= &t;
                std::mem::swap(&mut d0, &mut d1);
                std::mem::swap(&mut d1, &mut dnext);
            }
            if !next.is_zero() && !p1.is_zero() && next.is_sign_negative() != p1.is_sign_negative() {
                sign_changes += 1;
            }
            std::mem::swap(&mut p0, &mut p1);
            std::mem::swap(&mut p1, &mut next);
        }
        Shot { value: p1, derivative: d1, sign_changes }
    }

    fn count_below(&self, energy: &Float, n: usize, h: &Float, parity: Parity) -> usize {
        self.shoot(energy, n, h, parity, false).sign_changes
    }

    /// Bisection on the Sturm count, then Newton polishing.
    fn locate(&self, level: u32, parity: Parity, n: usize, h: &Float) -> Result<Float> {
        let bits = self.bits;
        let target = level as usize;
        let mut lo = Float::new(bits);
        let mut hi = Float::with_val(bits, 2 * level + 2);
        let mut expansions = 0;
        while self.count_below(&hi, n, h, parity) <= target {
            hi *= 2u32;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Numerical(format!("no lattice eigenvalue with index {level} found")));
            }
        }
        for _ in 0..40 {
            let mid = Float::with_val(bits, &lo + &hi) / 2u32;
            if self.count_below(&mid, n, h, parity) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let guess = Float::with_val(bits, &lo + &hi) / 2u32;
        self.newton(guess, n, h, parity)
    }

    /// Newton on the end value; stops at convergence or once rounding noise
    /// in the recurrence keeps the step from shrinking.
    fn newton(&self, mut energy: Float, n: usize, h: &Float, parity: Parity) -> Result<Float> {
        let tol_exp = -(self.bits as i32) + 24;
        let mut last: Option<Float> = None;
        for _ in 0..60 {
            let shot = self.shoot(&energy, n, h, parity, true);
            if shot.derivative.is_zero() {
                return Err(Error::Numerical("lattice Newton step has zero derivative".into()));
            }
            let step = Float::with_val(self.bits, &shot.value / &shot.derivative);
            energy -= &step;
            let scale = energy.get_exp().unwrap_or(0);
            if step.is_zero() || step.get_exp().unwrap_or(i32::MIN) < scale + tol_exp {
                return Ok(energy);
            }
            let size = step.abs();
            if let Some(prev) = &last {
                if size > Float::with_val(self.bits, prev >> 2u32) {
                    return Ok(energy);
                }
            }
            last = Some(size);
        }
        Err(Error::Numerical("lattice Newton iteration did not converge".into()))
    }

    /// Checks that `energy` is the eigenvalue with index `level` of this grid.
    fn check_index(&self, energy: &Float, level: u32, parity: Parity, n: usize, h: &Float) -> Result<()> {
        let delta = Float::with_val(self.bits, 1e-6);
        let below = self.count_below(&Float::with_val(self.bits, energy - &delta), n, h, parity);
        let above = self.count_below(&Float::with_val(self.bits, energy + &delta), n, h, parity);
        if below != level as usize || above != level as usize + 1 {
            return Err(Error::Numerical(format!(
                "lattice eigenvalue {} has Sturm counts {below}/{above}, expected {level}/{}",
                to_sci(energy, 12),
                level + 1
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize, PartialEq)]
struct CheckpointParams {
    g: String,
    #[serde(rename = "N")]
    level: u32,
    parity: Parity,
    harmonic: bool,
    half_width: u64,
    points_per_unit: usize,
    bits: u32,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    params: CheckpointParams,
    /// `(points, energy)` per completed level.
    levels: Vec<(usize, String)>,
}

fn read_checkpoint(path: &Path, params: &CheckpointParams, bits: u32) -> Vec<(usize, Float)> {
    let Ok(text) = fs::read_to_string(path) else { return Vec::new() };
    let Some(body) = text.strip_prefix(CHECKPOINT_HEADER) else { return Vec::new() };
    let Ok(cp) = serde_json::from_str::<Checkpoint>(body.trim()) else { return Vec::new() };
    if cp.params != *params {
        return Vec::new();
    }
    cp.levels
        .into_iter()
        .map_while(|(n, e)| Float::parse(&e).ok().map(|p| (n, Float::with_val(bits, p))))
        .collect()
}

fn write_checkpoint(path: &Path, params: CheckpointParams, levels: &[(usize, Float)], bits: u32) -> Result<CheckpointParams> {
    // Enough decimals for an exact binary round trip.
    let digits = (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as u32 + 2;
    let cp = Checkpoint { params, levels: levels.iter().map(|(n, e)| (*n, to_sci(e, digits))).collect() };
    let body = serde_json::to_string(&cp).expect("checkpoint serializes");
    fs::write(path, format!("{CHECKPOINT_HEADER}\n{body}\n"))
        .map_err(|e| Error::InvalidInput(format!("cannot write checkpoint {}: {e}", path.display())))?;
    Ok(cp.params)
}

fn default_half_width(g: &Coupling, level: u32, potential: Potential, digits: u32) -> u64 {
    let tail = (2.0 * std::f64::consts::LN_10 * (f64::from(digits) + 10.0)).sqrt();
    let centre = match potential {
        Potential::DoubleWell => 0.5 / g.to_float(64).to_f64().sqrt(),
        Potential::Harmonic => 0.0,
    };
    (centre + tail + (2.0 * f64::from(level) + 1.0).sqrt()).ceil() as u64
}

/// Eigenvalue with index `level` in the given parity block, extrapolated
/// to zero lattice spacing.
pub fn lattice_eigenvalue(level: u32, parity: Parity, g: &Coupling, config: &SolverConfig) -> Result<SpectralResult> {
    config.validate(g)?;
    let max_points_log2 = (config.points_per_unit as f64).log2() + config.max_levels as f64 + 8.0;
    let bits = config.working_bits() + 2 * max_points_log2.ceil() as u32;
    let shooter = Shooter::new(g, config.potential, bits);
    let tolerance = Float::with_val(bits, Float::i_exp(1, -(f64::from(config.target_digits) * std::f64::consts::LOG2_10).ceil() as i32));

    let mut half_width = match config.half_width {
        Some(w) => w.ceil() as u64,
        None => default_half_width(g, level, config.potential, config.target_digits),
    };
    // Boundary contamination is a property of the domain, visible already
    // on the coarsest grid.
    let mut retries = 0;
    let base = loop {
        let n0 = config.points_per_unit * half_width as usize;
        let h0 = Float::with_val(bits, half_width) / n0 as u64;
        let e0 = shooter.locate(level, parity, n0, &h0)?;
        let wider = half_width + half_width.div_ceil(4);
        let e_wide = shooter.locate(level, parity, config.points_per_unit * wider as usize, &h0)?;
        let change = Float::with_val(bits, &e_wide - &e0).abs();
        if change <= Float::with_val(bits, &tolerance / 16u32) {
            break e0;
        }
        retries += 1;
        if retries > DOMAIN_RETRIES || config.half_width.is_some() {
            return Err(Error::Numerical(format!(
                "lattice domain half-width {half_width} too small: enlarging it moves the energy by {}",
                to_sci(&change, 3)
            )));
        }
        half_width += half_width.div_ceil(2);
    };

    let n0 = config.points_per_unit * half_width as usize;
    let params = CheckpointParams {
        g: g.to_string(),
        level,
        parity,
        harmonic: config.potential == Potential::Harmonic,
        half_width,
        points_per_unit: config.points_per_unit,
        bits,
    };
    let mut levels: Vec<(usize, Float)> = match &config.checkpoint {
        Some(path) => read_checkpoint(path, &params, bits),
        None => Vec::new(),
    };
    levels.retain(|(n, _)| n % n0 == 0);
    if levels.is_empty() {
        levels.push((n0, base));
    }
    let mut params = Some(params);

    let step = |n: usize| Float::with_val(bits, half_width) / n as u64;
    let h2 = |n: usize| Float::with_val(bits, step(n).square_ref());
    let first_h = step(levels[0].0);
    shooter.check_index(&levels[0].1, level, parity, levels[0].0, &first_h)?;

    loop {
        let nodes: Vec<Float> = levels.iter().map(|(n, _)| h2(*n)).collect();
        let values: Vec<Float> = levels.iter().map(|(_, e)| e.clone()).collect();
        if levels.len() >= MIN_LEVELS {
            let ex = extrapolate_to_zero(&nodes, &values, bits)?;
            if ex.increment <= tolerance || levels.len() >= config.max_levels {
                let (n_last, e_last) = levels.last().expect("at least one level");
                shooter.check_index(e_last, level, parity, *n_last, &step(*n_last))?;
                if ex.increment > tolerance {
                    return Err(Error::Numerical(format!(
                        "lattice extrapolation reached {} levels with increment {} above the target 1e-{}",
                        levels.len(),
                        to_sci(&ex.increment, 3),
                        config.target_digits
                    )));
                }
                return Ok(SpectralResult {
                    energy: ex.value,
                    level,
                    parity,
                    g: g.clone(),
                    method: Method::Lattice,
                    size: *n_last,
                    error: ex.increment,
                    digits: config.target_digits,
                });
            }
        }
        // Predict the next grid's eigenvalue from the current extrapolation.
        let (n_last, e_last) = levels.last().expect("at least one level").clone();
        let guess = if levels.len() >= 2 {
            let limit = extrapolate_to_zero(&nodes, &values, bits)?.value;
            Float::with_val(bits, &e_last - &limit) / 4u32 + &limit
        } else {
            e_last
        };
        let n_next = 2 * n_last;
        let energy = shooter.newton(guess, n_next, &step(n_next), parity)?;
        levels.push((n_next, energy));
        if let (Some(path), Some(p)) = (&config.checkpoint, params.take()) {
            params = Some(write_checkpoint(path, p, &levels, bits)?);
        }
    }
}

/// Discrete eigenvalue on a single grid with spacing close to `h`, without extrapolation.
pub fn lattice_fixed_step(level: u32, parity: Parity, g: &Coupling, config: &SolverConfig, h: f64) -> Result<Float> {
    config.validate(g)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("lattice step must be positive, got {h}")));
    }
    let bits = config.working_bits() + 64;
    let half_width = match config.half_width {
        Some(w) => w.ceil() as u64,
        None => default_half_width(g, level, config.potential, config.target_digits),
    };
    let n = ((half_width as f64) / h).round().max(1.0) as usize;
    let shooter = Shooter::new(g, config.potential, bits);
    let step = Float::with_val(bits, half_width) / n as u64;
    shooter.locate(level, parity, n, &step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_of_the_discrete_oscillator() {
        let g: Coupling = "1".parse().unwrap();
        let shooter = Shooter::new(&g, Potential::Harmonic, 128);
        let n = 400;
        let h = Float::with_val(128, 10) / n as u32;
        // even block holds 1/2, 5/2, 9/2...; odd block 3/2, 7/2...
        for (e, even, odd) in [(0.4, 0, 0), (1.0, 1, 0), (2.0, 1, 1), (3.0, 2, 1), (4.0, 2, 2)] {
            let e = Float::with_val(128, e);
            assert_eq!(shooter.count_below(&e, n, &h, Parity::Plus), even, "E = {e}");
            assert_eq!(shooter.count_below(&e, n, &h, Parity::Minus), odd, "E = {e}");
        }
    }

    #[test]
    fn harmonic_levels_by_parity() {
        let config = SolverConfig::harmonic(20);
        let g: Coupling = "1".parse().unwrap();
        for (level, parity, exact) in [(0, Parity::Plus, 0.5), (0, Parity::Minus, 1.5), (1, Parity::Plus, 2.5)] {
            let r = lattice_eigenvalue(level, parity, &g, &config).unwrap();
            let err = Float::with_val(128, &r.energy - exact).abs();
            assert!(err < 1e-20, "level {level}{parity}: {}", to_sci(&r.energy, 25));
        }
    }

    #[test]
    fn checkpoint_resume_gives_identical_result() {
        let dir = std::env::temp_dir().join(format!("dwell-lattice-test-{}", std::process::id()));
        let _ = fs::remove_file(&dir);
        let mut config = SolverConfig::harmonic(12);
        config.checkpoint = Some(dir.clone());
        let g: Coupling = "1".parse().unwrap();
        let first = lattice_eigenvalue(0, Parity::Plus, &g, &config).unwrap();
        let text = fs::read_to_string(&dir).unwrap();
        assert!(text.starts_with(CHECKPOINT_HEADER));
        let second = lattice_eigenvalue(0, Parity::Plus, &g, &config).unwrap();
        assert_eq!(first.energy, second.energy);
        let _ = fs::remove_file(&dir);
    }
}
