//! Eigenvalues of `-(g/2) d^2/dq^2 + V(q)/g` by two independent methods.
//!
//! Both work in the symmetric coordinate `q = 1/2 + sqrt(g) y`, where the
//! Hamiltonian is `-(1/2) d^2/dy^2 + (1 - 4 g y^2)^2 / (32 g)` and parity is
//! `y -> -y`. The wells sit at `y = ±1/(2 sqrt g)`.

mod basis;
mod lattice;

use std::fmt;
use std::path::PathBuf;

use rug::Float;
use serde::Serialize;

pub use basis::{basis_eigenvalue, basis_energies};
pub use lattice::{lattice_eigenvalue, lattice_fixed_step};

use crate::error::{Error, Result};
use crate::instanton::Parity;
use crate::precision::{bits_for_digits, to_sci, Coupling, Estimate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Basis,
    Lattice,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Basis => "basis",
            Method::Lattice => "lattice",
        })
    }
}

impl Method {
    /// The basis below `g = 1/20`, where it converges fastest; the lattice
    /// above, where the two-centre overlap becomes too ill-conditioned for
    /// high targets.
    pub fn for_coupling(g: &Coupling) -> Method {
        if *g.rational() <= rug::Rational::from((1, 20)) {
            Method::Basis
        } else {
            Method::Lattice
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basis" => Ok(Method::Basis),
            "lattice" => Ok(Method::Lattice),
            other => Err(Error::InvalidInput(format!("unknown method {other:?}; expected basis or lattice"))),
        }
    }
}

/// The double well, or the plain oscillator `y^2/2` used to validate the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Potential {
    #[default]
    DoubleWell,
    Harmonic,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub target_digits: u32,
    pub guard_digits: u32,
    pub potential: Potential,
    /// Basis dimensions per parity block, increasing.
    pub basis_sizes: Vec<usize>,
    /// Lattice half-width in `y`; `None` picks it from the decay of the wave function.
    pub half_width: Option<f64>,
    /// Lattice points per unit length on the coarsest grid.
    pub points_per_unit: usize,
    /// Maximum number of step halvings.
    pub max_levels: usize,
    /// Lattice levels are appended here and reused by a rerun with the same parameters.
    pub checkpoint: Option<PathBuf>,
}

impl SolverConfig {
    /// Smallest guard that keeps `exp(-1/(6g))`-sized differences representable.
    pub fn min_guard_digits(g: &Coupling) -> u32 {
        let gf = g.to_float(64).to_f64();
        20 + (1.0 / (6.0 * gf * std::f64::consts::LN_10)).ceil() as u32
    }

    pub fn new(target_digits: u32, g: &Coupling) -> Self {
        Self {
            target_digits,
            guard_digits: Self::min_guard_digits(g),
            potential: Potential::DoubleWell,
            basis_sizes: (2..=100).map(|k| 4 * k).collect(),
            half_width: None,
            points_per_unit: 4,
            max_levels: 24,
            checkpoint: None,
        }
    }

    pub fn harmonic(target_digits: u32) -> Self {
        let g: Coupling = "1".parse().expect("literal coupling");
        Self { potential: Potential::Harmonic, ..Self::new(target_digits, &g) }
    }

    pub fn working_digits(&self) -> u32 {
        self.target_digits + self.guard_digits
    }

    pub fn working_bits(&self) -> u32 {
        bits_for_digits(self.working_digits())
    }

    pub fn validate(&self, g: &Coupling) -> Result<()> {
        if self.target_digits == 0 {
            return Err(Error::InvalidInput("target digits must be positive".into()));
        }
        let min = Self::min_guard_digits(g);
        if self.potential == Potential::DoubleWell && self.guard_digits < min {
            return Err(Error::InvalidInput(format!("guard digits {} below the minimum {min} for g = {g}", self.guard_digits)));
        }
        if self.basis_sizes.windows(2).any(|w| w[0] >= w[1]) || self.basis_sizes.is_empty() {
            return Err(Error::InvalidInput("basis sizes must be nonempty and strictly increasing".into()));
        }
        if self.points_per_unit == 0 || self.max_levels == 0 {
            return Err(Error::InvalidInput("lattice schedule must have at least one level".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub energy: Float,
    pub level: u32,
    pub parity: Parity,
    pub g: Coupling,
    pub method: Method,
    /// Basis dimension per parity block, or lattice points on the finest grid.
    pub size: usize,
    pub error: Float,
    pub digits: u32,
}

#[derive(Serialize)]
struct SpectralJson {
    schema: &'static str,
    g: String,
    #[serde(rename = "N")]
    level: u32,
    parity: Parity,
    method: Method,
    size: usize,
    energy: String,
    error: String,
}

impl SpectralResult {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.energy.clone(), self.error.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.json()).expect("spectral result serializes")
    }

    fn json(&self) -> SpectralJson {
        SpectralJson {
            schema: "dwell.eigen/1",
            g: self.g.to_string(),
            level: self.level,
            parity: self.parity,
            method: self.method,
            size: self.size,
            energy: to_sci(&self.energy, self.digits),
            error: to_sci(&self.error, 3),
        }
    }
}

/// The N = 0 doublet from one solver family at one precision.
#[derive(Clone, Debug)]
pub struct Doublet {
    pub minus: SpectralResult,
    pub plus: SpectralResult,
    pub splitting: Estimate,
    pub mean: Estimate,
}

#[derive(Serialize)]
struct DoubletJson {
    schema: &'static str,
    g: String,
    method: Method,
    splitting: String,
    splitting_error: String,
    mean: String,
    mean_error: String,
    levels: [SpectralJson; 2],
}

impl Doublet {
    pub fn to_json(&self) -> String {
        let d = self.plus.digits;
        let json = DoubletJson {
            schema: "dwell.doublet/1",
            g: self.plus.g.to_string(),
            method: self.plus.method,
            splitting: to_sci(&self.splitting.value, d.min(40)),
            splitting_error: to_sci(&self.splitting.error, 3),
            mean: to_sci(&self.mean.value, d),
            mean_error: to_sci(&self.mean.error, 3),
            levels: [self.plus.json(), self.minus.json()],
        };
        serde_json::to_string_pretty(&json).expect("doublet serializes")
    }
}

pub fn eigenvalue(level: u32, parity: Parity, g: &Coupling, method: Method, config: &SolverConfig) -> Result<SpectralResult> {
    match method {
        Method::Lattice => lattice_eigenvalue(level, parity, g, config),
        Method::Basis => basis_eigenvalue(level, parity, g, config),
    }
}

/// `E_{0,-} - E_{0,+}` and their mean, both levels computed at the working
/// precision of `config`.
pub fn splitting_and_mean(g: &Coupling, method: Method, config: &SolverConfig) -> Result<Doublet> {
    let plus = eigenvalue(0, Parity::Plus, g, method, config)?;
    let minus = eigenvalue(0, Parity::Minus, g, method, config)?;
    let bits = config.working_bits();
    let splitting = Float::with_val(bits, &minus.energy - &plus.energy);
    let error = Float::with_val(bits, &minus.error + &plus.error);
    let mean = Float::with_val(bits, &minus.energy + &plus.energy) / 2u32;
    let mean_error = Float::with_val(bits, &error / 2u32);
    Ok(Doublet { splitting: Estimate::new(splitting, error), mean: Estimate::new(mean, mean_error), minus, plus })
}
