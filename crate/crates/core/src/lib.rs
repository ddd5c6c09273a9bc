//! Multi-instanton analysis of the symmetric double well
//! `H = -(g/2) d^2/dq^2 + q^2 (1 - q)^2 / (2g)`.

pub mod asymptotics;
pub mod borel;
pub mod error;
pub mod exact_series;
pub mod instanton;
pub mod linalg;
pub mod precision;
pub mod quadrature;
pub mod resurgence;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
