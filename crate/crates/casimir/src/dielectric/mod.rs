//! Permittivities at imaginary frequency, Fresnel reflection coefficients and
//! Kramers–Kronig ingestion of tabulated optical data.

mod fresnel;
mod kk;
mod model;
mod table;

pub use fresnel::{reflection, reflection_zero_freq, ReflectionPair};
pub use model::{DrudeTail, PermittivityModel};
pub use table::{load_optical_table, OpticalTable};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DielectricError {
    #[error("imaginary frequency must be positive, got {0} eV")]
    NonPositiveFrequency(f64),
    #[error("in-plane momentum must be non-negative, got {0} 1/nm")]
    NegativeMomentum(f64),
    #[error("momentum must be positive at zero frequency, got {0} 1/nm")]
    NonPositiveMomentum(f64),
    #[error("perfect conductor has no finite permittivity; use its reflection coefficients")]
    PerfectConductorPermittivity,
    #[error("invalid model parameter: {0}")]
    BadParameter(String),
    #[error("optical table line {line}: {message}")]
    TableParse { line: usize, message: String },
    #[error("optical table: {0}")]
    TableInvalid(String),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}
