//! Shared numerical primitives: adaptive quadrature, Richardson-extrapolated
//! finite differences, series summation with tail control, Gauss–Legendre
//! rules and monotone cubic interpolation.

mod diff;
mod gauss;
mod interp;
mod quadrature;
mod series;

pub use diff::{extrapolate_ladder, second_derivative_at, DiffResult, DiffSpec};
pub use gauss::gauss_legendre;
pub use interp::MonotoneCubic;
pub use quadrature::{integrate, Interval, QuadResult, QuadratureSpec};
pub use series::{sum_until, SeriesResult, TAIL_RUN};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("integrand returned a non-finite value at x = {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },
    #[error("invalid quadrature spec: {0}")]
    BadSpec(String),
    #[error("series term {index} is non-finite")]
    NonFiniteTerm { index: u64 },
}
