//! Casimir free energies for real materials and the leading curvature
//! correction to the proximity force approximation (PFA).
//!
//! The library computes, for two thick parallel plates at imaginary
//! (Matsubara) frequencies,
//!
//! ```text
//! F_pp(d) = kB T Σ'_n ∫ d²k/(2π)² Σ_Q ln(1 − r_Q⁽¹⁾ r_Q⁽²⁾ e^{−2 q_n d}),
//! ```
//!
//! its first two distance derivatives, and the second-order perturbative
//! kernel G̃(k;d) whose small-k expansion G̃ = γ + δ k² + o(k²) yields the
//! gradient-expansion coefficient δ(d).  For an axially symmetric profile
//! H(ρ) = d + ρ²/2R + c₁ρ⁴/2R³ + … the force-gradient correction to PFA is
//!
//! ```text
//! ∂F/∂d = −2πR F_pp(d) (1 + θ̂₁ d/R + o(d/R)),
//! θ̂₁ = F_pp/(d F'_pp) · (2β − 4c₁),     β = δ/F_pp.
//! ```
//!
//! Units: lengths in nm, energies and ħ·frequencies in eV, temperatures in
//! kelvin.  See [`constants`] for the two conversion constants used.

pub mod constants;
pub mod dielectric;
pub mod geometry;
pub mod kernel;
pub mod lifshitz;
pub mod numerics;

pub use dielectric::{OpticalTable, PermittivityModel, ReflectionPair};
pub use geometry::{AxisymmetricProfile, Theta1Result};
pub use kernel::{GradientCoefficients, KernelProvider};
pub use lifshitz::{FrequencyGrid, PlatePair};
