//! Parallel-plate free energy per unit area and its distance derivatives,
//!
//! ```text
//! F_pp(d) = kB T Σ'_{n≥0} ∫ d²k/(2π)² Σ_{Q∈{E,M}} ln(1 − r_Q⁽¹⁾ r_Q⁽²⁾ e^{−2 q_n d}),
//! ```
//!
//! with ξ_n = 2πn kB T/ħ and the n = 0 term weighted by 1/2; at T = 0 the sum
//! becomes ħ/(2π) ∫ dξ. The radial momentum integral is taken in the variable
//! u = 2 q_n d so the integrand decays like e^{−u} at every separation, and
//! the derivatives are carried out analytically under the integral.

use rayon::prelude::*;

use crate::constants::{matsubara_frequency, thermal_wavelength, HBAR_C, K_BOLTZMANN};
use crate::dielectric::{reflection, reflection_zero_freq, DielectricError, PermittivityModel};
use crate::numerics::TAIL_RUN;
use crate::numerics::{integrate, Interval, NumericsError, QuadratureSpec};

use thiserror::Error;

/// Default relative tolerance of inner (radial, angular) integrals.
pub const INNER_REL_TOL: f64 = 1e-8;
/// Default relative tolerance of frequency sums/integrals.
pub const FREQ_REL_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum LifshitzError {
    #[error("separation must be positive, got {0} nm")]
    NonPositiveSeparation(f64),
    #[error("temperature must be non-negative, got {0} K")]
    NegativeTemperature(f64),
    #[error(transparent)]
    Dielectric(#[from] DielectricError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Imaginary frequency of one fluctuation mode: the static n = 0 term is kept
/// apart so its analytic ξ → 0 reflection limits are used throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Freq {
    Static,
    Dynamic { xi: f64 },
}

impl Freq {
    /// κ = ξ/ħc in 1/nm.
    pub fn kappa(self) -> f64 {
        match self {
            Freq::Static => 0.0,
            Freq::Dynamic { xi } => xi / HBAR_C,
        }
    }
}

/// Matsubara grid (finite T) or the T = 0 continuous-frequency rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyGrid {
    FiniteT { temperature: f64, n_max: u32 },
    ZeroT,
}

/// Build the frequency grid for temperature `temperature` (kelvin; 0 selects
/// the T = 0 rule) and separation `d`. The finite-T cap follows the
/// e^{−4πnd/λ_T} envelope: n_max = ceil(40 λ_T/(4π d)).
pub fn build_grid(temperature: f64, d: f64) -> Result<FrequencyGrid, LifshitzError> {
    if !(d > 0.0) {
        return Err(LifshitzError::NonPositiveSeparation(d));
    }
    if temperature < 0.0 {
        return Err(LifshitzError::NegativeTemperature(temperature));
    }
    if temperature == 0.0 {
        return Ok(FrequencyGrid::ZeroT);
    }
    let lambda_t = thermal_wavelength(temperature);
    let n_max = (40.0 * lambda_t / (4.0 * std::f64::consts::PI * d)).ceil().max(8.0) as u32;
    Ok(FrequencyGrid::FiniteT { temperature, n_max })
}

impl FrequencyGrid {
    /// kB T Σ'_n f(ξ_n) at finite T (n = 0 half-weighted, early exit when
    /// `TAIL_RUN` consecutive terms are negligible), or ħ/(2π) ∫ f dξ at
    /// T = 0 mapped by ξ = (ħc/2d)·t. Terms are evaluated concurrently in
    /// chunks and reduced in index order, so results are deterministic.
    pub fn sum<F>(&self, d: f64, f: F) -> Result<Observable, LifshitzError>
    where
        F: Fn(Freq) -> Result<Observable, LifshitzError> + Sync,
    {
        match *self {
            FrequencyGrid::FiniteT { temperature, n_max } => {
                let zero = f(Freq::Static)?;
                let mut total = 0.5 * zero.value;
                let mut ok = zero.converged;
                let mut small_run = 0usize;
                let mut n = 1u32;
                let mut terms = 0u64;
                'outer: while n <= n_max {
                    let chunk_end = (n + 15).min(n_max);
                    let chunk: Vec<Result<Observable, LifshitzError>> = (n..=chunk_end)
                        .into_par_iter()
                        .map(|m| f(Freq::Dynamic { xi: matsubara_frequency(m, temperature) }))
                        .collect();
                    for r in chunk {
                        let term = r?;
                        total += term.value;
                        ok &= term.converged;
                        terms += 1;
                        if term.value.abs() <= FREQ_REL_TOL * total.abs().max(f64::MIN_POSITIVE) {
                            small_run += 1;
                            if small_run >= TAIL_RUN {
                                break 'outer;
                            }
                        } else {
                            small_run = 0;
                        }
                    }
                    if chunk_end == n_max && small_run < TAIL_RUN {
                        // cap reached without the tail criterion
                        ok = false;
                        break;
                    }
                    n = chunk_end + 1;
                }
                Ok(Observable {
                    value: K_BOLTZMANN * temperature * total,
                    converged: ok,
                    terms_used: terms + 1,
                })
            }
            FrequencyGrid::ZeroT => {
                use std::sync::atomic::{AtomicBool, Ordering};
                let scale = HBAR_C / (2.0 * d);
                let spec = QuadratureSpec { rel_tol: FREQ_REL_TOL, ..Default::default() };
                let inner_ok = AtomicBool::new(true);
                let r = integrate(
                    |t| {
                        let o = f(Freq::Dynamic { xi: scale * t })
                            .map_err(|_| NumericsError::NonFiniteIntegrand { abscissa: t })?;
                        if !o.converged {
                            inner_ok.store(false, Ordering::Relaxed);
                        }
                        Ok(o.value)
                    },
                    Interval::SemiInfinite { start: 0.0, scale: 1.0 },
                    &spec,
                )?;
                let value = scale / (2.0 * std::f64::consts::PI) * r.value;
                Ok(Observable {
                    value,
                    converged: r.converged && inner_ok.load(Ordering::Relaxed),
                    terms_used: r.evaluations as u64,
                })
            }
        }
    }
}

/// A computed quantity together with its convergence flag.
#[derive(Debug, Clone, Copy)]
pub struct Observable {
    pub value: f64,
    pub converged: bool,
    pub terms_used: u64,
}

/// Two thick plates and the temperature mode. Material 1 is the curved plate
/// of the geometry module; for parallel plates the roles are symmetric.
#[derive(Debug, Clone)]
pub struct PlatePair {
    pub material1: PermittivityModel,
    pub material2: PermittivityModel,
    pub grid: FrequencyGrid,
}

impl PlatePair {
    pub fn new(
        material1: PermittivityModel,
        material2: PermittivityModel,
        grid: FrequencyGrid,
    ) -> Self {
        Self { material1, material2, grid }
    }

    /// Both plates of the same material.
    pub fn symmetric(material: PermittivityModel, grid: FrequencyGrid) -> Self {
        Self { material1: material.clone(), material2: material, grid }
    }

    pub(crate) fn reflections(
        &self,
        freq: Freq,
        k: f64,
    ) -> Result<(crate::dielectric::ReflectionPair, crate::dielectric::ReflectionPair), LifshitzError>
    {
        Ok(match freq {
            Freq::Static => (
                reflection_zero_freq(&self.material1, k)?,
                reflection_zero_freq(&self.material2, k)?,
            ),
            Freq::Dynamic { xi } => {
                (reflection(&self.material1, xi, k)?, reflection(&self.material2, xi, k)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Derivative {
    None,
    First,
    Second,
}

/// Radial integral at one frequency, in u = 2 q d:
///   energy: (1/8πd²) ∫ du u Σ_Q ln(1 − N_Q),  N_Q = r_Q⁽¹⁾ r_Q⁽²⁾ e^{−u}
///   ∂_d:    (1/8πd²) ∫ du u (u/d) Σ_Q N_Q/(1 − N_Q)
///   ∂²_d:  −(1/8πd²) ∫ du u (u/d)² Σ_Q N_Q/(1 − N_Q)²
fn radial_integral(
    pair: &PlatePair,
    d: f64,
    freq: Freq,
    deriv: Derivative,
) -> Result<Observable, LifshitzError> {
    let kappa = freq.kappa();
    let u0 = 2.0 * kappa * d;
    let spec = QuadratureSpec { rel_tol: INNER_REL_TOL, ..Default::default() };
    let err_holder = std::sync::Mutex::new(None::<LifshitzError>);
    let r = integrate(
        |u| {
            let q = u / (2.0 * d);
            let k = (q * q - kappa * kappa).max(0.0).sqrt();
            let (r1, r2) = match pair.reflections(freq, k) {
                Ok(v) => v,
                Err(e) => {
                    *err_holder.lock().unwrap() = Some(e);
                    return Err(NumericsError::NonFiniteIntegrand { abscissa: u });
                }
            };
            let e = (-u).exp();
            let mut sum = 0.0;
            for n_q in [r1.r_e * r2.r_e * e, r1.r_m * r2.r_m * e] {
                sum += match deriv {
                    Derivative::None => (-n_q).ln_1p(),
                    Derivative::First => (u / d) * n_q / (1.0 - n_q),
                    Derivative::Second => {
                        let g = 1.0 - n_q;
                        -(u / d) * (u / d) * n_q / (g * g)
                    }
                };
            }
            Ok(u * sum)
        },
        Interval::SemiInfinite { start: u0, scale: 1.0 },
        &spec,
    );
    let r = match r {
        Ok(v) => v,
        Err(e) => {
            if let Some(de) = err_holder.into_inner().unwrap() {
                return Err(de);
            }
            return Err(e.into());
        }
    };
    let norm = 1.0 / (8.0 * std::f64::consts::PI * d * d);
    Ok(Observable { value: norm * r.value, converged: r.converged, terms_used: 1 })
}

fn check_separation(d: f64) -> Result<(), LifshitzError> {
    if !(d > 0.0) {
        return Err(LifshitzError::NonPositiveSeparation(d));
    }
    Ok(())
}

/// Free energy per unit area F_pp(d) in eV/nm²; negative for passive plates.
pub fn free_energy_pp(pair: &PlatePair, d: f64) -> Result<Observable, LifshitzError> {
    check_separation(d)?;
    pair.grid.sum(d, |freq| radial_integral(pair, d, freq, Derivative::None))
}

/// Casimir force per unit area F_pp = −∂F_pp/∂d in eV/nm³ (negative =
/// attractive), by analytic differentiation under the integral.
pub fn force_pp(pair: &PlatePair, d: f64) -> Result<Observable, LifshitzError> {
    check_separation(d)?;
    let o = pair.grid.sum(d, |freq| radial_integral(pair, d, freq, Derivative::First))?;
    Ok(Observable { value: -o.value, ..o })
}

/// Second distance derivative F''_pp(d) in eV/nm⁴, analytic under the
/// integral; equals 2γ(d) of the gradient expansion.
pub fn d2_free_energy_pp(pair: &PlatePair, d: f64) -> Result<Observable, LifshitzError> {
    check_separation(d)?;
    pair.grid.sum(d, |freq| radial_integral(pair, d, freq, Derivative::Second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HBAR_C;

    fn pc_zero_t() -> PlatePair {
        PlatePair::symmetric(PermittivityModel::PerfectConductor, FrequencyGrid::ZeroT)
    }

    #[test]
    fn ideal_free_energy_law() {
        let pair = pc_zero_t();
        for d in [50.0, 200.0] {
            let o = free_energy_pp(&pair, d).unwrap();
            let want = -std::f64::consts::PI.powi(2) * HBAR_C / (720.0 * d.powi(3));
            assert!(o.converged);
            assert!(((o.value - want) / want).abs() < 1e-6, "d={d}: {} vs {want}", o.value);
        }
    }

    #[test]
    fn ideal_force_law() {
        let pair = pc_zero_t();
        let d = 120.0;
        let o = force_pp(&pair, d).unwrap();
        let want = -std::f64::consts::PI.powi(2) * HBAR_C / (240.0 * d.powi(4));
        assert!(((o.value - want) / want).abs() < 1e-6);
    }

    #[test]
    fn ideal_second_derivative_law() {
        // second derivative of −π²ħc/720d³ is −π²ħc/(60 d⁵): negative
        let pair = pc_zero_t();
        let d = 80.0;
        let o = d2_free_energy_pp(&pair, d).unwrap();
        let want = -std::f64::consts::PI.powi(2) * HBAR_C / (60.0 * d.powi(5));
        assert!(((o.value - want) / want).abs() < 1e-6, "{} vs {want}", o.value);
    }

    #[test]
    fn vacuum_gives_zero() {
        let vac = PermittivityModel::constant(1.0).unwrap();
        let pair = PlatePair::new(
            vac,
            PermittivityModel::gold_drude(),
            build_grid(300.0, 100.0).unwrap(),
        );
        let o = free_energy_pp(&pair, 100.0).unwrap();
        assert_eq!(o.value, 0.0);
    }

    #[test]
    fn rejects_non_positive_separation() {
        assert!(free_energy_pp(&pc_zero_t(), 0.0).is_err());
        assert!(force_pp(&pc_zero_t(), -3.0).is_err());
    }

    #[test]
    fn force_matches_finite_difference() {
        let pair = PlatePair::symmetric(
            PermittivityModel::gold_drude(),
            build_grid(300.0, 200.0).unwrap(),
        );
        let d = 200.0;
        let f = force_pp(&pair, d).unwrap().value;
        let h = 0.4;
        let fd = -(free_energy_pp(&pair, d + h).unwrap().value
            - free_energy_pp(&pair, d - h).unwrap().value)
            / (2.0 * h);
        assert!(((f - fd) / fd).abs() < 1e-5, "{f} vs {fd}");
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        let pair = PlatePair::symmetric(
            PermittivityModel::gold_drude(),
            build_grid(300.0, 200.0).unwrap(),
        );
        let d = 200.0;
        let d2 = d2_free_energy_pp(&pair, d).unwrap().value;
        let h = 1.0;
        let f0 = free_energy_pp(&pair, d).unwrap().value;
        let fp = free_energy_pp(&pair, d + h).unwrap().value;
        let fm = free_energy_pp(&pair, d - h).unwrap().value;
        let fd = (fp - 2.0 * f0 + fm) / (h * h);
        assert!(((d2 - fd) / fd).abs() < 1e-4, "{d2} vs {fd}");
    }

    #[test]
    fn attractive_and_monotone() {
        let pair = PlatePair::symmetric(
            PermittivityModel::gold_drude(),
            build_grid(300.0, 100.0).unwrap(),
        );
        let mut prev_mag = f64::INFINITY;
        for i in 0..8 {
            let d = 20.0 * 10f64.powf(i as f64 / 4.0);
            let e = free_energy_pp(&pair, d).unwrap().value;
            let f = force_pp(&pair, d).unwrap().value;
            assert!(e < 0.0 && f < 0.0, "d={d}");
            assert!(e.abs() < prev_mag, "|F_pp| not decreasing at d={d}");
            prev_mag = e.abs();
        }
    }

    #[test]
    fn high_temperature_limit_is_classical() {
        // d >> λ_T: only the n=0 E mode with r_E=1 survives for Drude:
        // F_pp -> −kB T ζ(3)/(16π d²)
        let t = 300.0;
        let lambda = thermal_wavelength(t);
        let d = 10.0 * lambda;
        let pair =
            PlatePair::symmetric(PermittivityModel::gold_drude(), build_grid(t, d).unwrap());
        let o = free_energy_pp(&pair, d).unwrap();
        let zeta3 = 1.202_056_903_159_594;
        let want = -K_BOLTZMANN * t * zeta3 / (16.0 * std::f64::consts::PI * d * d);
        assert!(((o.value - want) / want).abs() < 0.01, "{} vs {want}", o.value);
    }

    #[test]
    fn constant_dielectric_interpolates_to_conductor() {
        let d = 100.0;
        let pc = free_energy_pp(&pc_zero_t(), d).unwrap().value;
        let mut prev = 0.0f64;
        for eps in [2.0, 10.0, 100.0, 1e4] {
            let pair = PlatePair::symmetric(
                PermittivityModel::constant(eps).unwrap(),
                FrequencyGrid::ZeroT,
            );
            let v = free_energy_pp(&pair, d).unwrap().value;
            assert!(v.abs() > prev.abs(), "magnitude grows with eps");
            prev = v;
        }
        assert!(((prev - pc) / pc).abs() < 0.05, "eps=1e4 {} vs PC {pc}", prev);
    }

    #[test]
    fn drude_thermal_correction_small_below_200nm() {
        let d = 150.0;
        let warm = PlatePair::symmetric(
            PermittivityModel::gold_drude(),
            build_grid(300.0, d).unwrap(),
        );
        let cold = PlatePair::symmetric(PermittivityModel::gold_drude(), FrequencyGrid::ZeroT);
        let fw = free_energy_pp(&warm, d).unwrap().value;
        let fc = free_energy_pp(&cold, d).unwrap().value;
        assert!(((fw - fc) / fc).abs() < 0.03, "thermal correction {}", ((fw - fc) / fc).abs());
    }

    #[test]
    fn ideal_scaling_d3() {
        let pair = pc_zero_t();
        let base = free_energy_pp(&pair, 10.0).unwrap().value * 10.0f64.powi(3);
        for d in [100.0, 1e3, 1e4] {
            let v = free_energy_pp(&pair, d).unwrap().value * d.powi(3);
            assert!(((v - base) / base).abs() < 1e-6, "d={d}");
        }
    }

    #[test]
    fn grid_construction() {
        assert_eq!(build_grid(0.0, 100.0).unwrap(), FrequencyGrid::ZeroT);
        match build_grid(300.0, 100.0).unwrap() {
            FrequencyGrid::FiniteT { temperature, n_max } => {
                assert_eq!(temperature, 300.0);
                let lambda = thermal_wavelength(300.0);
                let want = (40.0 * lambda / (4.0 * std::f64::consts::PI * 100.0)).ceil() as u32;
                assert_eq!(n_max, want);
            }
            _ => panic!("expected finite-T grid"),
        }
        assert!(build_grid(-1.0, 100.0).is_err());
        assert!(build_grid(300.0, 0.0).is_err());
    }
}
