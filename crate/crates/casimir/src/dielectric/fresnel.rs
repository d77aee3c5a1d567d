//! Fresnel reflection coefficients at imaginary frequency,
//!
//! ```text
//! r_E = (ε q − s)/(ε q + s),   r_M = (q − s)/(q + s),
//! q = √(k² + κ²),  s = √(ε κ² + k²),  κ = ξ/ħc,
//! ```
//!
//! E = transverse magnetic, M = transverse electric. For ε(iξ) ≥ 1 these
//! satisfy 0 ≤ r_E ≤ 1 and −1 ≤ r_M ≤ 0.

use super::model::PermittivityModel;
use super::DielectricError;
use crate::constants::HBAR_C;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub r_e: f64,
    pub r_m: f64,
}

/// Reflection coefficients at imaginary frequency ξ > 0 (eV) and in-plane
/// momentum k ≥ 0 (1/nm).
pub fn reflection(
    model: &PermittivityModel,
    xi: f64,
    k: f64,
) -> Result<ReflectionPair, DielectricError> {
    if !(xi > 0.0) {
        return Err(DielectricError::NonPositiveFrequency(xi));
    }
    if !(k >= 0.0) {
        return Err(DielectricError::NegativeMomentum(k));
    }
    if model.is_perfect_conductor() {
        return Ok(ReflectionPair { r_e: 1.0, r_m: -1.0 });
    }
    let eps = model.permittivity(xi)?;
    let kappa = xi / HBAR_C;
    let q = (k * k + kappa * kappa).sqrt();
    let s = (eps * kappa * kappa + k * k).sqrt();
    Ok(ReflectionPair { r_e: (eps * q - s) / (eps * q + s), r_m: (q - s) / (q + s) })
}

/// Analytic ξ → 0 limits, used for the n = 0 Matsubara term.
pub fn reflection_zero_freq(
    model: &PermittivityModel,
    k: f64,
) -> Result<ReflectionPair, DielectricError> {
    if !(k > 0.0) {
        return Err(DielectricError::NonPositiveMomentum(k));
    }
    Ok(match model {
        PermittivityModel::PerfectConductor => ReflectionPair { r_e: 1.0, r_m: -1.0 },
        // εκ² → 0 while ε → ∞: transverse modes decouple
        PermittivityModel::Drude { .. } | PermittivityModel::Tabulated { .. } => {
            ReflectionPair { r_e: 1.0, r_m: 0.0 }
        }
        PermittivityModel::Plasma { plasma_freq } => {
            let w = plasma_freq / HBAR_C;
            let s = (k * k + w * w).sqrt();
            ReflectionPair { r_e: 1.0, r_m: (k - s) / (k + s) }
        }
        PermittivityModel::Constant { eps } => {
            ReflectionPair { r_e: (eps - 1.0) / (eps + 1.0), r_m: 0.0 }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_reflects_nothing() {
        let m = PermittivityModel::constant(1.0).unwrap();
        for (xi, k) in [(0.5, 0.0), (2.0, 0.03), (1e-3, 1.0)] {
            let r = reflection(&m, xi, k).unwrap();
            assert_eq!(r.r_e, 0.0);
            assert_eq!(r.r_m, 0.0);
        }
    }

    #[test]
    fn perfect_conductor_is_unit() {
        let r = reflection(&PermittivityModel::PerfectConductor, 3.0, 0.01).unwrap();
        assert_eq!(r, ReflectionPair { r_e: 1.0, r_m: -1.0 });
        let r0 = reflection_zero_freq(&PermittivityModel::PerfectConductor, 0.01).unwrap();
        assert_eq!(r0, ReflectionPair { r_e: 1.0, r_m: -1.0 });
    }

    #[test]
    fn grazing_limit_of_constant_dielectric() {
        // k >> κ: r_E -> (ε−1)/(ε+1), r_M -> 0
        let eps = 3.0;
        let m = PermittivityModel::constant(eps).unwrap();
        let xi = 0.2;
        let kappa = xi / HBAR_C;
        let r = reflection(&m, xi, 1e3 * kappa).unwrap();
        assert!((r.r_e - (eps - 1.0) / (eps + 1.0)).abs() < 1e-3);
        assert!(r.r_m.abs() < 1e-3);
    }

    #[test]
    fn zero_frequency_limits() {
        let drude = PermittivityModel::gold_drude();
        let r = reflection_zero_freq(&drude, 0.02).unwrap();
        assert_eq!(r, ReflectionPair { r_e: 1.0, r_m: 0.0 });

        let c3 = PermittivityModel::constant(3.0).unwrap();
        let r = reflection_zero_freq(&c3, 0.7).unwrap();
        assert!((r.r_e - 0.5).abs() < 1e-15);
        assert_eq!(r.r_m, 0.0);

        let k = 0.05;
        let plasma = PermittivityModel::plasma(9.0).unwrap();
        let w = 9.0 / HBAR_C;
        let want = (k - (k * k + w * w).sqrt()) / (k + (k * k + w * w).sqrt());
        let r = reflection_zero_freq(&plasma, k).unwrap();
        assert!((r.r_m - want).abs() < 1e-15);
        assert_eq!(r.r_e, 1.0);
    }

    #[test]
    fn continuity_toward_zero_frequency() {
        // finite-ξ reflections approach the dedicated ξ=0 limits
        let k = 0.05;
        for m in [
            PermittivityModel::constant(3.0).unwrap(),
            PermittivityModel::plasma(9.0).unwrap(),
        ] {
            let r = reflection(&m, 1e-6, k).unwrap();
            let r0 = reflection_zero_freq(&m, k).unwrap();
            assert!((r.r_e - r0.r_e).abs() < 1e-3, "{m:?} r_e");
            assert!((r.r_m - r0.r_m).abs() < 1e-3, "{m:?} r_m");
        }
        // Drude r_E converges only logarithmically slowly in ξ
        let drude = PermittivityModel::gold_drude();
        let r = reflection(&drude, 1e-8, k).unwrap();
        assert!((r.r_e - 1.0).abs() < 1e-2);
        assert!(r.r_m.abs() < 1e-2);
    }

    #[test]
    fn bounds_on_a_wide_stress_grid() {
        let models = [
            PermittivityModel::gold_drude(),
            PermittivityModel::plasma(9.0).unwrap(),
            PermittivityModel::constant(80.0).unwrap(),
        ];
        for m in &models {
            for i in 0..13 {
                for j in 0..13 {
                    let xi = 1e-4 * 10f64.powf(i as f64 / 2.0);
                    let k = 1e-5 * 10f64.powf(j as f64 / 2.0);
                    let r = reflection(m, xi, k).unwrap();
                    assert!(r.r_e >= 0.0 && r.r_e <= 1.0, "{m:?} r_e at ({xi},{k})");
                    assert!(r.r_m <= 0.0 && r.r_m >= -1.0, "{m:?} r_m at ({xi},{k})");
                }
            }
        }
    }
}
