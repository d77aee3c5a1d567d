//! Permittivity models at imaginary frequency.

use std::fmt;
use std::sync::Arc;

use super::kk::KkTransform;
use super::table::OpticalTable;
use super::DielectricError;

/// Drude parameters used to extrapolate tabulated data to zero frequency,
/// Im ε(ω) = Ωp²γ/(ω(ω²+γ²)). Energies in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeTail {
    pub plasma_freq: f64,
    pub relaxation: f64,
}

/// ε(iξ) models. All yield real ε ≥ 1, non-increasing in ξ.
#[derive(Clone)]
pub enum PermittivityModel {
    /// Ideal mirror; handled at the reflection level, never as a large-ε limit.
    PerfectConductor,
    /// ε(iξ) = 1 + Ωp²/(ξ(ξ+γ)).
    Drude { plasma_freq: f64, relaxation: f64 },
    /// ε(iξ) = 1 + Ωp²/ξ².
    Plasma { plasma_freq: f64 },
    /// Frequency-independent ε₀ ≥ 1.
    Constant { eps: f64 },
    /// Kramers–Kronig transform of tabulated Im ε(ω) with a Drude
    /// low-frequency extrapolation.
    Tabulated { transform: Arc<KkTransform>, tail: DrudeTail },
}

impl fmt::Debug for PermittivityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PerfectConductor => write!(f, "PerfectConductor"),
            Self::Drude { plasma_freq, relaxation } => {
                write!(f, "Drude {{ plasma_freq: {plasma_freq}, relaxation: {relaxation} }}")
            }
            Self::Plasma { plasma_freq } => write!(f, "Plasma {{ plasma_freq: {plasma_freq} }}"),
            Self::Constant { eps } => write!(f, "Constant {{ eps: {eps} }}"),
            Self::Tabulated { tail, .. } => write!(f, "Tabulated {{ tail: {tail:?} }}"),
        }
    }
}

impl PermittivityModel {
    /// Gold in the Drude model, Ωp = 9 eV, γ = 35 meV.
    pub fn gold_drude() -> Self {
        Self::Drude { plasma_freq: 9.0, relaxation: 0.035 }
    }

    pub fn drude(plasma_freq: f64, relaxation: f64) -> Result<Self, DielectricError> {
        if !(plasma_freq > 0.0) {
            return Err(DielectricError::BadParameter(format!(
                "plasma frequency must be positive, got {plasma_freq}"
            )));
        }
        if !(relaxation >= 0.0) {
            return Err(DielectricError::BadParameter(format!(
                "relaxation must be non-negative, got {relaxation}"
            )));
        }
        Ok(Self::Drude { plasma_freq, relaxation })
    }

    pub fn plasma(plasma_freq: f64) -> Result<Self, DielectricError> {
        if !(plasma_freq > 0.0) {
            return Err(DielectricError::BadParameter(format!(
                "plasma frequency must be positive, got {plasma_freq}"
            )));
        }
        Ok(Self::Plasma { plasma_freq })
    }

    pub fn constant(eps: f64) -> Result<Self, DielectricError> {
        if !(eps >= 1.0) {
            return Err(DielectricError::BadParameter(format!(
                "constant permittivity must be >= 1, got {eps}"
            )));
        }
        Ok(Self::Constant { eps })
    }

    pub fn tabulated(table: OpticalTable, tail: DrudeTail) -> Result<Self, DielectricError> {
        if !(tail.plasma_freq > 0.0) || !(tail.relaxation >= 0.0) {
            return Err(DielectricError::BadParameter(
                "tabulated extrapolation needs plasma_freq > 0 and relaxation >= 0".into(),
            ));
        }
        Ok(Self::Tabulated { transform: Arc::new(KkTransform::new(table, tail)), tail })
    }

    /// ε(iξ) for ξ > 0 (in eV). The perfect conductor is rejected here; its
    /// reflections are fixed constants.
    pub fn permittivity(&self, xi: f64) -> Result<f64, DielectricError> {
        if !(xi > 0.0) {
            return Err(DielectricError::NonPositiveFrequency(xi));
        }
        match self {
            Self::PerfectConductor => Err(DielectricError::PerfectConductorPermittivity),
            Self::Drude { plasma_freq, relaxation } => {
                Ok(1.0 + plasma_freq * plasma_freq / (xi * (xi + relaxation)))
            }
            Self::Plasma { plasma_freq } => Ok(1.0 + (plasma_freq / xi).powi(2)),
            Self::Constant { eps } => Ok(*eps),
            Self::Tabulated { transform, .. } => transform.eps(xi),
        }
    }

    pub fn is_perfect_conductor(&self) -> bool {
        matches!(self, Self::PerfectConductor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drude_at_its_plasma_frequency() {
        let m = PermittivityModel::gold_drude();
        let got = m.permittivity(9.0).unwrap();
        let want = 1.0 + 81.0 / (9.0 * 9.035);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        assert!((want - 1.99613).abs() < 1e-5);
    }

    #[test]
    fn transparency_at_high_frequency() {
        for m in [
            PermittivityModel::gold_drude(),
            PermittivityModel::plasma(9.0).unwrap(),
            PermittivityModel::constant(1.0).unwrap(),
        ] {
            let e = m.permittivity(1e6).unwrap();
            // Constant{1} is exactly 1; conductors approach it
            assert!(e - 1.0 < 1e-6, "{m:?} -> {e}");
        }
    }

    #[test]
    fn rejects_non_positive_frequency() {
        let m = PermittivityModel::gold_drude();
        assert!(m.permittivity(0.0).is_err());
        assert!(m.permittivity(-1.0).is_err());
    }

    #[test]
    fn perfect_conductor_has_no_permittivity() {
        assert!(matches!(
            PermittivityModel::PerfectConductor.permittivity(1.0),
            Err(DielectricError::PerfectConductorPermittivity)
        ));
    }

    #[test]
    fn monotone_and_at_least_one() {
        let models = [
            PermittivityModel::gold_drude(),
            PermittivityModel::plasma(5.0).unwrap(),
            PermittivityModel::constant(4.2).unwrap(),
        ];
        for m in &models {
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let xi = 1e-3 * 10f64.powf(i as f64 / 10.0);
                let e = m.permittivity(xi).unwrap();
                assert!(e >= 1.0);
                assert!(e <= prev * (1.0 + 1e-12), "{m:?} not monotone at {xi}");
                prev = e;
            }
        }
    }
}
