//! The second-order perturbative kernel G̃(k;d) and the gradient-expansion
//! coefficients γ(d), δ(d).
//!
//! For each Matsubara frequency,
//!
//! ```text
//! f(k', k'') = −Σ_Q  q' r_Q⁽²⁾(k') e^{−2q'd}/g_Q(k') ·
//!              [ (B₂)_{QQ}(k',k';k'')
//!                + 2 Σ_{Q'} q'' r_{Q'}⁽²⁾(k'') e^{−2q''d}/g_{Q'}(k'')
//!                      B_{QQ'}(k',k'') B_{Q'Q}(k'',k') ],
//! g_Q(k) = 1 − r_Q⁽¹⁾ r_Q⁽²⁾ e^{−2 q d},
//! G̃(k;d) = kB T Σ'_n ∫ d²k'/(2π)² [f(k', k'+k) + f(k', k'−k)]/2,
//! ```
//!
//! and the matching conditions G̃(0;d) = F''_pp(d)/2 (the γ-check, enforced at
//! run time) and δ(d) = ½ ∂²G̃/∂k²|₀ determine the gradient correction.

pub mod pc;
pub mod spm;
pub mod statics;

use rayon::prelude::*;
use thiserror::Error;

use crate::constants::HBAR_C;
use crate::dielectric::{
    reflection, reflection_zero_freq, DielectricError, PermittivityModel, ReflectionPair,
};
use crate::lifshitz::{
    d2_free_energy_pp, force_pp, free_energy_pp, Freq, LifshitzError, Observable, PlatePair,
    INNER_REL_TOL,
};
use crate::numerics::{
    extrapolate_ladder, gauss_legendre, integrate, Interval, NumericsError, QuadratureSpec,
};

pub use spm::BEntries;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("in-plane momentum must be non-zero here")]
    ZeroMomentum,
    #[error(
        "gamma-check failed: kernel G(0) = {gamma:e} vs F''/2 = {d2_half:e} \
         (rel {rel:e}); the provider normalization is inconsistent"
    )]
    GammaCheckFailed { gamma: f64, d2_half: f64, rel: f64 },
    #[error(transparent)]
    Dielectric(#[from] DielectricError),
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// In-plane wave vector (1/nm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KVec {
    pub x: f64,
    pub y: f64,
}

impl KVec {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Diagonal second-order amplitudes (B₂)_{QQ}.
#[derive(Debug, Clone, Copy)]
pub struct B2Diag {
    pub e: f64,
    pub m: f64,
}

/// Evaluator for the first- and second-order scattering matrices of the
/// curved plate, and for its flat reflection coefficients (which enter the
/// g_Q denominators). Implementations must be rotationally covariant: values
/// depend only on the momentum magnitudes and the angle between them.
pub trait KernelProvider: Send + Sync {
    /// B_{QQ'}(k_out ← k_in) at the given frequency.
    fn b_matrix(&self, freq: Freq, k_out: KVec, k_in: KVec) -> Result<BEntries, KernelError>;

    /// Symmetrized diagonal (B₂)_{QQ}(k, k; k_mid): the combination
    /// ½[B₂(k,k;k_mid) + B₂(k,k;2k−k_mid)], the only one entering the free
    /// energy at second order.
    fn b2_diag(&self, freq: Freq, k: KVec, k_mid: KVec) -> Result<B2Diag, KernelError>;

    /// Flat Fresnel reflection of the curved plate.
    fn reflection(&self, freq: Freq, k: f64) -> Result<ReflectionPair, KernelError>;
}

/// Kernel provider for any material of the dielectric module. The perfect
/// conductor and the ξ = 0 limits dispatch to their analytic forms.
#[derive(Debug, Clone)]
pub struct MaterialKernel {
    model: PermittivityModel,
}

impl MaterialKernel {
    pub fn new(model: PermittivityModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &PermittivityModel {
        &self.model
    }
}

fn invariants(k_out: KVec, k_in: KVec) -> Result<(f64, f64, f64, f64), KernelError> {
    let k1 = k_in.norm();
    let k2 = k_out.norm();
    if k1 == 0.0 || k2 == 0.0 {
        return Err(KernelError::ZeroMomentum);
    }
    let c = ((k_in.x * k_out.x + k_in.y * k_out.y) / (k1 * k2)).clamp(-1.0, 1.0);
    let s = (k_in.x * k_out.y - k_in.y * k_out.x) / (k1 * k2);
    Ok((k2, k1, c, s))
}

impl KernelProvider for MaterialKernel {
    fn b_matrix(&self, freq: Freq, k_out: KVec, k_in: KVec) -> Result<BEntries, KernelError> {
        let (k2, k1, c, s) = invariants(k_out, k_in)?;
        Ok(match (freq, &self.model) {
            (Freq::Dynamic { xi }, PermittivityModel::PerfectConductor) => {
                pc::pc_b_entries(xi / HBAR_C, k2, k1, c, s)
            }
            (Freq::Dynamic { xi }, model) => {
                spm::b_entries(xi / HBAR_C, model.permittivity(xi)?, k2, k1, c, s)
            }
            (Freq::Static, PermittivityModel::PerfectConductor) => {
                pc::pc_b_entries_static(k2, k1, c)
            }
            (Freq::Static, PermittivityModel::Drude { .. })
            | (Freq::Static, PermittivityModel::Tabulated { .. }) => {
                statics::drude_b_entries_static(k2, k1)
            }
            (Freq::Static, PermittivityModel::Constant { eps }) => {
                statics::const_b_entries_static(*eps, k2, k1, c)
            }
            (Freq::Static, PermittivityModel::Plasma { plasma_freq }) => {
                statics::plasma_b_entries_static(plasma_freq / HBAR_C, k2, k1, c, s)
            }
        })
    }

    fn b2_diag(&self, freq: Freq, k: KVec, k_mid: KVec) -> Result<B2Diag, KernelError> {
        let (k2, k1, c, _) = invariants(k_mid, k)?;
        let (e, m) = match (freq, &self.model) {
            (Freq::Dynamic { xi }, PermittivityModel::PerfectConductor) => {
                pc::pc_b2sym(xi / HBAR_C, k1, k2, c)
            }
            (Freq::Dynamic { xi }, model) => {
                spm::b2sym(xi / HBAR_C, model.permittivity(xi)?, k1, k2, c)
            }
            (Freq::Static, PermittivityModel::PerfectConductor) => pc::pc_b2sym_static(k1, k2, c),
            (Freq::Static, PermittivityModel::Drude { .. })
            | (Freq::Static, PermittivityModel::Tabulated { .. }) => {
                statics::drude_b2sym_static(k1, k2, c)
            }
            (Freq::Static, PermittivityModel::Constant { eps }) => {
                statics::const_b2sym_static(*eps, k1, k2, c)
            }
            (Freq::Static, PermittivityModel::Plasma { plasma_freq }) => {
                statics::plasma_b2sym_static(plasma_freq / HBAR_C, k1, k2, c)
            }
        };
        Ok(B2Diag { e, m })
    }

    fn reflection(&self, freq: Freq, k: f64) -> Result<ReflectionPair, KernelError> {
        Ok(match freq {
            Freq::Static => reflection_zero_freq(&self.model, k)?,
            Freq::Dynamic { xi } => reflection(&self.model, xi, k)?,
        })
    }
}

/// Tolerances and steps for the kernel evaluation.
#[derive(Debug, Clone, Copy)]
pub struct KernelSettings {
    /// Relative tolerance of the radial quadrature.
    pub radial_rel_tol: f64,
    /// Relative tolerance of the angular integral (order doubling).
    pub angular_rel_tol: f64,
    /// Base step of the δ extraction, in units of 1/d.
    pub base_step: f64,
    /// Entries of the extrapolation ladder (halving steps).
    pub richardson_levels: usize,
    /// Hard-error threshold of the γ-check.
    pub gamma_check_tol: f64,
}

impl Default for KernelSettings {
    fn default() -> Self {
        Self {
            radial_rel_tol: INNER_REL_TOL,
            angular_rel_tol: 1e-8,
            base_step: 0.02,
            richardson_levels: 3,
            gamma_check_tol: 1e-4,
        }
    }
}

/// The integrand of Eq. for G̃: all scattering structure of one momentum pair.
pub fn f_n<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    freq: Freq,
    k_prime: KVec,
    k_second: KVec,
    d: f64,
) -> Result<f64, KernelError> {
    if !(d > 0.0) {
        return Err(LifshitzError::NonPositiveSeparation(d).into());
    }
    let kappa = freq.kappa();
    let k1 = k_prime.norm();
    let k2 = k_second.norm();
    let q1 = (k1 * k1 + kappa * kappa).sqrt();
    let q2 = (k2 * k2 + kappa * kappa).sqrt();
    let e1 = (-2.0 * q1 * d).exp();
    let e2 = (-2.0 * q2 * d).exp();

    let r1_curved = provider.reflection(freq, k1)?;
    let r2_curved = provider.reflection(freq, k2)?;
    let (_, r1_flat) = pair.reflections(freq, k1)?;
    let (_, r2_flat) = pair.reflections(freq, k2)?;

    let g1 = [
        1.0 - r1_curved.r_e * r1_flat.r_e * e1,
        1.0 - r1_curved.r_m * r1_flat.r_m * e1,
    ];
    let g2 = [
        1.0 - r2_curved.r_e * r2_flat.r_e * e2,
        1.0 - r2_curved.r_m * r2_flat.r_m * e2,
    ];

    let b2 = provider.b2_diag(freq, k_prime, k_second)?;
    let fwd = provider.b_matrix(freq, k_second, k_prime)?; // B(k'' <- k')
    let bwd = provider.b_matrix(freq, k_prime, k_second)?; // B(k' <- k'')

    // products B_{QQ'}(k',k'') B_{Q'Q}(k'',k'), outer Q on the k' leg
    let prod = [
        [bwd.ee * fwd.ee, bwd.em * fwd.me],
        [bwd.me * fwd.em, bwd.mm * fwd.mm],
    ];
    let b2q = [b2.e, b2.m];
    let r1q = [r1_flat.r_e, r1_flat.r_m];
    let r2q = [r2_flat.r_e, r2_flat.r_m];

    let mut total = 0.0;
    for q_out in 0..2 {
        let mut inner = b2q[q_out];
        for q_in in 0..2 {
            inner += 2.0 * (q2 * r2q[q_in] * e2 / g2[q_in]) * prod[q_out][q_in];
        }
        total -= (q1 * r1q[q_out] * e1 / g1[q_out]) * inner;
    }
    Ok(total)
}

/// 2 ∫_0^π g(φ) dφ by Gauss–Legendre order doubling.
fn angular_integral<G: Fn(f64) -> Result<f64, KernelError>>(
    g: G,
    rel_tol: f64,
) -> Result<f64, KernelError> {
    let mut prev = f64::NAN;
    let mut order = 8;
    loop {
        let rule = gauss_legendre(order);
        let mut acc = 0.0;
        for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
            let phi = 0.5 * std::f64::consts::PI * (x + 1.0);
            acc += w * g(phi)?;
        }
        let val = std::f64::consts::PI * acc; // 2 × (π/2 Σ w g)
        if !prev.is_nan() && (val - prev).abs() <= rel_tol * val.abs().max(1e-300) {
            return Ok(val);
        }
        if order >= 256 {
            return Ok(val);
        }
        prev = val;
        order *= 2;
    }
}

/// One-frequency slice of G̃(k;d): (1/(2π)²) ∫ d²k' sym-f.
fn g_slice<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    freq: Freq,
    k: f64,
    d: f64,
    settings: &KernelSettings,
) -> Result<Observable, KernelError> {
    let kappa = freq.kappa();
    let u0 = 2.0 * kappa * d;
    let spec = QuadratureSpec { rel_tol: settings.radial_rel_tol, ..Default::default() };
    let err_holder = std::sync::Mutex::new(None::<KernelError>);
    let radial = integrate(
        |u| {
            let q1 = u / (2.0 * d);
            let k1 = (q1 * q1 - kappa * kappa).max(0.0).sqrt();
            if k1 == 0.0 {
                return Ok(0.0);
            }
            let k_prime = KVec::new(k1, 0.0);
            let inner = if k == 0.0 {
                2.0 * std::f64::consts::PI
                    * match f_n(provider, pair, freq, k_prime, k_prime, d) {
                        Ok(v) => v,
                        Err(e) => {
                            *err_holder.lock().unwrap() = Some(e);
                            return Err(NumericsError::NonFiniteIntegrand { abscissa: u });
                        }
                    }
            } else {
                let ang = angular_integral(
                    |phi| {
                        let k_second =
                            KVec::new(k1 + k * phi.cos(), k * phi.sin());
                        f_n(provider, pair, freq, k_prime, k_second, d)
                    },
                    settings.angular_rel_tol,
                );
                match ang {
                    Ok(v) => v,
                    Err(e) => {
                        *err_holder.lock().unwrap() = Some(e);
                        return Err(NumericsError::NonFiniteIntegrand { abscissa: u });
                    }
                }
            };
            Ok(u * inner)
        },
        Interval::SemiInfinite { start: u0, scale: 1.0 },
        &spec,
    );
    let radial = match radial {
        Ok(v) => v,
        Err(e) => {
            if let Some(ke) = err_holder.into_inner().unwrap() {
                return Err(ke);
            }
            return Err(e.into());
        }
    };
    let norm = 1.0 / (16.0 * std::f64::consts::PI.powi(2) * d * d);
    Ok(Observable { value: norm * radial.value, converged: radial.converged, terms_used: 1 })
}

/// G̃(k;d): Matsubara sum (or T = 0 integral) of the slice above. Even in k
/// by construction of the symmetrized angular average.
pub fn kernel_g<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    k: f64,
    d: f64,
    settings: &KernelSettings,
) -> Result<Observable, KernelError> {
    if !(d > 0.0) {
        return Err(LifshitzError::NonPositiveSeparation(d).into());
    }
    if !(k >= 0.0) {
        return Err(DielectricError::NegativeMomentum(k).into());
    }
    let holder = std::sync::Mutex::new(None::<KernelError>);
    let r = pair.grid.sum(d, |freq| match g_slice(provider, pair, freq, k, d, settings) {
        Ok(o) => Ok(o),
        Err(e) => {
            let msg = e.to_string();
            *holder.lock().unwrap() = Some(e);
            Err(LifshitzError::Numerics(NumericsError::BadSpec(msg)))
        }
    });
    match r {
        Ok(o) => Ok(o),
        Err(e) => {
            if let Some(ke) = holder.into_inner().unwrap() {
                return Err(ke);
            }
            Err(e.into())
        }
    }
}

/// Gradient-expansion coefficients with diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct GradientCoefficients {
    /// γ(d) = G̃(0;d) in eV/nm⁴.
    pub gamma: f64,
    /// δ(d) = ½ ∂²G̃/∂k²|₀ in eV/nm².
    pub delta: f64,
    /// Extrapolation error estimate on δ.
    pub delta_error: f64,
    /// First-order coefficient μ(d) = F'_pp(d), when requested.
    pub mu: Option<f64>,
    /// Relative deviation of the γ-check against F''_pp/2.
    pub gamma_check_rel: f64,
    /// All quadratures and sums converged.
    pub converged: bool,
}

/// Extract γ and δ. The γ-check against `d2_free_energy_pp`/2 is enforced:
/// exceeding `settings.gamma_check_tol` is a hard error since it indicates an
/// inconsistent provider normalization rather than a tolerance problem.
///
/// δ uses the sequence D(k) = (G̃(k) − γ)/k² on a halving ladder from
/// `settings.base_step`/d, extrapolated with a first-order Richardson tableau
/// (G̃ acquires an odd |k|³ term from the frequency integral at T = 0, so the
/// ladder error starts at O(k)).
pub fn gradient_coefficients<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    d: f64,
    settings: &KernelSettings,
) -> Result<GradientCoefficients, KernelError> {
    let gamma = kernel_g(provider, pair, 0.0, d, settings)?;
    let d2 = d2_free_energy_pp(pair, d)?;
    let d2_half = 0.5 * d2.value;
    let rel = ((gamma.value - d2_half) / d2_half).abs();
    if rel > settings.gamma_check_tol && gamma.converged && d2.converged {
        return Err(KernelError::GammaCheckFailed { gamma: gamma.value, d2_half, rel });
    }

    let k0 = settings.base_step / d;
    let mut ks = Vec::with_capacity(settings.richardson_levels);
    let mut h = k0;
    for _ in 0..settings.richardson_levels {
        ks.push(h);
        h *= 0.5;
    }
    let gs: Vec<Result<Observable, KernelError>> = ks
        .par_iter()
        .map(|&kv| kernel_g(provider, pair, kv, d, settings))
        .collect();
    let mut ladder = Vec::with_capacity(ks.len());
    let mut ok = gamma.converged && d2.converged;
    for (kv, g) in ks.iter().zip(gs) {
        let g = g?;
        ok &= g.converged;
        ladder.push((g.value - gamma.value) / (kv * kv));
    }
    let ext = extrapolate_ladder(&ladder, 1);
    Ok(GradientCoefficients {
        gamma: gamma.value,
        delta: ext.value,
        delta_error: ext.error,
        mu: None,
        gamma_check_rel: rel,
        converged: ok && ext.converged,
    })
}

/// δ by the inner route: differentiate f under the k'-integral per the
/// α(d) = ½ ∂²G̃/∂k²|₀ formula, with a symmetric second difference in k
/// applied to f itself. Serves as an independent cross-check of the outer
/// route in tests.
pub fn gradient_delta_inner<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    d: f64,
    settings: &KernelSettings,
) -> Result<Observable, KernelError> {
    let steps = [settings.base_step / d, 0.5 * settings.base_step / d];
    let holder = std::sync::Mutex::new(None::<KernelError>);
    let sum = pair.grid.sum(d, |freq| {
        let compute = || -> Result<Observable, KernelError> {
            let kappa = freq.kappa();
            let u0 = 2.0 * kappa * d;
            let spec = QuadratureSpec { rel_tol: settings.radial_rel_tol, ..Default::default() };
            let radial = integrate(
                |u| {
                    let q1 = u / (2.0 * d);
                    let k1 = (q1 * q1 - kappa * kappa).max(0.0).sqrt();
                    if k1 == 0.0 {
                        return Ok(0.0);
                    }
                    let ang = angular_integral(
                        |phi| {
                            let kp = KVec::new(k1 * phi.cos(), k1 * phi.sin());
                            let f0 = f_n(provider, pair, freq, kp, kp, d)?;
                            let mut d2s = Vec::with_capacity(steps.len());
                            for &hk in &steps {
                                let kpl = KVec::new(kp.x + hk, kp.y);
                                let kmi = KVec::new(kp.x - hk, kp.y);
                                let fp = f_n(provider, pair, freq, kp, kpl, d)?;
                                let fm = f_n(provider, pair, freq, kp, kmi, d)?;
                                d2s.push((fp + fm - 2.0 * f0) / (hk * hk));
                            }
                            Ok(extrapolate_ladder(&d2s, 1).value)
                        },
                        settings.angular_rel_tol,
                    );
                    match ang {
                        Ok(v) => Ok(u * v),
                        Err(e) => {
                            *holder.lock().unwrap() = Some(e);
                            Err(NumericsError::NonFiniteIntegrand { abscissa: u })
                        }
                    }
                },
                Interval::SemiInfinite { start: u0, scale: 1.0 },
                &spec,
            )?;
            let norm = 1.0 / (16.0 * std::f64::consts::PI.powi(2) * d * d);
            Ok(Observable {
                value: norm * radial.value,
                converged: radial.converged,
                terms_used: 1,
            })
        };
        compute().map_err(|e| {
            let msg = e.to_string();
            if holder.lock().unwrap().is_none() {
                *holder.lock().unwrap() = Some(e);
            }
            LifshitzError::Numerics(NumericsError::BadSpec(msg))
        })
    });
    match sum {
        Ok(o) => Ok(Observable { value: 0.5 * o.value, ..o }),
        Err(e) => {
            if let Some(ke) = holder.into_inner().unwrap() {
                return Err(ke);
            }
            Err(e.into())
        }
    }
}

/// μ(d) from the diagonal first-order amplitude; the invariant μ = F'_pp(d)
/// validates the provider's B_{QQ}(k,k) = r_Q diagonal.
pub fn first_order_coefficient<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    d: f64,
    settings: &KernelSettings,
) -> Result<Observable, KernelError> {
    let holder = std::sync::Mutex::new(None::<KernelError>);
    let r = pair.grid.sum(d, |freq| {
        let kappa = freq.kappa();
        let u0 = 2.0 * kappa * d;
        let spec = QuadratureSpec { rel_tol: settings.radial_rel_tol, ..Default::default() };
        let radial = integrate(
            |u| {
                let q = u / (2.0 * d);
                let k1 = (q * q - kappa * kappa).max(0.0).sqrt();
                if k1 == 0.0 {
                    return Ok(0.0);
                }
                let compute = || -> Result<f64, KernelError> {
                    let kv = KVec::new(k1, 0.0);
                    let b = provider.b_matrix(freq, kv, kv)?;
                    let rc = provider.reflection(freq, k1)?;
                    let (_, rf) = pair.reflections(freq, k1)?;
                    let e = (-u).exp();
                    let ge = 1.0 - rc.r_e * rf.r_e * e;
                    let gm = 1.0 - rc.r_m * rf.r_m * e;
                    Ok((u / d) * (b.ee * rf.r_e * e / ge + b.mm * rf.r_m * e / gm))
                };
                match compute() {
                    Ok(v) => Ok(u * v),
                    Err(e) => {
                        *holder.lock().unwrap() = Some(e);
                        Err(NumericsError::NonFiniteIntegrand { abscissa: u })
                    }
                }
            },
            Interval::SemiInfinite { start: u0, scale: 1.0 },
            &spec,
        )
        .map_err(LifshitzError::from)?;
        let norm = 1.0 / (8.0 * std::f64::consts::PI * d * d);
        Ok(Observable { value: norm * radial.value, converged: radial.converged, terms_used: 1 })
    });
    match r {
        Ok(o) => Ok(o),
        Err(e) => {
            if let Some(ke) = holder.into_inner().unwrap() {
                return Err(ke);
            }
            Err(e.into())
        }
    }
}

/// β(d) = δ(d)/F_pp(d) and the building blocks of θ̂₁.
#[derive(Debug, Clone, Copy)]
pub struct BetaResult {
    pub beta: f64,
    pub delta: f64,
    pub delta_error: f64,
    pub gamma: f64,
    pub free_energy: f64,
    pub force: f64,
    pub gamma_check_rel: f64,
    pub converged: bool,
}

/// Convenience: everything θ̂₁ needs at one separation.
pub fn beta<P: KernelProvider>(
    provider: &P,
    pair: &PlatePair,
    d: f64,
    settings: &KernelSettings,
) -> Result<BetaResult, KernelError> {
    let coeffs = gradient_coefficients(provider, pair, d, settings)?;
    let fe = free_energy_pp(pair, d)?;
    let force = force_pp(pair, d)?;
    Ok(BetaResult {
        beta: coeffs.delta / fe.value,
        delta: coeffs.delta,
        delta_error: coeffs.delta_error,
        gamma: coeffs.gamma,
        free_energy: fe.value,
        force: force.value,
        gamma_check_rel: coeffs.gamma_check_rel,
        converged: coeffs.converged && fe.converged && force.converged,
    })
}
