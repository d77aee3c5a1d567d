//! Surface profiles, the PFA free-energy functional, the gradient-correction
//! functional, and the axisymmetric force-gradient correction θ̂₁.
//!
//! An axially symmetric profile is expanded about closest approach as
//! H(ρ) = d + ρ²/2R + c₁ρ⁴/2R³ + …, and the leading PFA correction to the
//! force gradient is
//!
//! ```text
//! ∂F/∂d = −2πR F_pp(d) (1 + θ̂₁ d/R),
//! θ̂₁ = F_pp(d)/(d F'_pp(d)) · (2β(d) − 4c₁),   β = δ/F_pp,
//! ```
//!
//! with δ(d) from the kernel module.

use thiserror::Error;

use crate::kernel::{beta, KernelError, KernelProvider, KernelSettings};
use crate::lifshitz::{force_pp, free_energy_pp, LifshitzError, Observable, PlatePair};
use crate::numerics::{integrate, Interval, MonotoneCubic, NumericsError, QuadratureSpec};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("profile parameter must be positive: {0}")]
    BadProfile(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Axially symmetric profile H(ρ) = d + ρ²/2R + c₁ρ⁴/2R³ + Σ_j c_j ρ^{2j+2}/2R^{2j+1}.
/// Higher coefficients beyond c₁ do not enter θ̂₁ at this order.
#[derive(Debug, Clone)]
pub struct AxisymmetricProfile {
    /// Closest separation d (nm).
    pub gap: f64,
    /// Curvature radius R (nm).
    pub radius: f64,
    /// Dimensionless quartic coefficient c₁.
    pub c1: f64,
    /// Optional higher even coefficients c₂, c₃, …
    pub higher: Vec<f64>,
}

impl AxisymmetricProfile {
    pub fn new(gap: f64, radius: f64, c1: f64) -> Result<Self, GeometryError> {
        if !(gap > 0.0) {
            return Err(GeometryError::BadProfile(format!("gap {gap} must be > 0")));
        }
        if !(radius > 0.0) {
            return Err(GeometryError::BadProfile(format!("radius {radius} must be > 0")));
        }
        Ok(Self { gap, radius, c1, higher: Vec::new() })
    }

    /// Sphere of radius R at gap d: c₁ = 1/4 (and c₂ = 1/8, kept for the
    /// profile itself though unused by θ̂₁).
    pub fn sphere(gap: f64, radius: f64) -> Result<Self, GeometryError> {
        let mut p = Self::new(gap, radius, 0.25)?;
        p.higher = vec![0.125];
        Ok(p)
    }

    /// Local separation H(ρ).
    pub fn height(&self, rho: f64) -> f64 {
        let r = self.radius;
        let x = rho / r;
        let mut h = self.gap + 0.5 * rho * rho / r + 0.5 * self.c1 * rho.powi(4) / r.powi(3);
        let mut pow = rho.powi(4) / r.powi(3);
        for c in &self.higher {
            pow *= x * x;
            h += 0.5 * c * pow;
        }
        h
    }

    /// dH/dρ.
    pub fn slope(&self, rho: f64) -> f64 {
        let r = self.radius;
        let x = rho / r;
        let mut s = rho / r + 2.0 * self.c1 * rho.powi(3) / r.powi(3);
        let mut pow = rho.powi(3) / r.powi(3);
        let mut order = 4.0;
        for c in &self.higher {
            pow *= x * x;
            order += 2.0;
            s += 0.5 * order * c * pow;
        }
        s
    }

    /// Radius at which H exceeds the integration cutoff d + 20·min(d, R).
    fn cutoff_radius(&self) -> (f64, f64) {
        let h_cut = self.gap + 20.0 * self.gap.min(self.radius);
        let mut hi = self.radius.min(self.gap.max(1.0));
        while self.height(hi) < h_cut {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.height(mid) < h_cut {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi), h_cut)
    }
}

/// A general height field over a bounded plane region, for profiles without
/// axial symmetry. Integrated on a product mesh with a mask; accuracy is set
/// by the mesh, not by adaptive refinement.
pub struct HeightField<H, G, M>
where
    H: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> (f64, f64) + Sync,
    M: Fn(f64, f64) -> bool + Sync,
{
    pub height: H,
    pub grad: G,
    pub mask: M,
    /// (x0, x1, y0, y1) bounding box in nm.
    pub bbox: (f64, f64, f64, f64),
    /// mesh points per axis
    pub mesh: (usize, usize),
}

/// Energy plus an explicit bound on the neglected tail beyond the radial
/// cutoff.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalResult {
    pub value: f64,
    pub tail_bound: f64,
    pub converged: bool,
}

/// PFA functional for an axisymmetric profile: 2π ∫ ρ F_pp(H(ρ)) dρ up to the
/// cutoff, with a power-law tail estimate reported (not added).
pub fn pfa_free_energy<P>(
    pair: &PlatePair,
    profile: &AxisymmetricProfile,
    _provider: &P,
) -> Result<FunctionalResult, GeometryError>
where
    P: KernelProvider,
{
    pfa_free_energy_profile(pair, profile)
}

/// Same as [`pfa_free_energy`] without needing a kernel provider.
pub fn pfa_free_energy_profile(
    pair: &PlatePair,
    profile: &AxisymmetricProfile,
) -> Result<FunctionalResult, GeometryError> {
    let (rho_c, h_cut) = profile.cutoff_radius();
    let holder = std::sync::Mutex::new(None::<GeometryError>);
    let spec = QuadratureSpec::new(1e-7);
    let r = integrate(
        |rho| {
            let h = profile.height(rho);
            match free_energy_pp(pair, h) {
                Ok(o) => Ok(2.0 * std::f64::consts::PI * rho * o.value),
                Err(e) => {
                    *holder.lock().unwrap() = Some(e.into());
                    Err(NumericsError::NonFiniteIntegrand { abscissa: rho })
                }
            }
        },
        Interval::Finite(0.0, rho_c),
        &spec,
    );
    let r = match r {
        Ok(v) => v,
        Err(e) => {
            if let Some(ge) = holder.into_inner().unwrap() {
                return Err(ge);
            }
            return Err(e.into());
        }
    };
    let tail = tail_bound(pair, profile, rho_c, h_cut)?;
    Ok(FunctionalResult { value: r.value, tail_bound: tail, converged: r.converged })
}

/// |∫_{ρc}^∞ 2πρ F_pp(H) dρ| estimated from the local power law of F_pp in H
/// and the paraboloidal area element 2πρ dρ ≈ 2πR dH.
fn tail_bound(
    pair: &PlatePair,
    profile: &AxisymmetricProfile,
    rho_c: f64,
    h_cut: f64,
) -> Result<f64, GeometryError> {
    let f1 = free_energy_pp(pair, h_cut)?.value;
    if f1 == 0.0 {
        return Ok(0.0);
    }
    let f2 = free_energy_pp(pair, 1.05 * h_cut)?.value;
    let p = -(f2 / f1).ln() / 1.05f64.ln();
    let area_factor = rho_c / profile.slope(rho_c).max(1e-300);
    let p_eff = p.max(1.5);
    Ok((2.0 * std::f64::consts::PI * area_factor * f1.abs() * h_cut / (p_eff - 1.0)).abs())
}

/// PFA functional for a general height field on its product mesh.
pub fn pfa_free_energy_field<H, G, M>(
    pair: &PlatePair,
    field: &HeightField<H, G, M>,
) -> Result<f64, GeometryError>
where
    H: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> (f64, f64) + Sync,
    M: Fn(f64, f64) -> bool + Sync,
{
    field_sum(field, |x, y| {
        let h = (field.height)(x, y);
        Ok(free_energy_pp(pair, h)?.value)
    })
}

fn field_sum<H, G, M>(
    field: &HeightField<H, G, M>,
    f: impl Fn(f64, f64) -> Result<f64, GeometryError>,
) -> Result<f64, GeometryError>
where
    H: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> (f64, f64) + Sync,
    M: Fn(f64, f64) -> bool + Sync,
{
    let (x0, x1, y0, y1) = field.bbox;
    let (nx, ny) = field.mesh;
    let dx = (x1 - x0) / nx as f64;
    let dy = (y1 - y0) / ny as f64;
    let mut total = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let x = x0 + (i as f64 + 0.5) * dx;
            let y = y0 + (j as f64 + 0.5) * dy;
            if (field.mask)(x, y) {
                total += f(x, y)? * dx * dy;
            }
        }
    }
    Ok(total)
}

/// δ(H) cached on a log grid in H with monotone cubic interpolation, plus the
/// measured interpolation error at probe points.
pub struct DeltaCache {
    interp: MonotoneCubic,
    pub interp_error: f64,
}

/// Number of cache nodes spanning the profile's H range.
const DELTA_CACHE_POINTS: usize = 32;

impl DeltaCache {
    pub fn build<P: KernelProvider>(
        provider: &P,
        pair: &PlatePair,
        h_min: f64,
        h_max: f64,
        settings: &KernelSettings,
    ) -> Result<Self, GeometryError> {
        let lo = (h_min * 0.999).ln();
        let hi = (h_max * 1.001).ln();
        let mut xs = Vec::with_capacity(DELTA_CACHE_POINTS);
        let mut ys = Vec::with_capacity(DELTA_CACHE_POINTS);
        for i in 0..DELTA_CACHE_POINTS {
            let l = lo + (hi - lo) * i as f64 / (DELTA_CACHE_POINTS - 1) as f64;
            let h = l.exp();
            let c = crate::kernel::gradient_coefficients(provider, pair, h, settings)?;
            xs.push(l);
            ys.push(c.delta);
        }
        let interp = MonotoneCubic::new(xs, ys);
        // measure the cache against direct evaluation at three probes
        let mut worst: f64 = 0.0;
        for frac in [0.23, 0.52, 0.81] {
            let l = lo + (hi - lo) * frac;
            let h = l.exp();
            let direct = crate::kernel::gradient_coefficients(provider, pair, h, settings)?.delta;
            let rel = ((interp.eval(l) - direct) / direct).abs();
            worst = worst.max(rel);
        }
        Ok(Self { interp, interp_error: worst })
    }

    pub fn delta(&self, h: f64) -> f64 {
        self.interp.eval(h.ln())
    }
}

/// Gradient-correction functional ∫ dx δ(H) |∇H|² for an axisymmetric
/// profile, with δ cached on a log grid in H.
pub fn gradient_correction<P: KernelProvider>(
    pair: &PlatePair,
    provider: &P,
    profile: &AxisymmetricProfile,
    settings: &KernelSettings,
) -> Result<FunctionalResult, GeometryError> {
    let (rho_c, h_cut) = profile.cutoff_radius();
    let cache = DeltaCache::build(provider, pair, profile.gap, h_cut, settings)?;
    let spec = QuadratureSpec::new(1e-7);
    let r = integrate(
        |rho| {
            let h = profile.height(rho);
            let s = profile.slope(rho);
            Ok(2.0 * std::f64::consts::PI * rho * cache.delta(h) * s * s)
        },
        Interval::Finite(0.0, rho_c),
        &spec,
    )?;
    // the integrand decays one power of H faster than the PFA term; reuse the
    // PFA tail bound scaled by the slope² at the cutoff as a coarse bound
    let slope2 = profile.slope(rho_c).powi(2);
    let tail = tail_bound(pair, profile, rho_c, h_cut)? * slope2;
    Ok(FunctionalResult {
        value: r.value,
        tail_bound: tail,
        converged: r.converged && cache.interp_error < 1e-2,
    })
}

/// Gradient correction for a general height field.
pub fn gradient_correction_field<P, H, G, M>(
    pair: &PlatePair,
    provider: &P,
    field: &HeightField<H, G, M>,
    settings: &KernelSettings,
) -> Result<f64, GeometryError>
where
    P: KernelProvider,
    H: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> (f64, f64) + Sync,
    M: Fn(f64, f64) -> bool + Sync,
{
    // H range over the mesh
    let (x0, x1, y0, y1) = field.bbox;
    let (nx, ny) = field.mesh;
    let mut h_min = f64::INFINITY;
    let mut h_max = 0.0f64;
    for i in 0..nx {
        for j in 0..ny {
            let x = x0 + (i as f64 + 0.5) * (x1 - x0) / nx as f64;
            let y = y0 + (j as f64 + 0.5) * (y1 - y0) / ny as f64;
            if (field.mask)(x, y) {
                let h = (field.height)(x, y);
                h_min = h_min.min(h);
                h_max = h_max.max(h);
            }
        }
    }
    let cache = DeltaCache::build(provider, pair, h_min, h_max, settings)?;
    field_sum(field, |x, y| {
        let h = (field.height)(x, y);
        let (gx, gy) = (field.grad)(x, y);
        Ok(cache.delta(h) * (gx * gx + gy * gy))
    })
}

/// Per-separation record for the θ̂₁ sweep.
#[derive(Debug, Clone, Copy)]
pub struct Theta1Result {
    pub d: f64,
    pub beta: f64,
    pub theta1: f64,
    pub free_energy: f64,
    pub force: f64,
    /// Propagated extrapolation error on θ̂₁.
    pub error: f64,
    pub gamma_check_rel: f64,
    pub converged: bool,
}

/// θ̂₁ = F_pp/(d F'_pp)·(2β − 4c₁) at separation d for quartic coefficient c₁.
pub fn theta1<P: KernelProvider>(
    pair: &PlatePair,
    provider: &P,
    d: f64,
    c1: f64,
    settings: &KernelSettings,
) -> Result<Theta1Result, GeometryError> {
    let b = beta(provider, pair, d, settings)?;
    let ratio = b.free_energy / (d * b.force);
    let theta = ratio * (2.0 * b.beta - 4.0 * c1);
    let error = (ratio * 2.0 * b.delta_error / b.free_energy).abs();
    Ok(Theta1Result {
        d,
        beta: b.beta,
        theta1: theta,
        free_energy: b.free_energy,
        force: b.force,
        error,
        gamma_check_rel: b.gamma_check_rel,
        converged: b.converged,
    })
}

/// Force-gradient correction for an axisymmetric profile.
#[derive(Debug, Clone, Copy)]
pub struct ForceGradient {
    /// ∂F/∂d in eV/nm².
    pub value: f64,
    pub theta1: Theta1Result,
    /// d/R exceeded 0.1; the d/R expansion is dubious there.
    pub expansion_suspect: bool,
}

/// ∂F/∂d = −2πR F_pp(d) (1 + θ̂₁ d/R).
pub fn force_gradient<P: KernelProvider>(
    pair: &PlatePair,
    provider: &P,
    d: f64,
    radius: f64,
    c1: f64,
    settings: &KernelSettings,
) -> Result<ForceGradient, GeometryError> {
    if !(radius > 0.0) {
        return Err(GeometryError::BadProfile(format!("radius {radius} must be > 0")));
    }
    let t = theta1(pair, provider, d, c1, settings)?;
    let f = force_pp(pair, d)?;
    let value = -2.0 * std::f64::consts::PI * radius * f.value * (1.0 + t.theta1 * d / radius);
    Ok(ForceGradient { value, theta1: t, expansion_suspect: d / radius > 0.1 })
}

/// Re-export for callers computing PFA energies without a provider.
pub fn pfa_energy(pair: &PlatePair, profile: &AxisymmetricProfile) -> Result<f64, GeometryError> {
    Ok(pfa_free_energy_profile(pair, profile)?.value)
}

#[allow(unused_imports)]
pub(crate) use crate::lifshitz::Observable as LifshitzObservable;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::HBAR_C;
    use crate::dielectric::PermittivityModel;
    use crate::lifshitz::FrequencyGrid;

    #[test]
    fn sphere_profile_expansion() {
        let p = AxisymmetricProfile::sphere(10.0, 1000.0).unwrap();
        // exact sphere height d + R − sqrt(R² − ρ²) at small ρ/R
        for rho in [1.0, 30.0, 100.0] {
            let exact = 10.0 + 1000.0 - (1000.0f64 * 1000.0 - rho * rho).sqrt();
            let approx = p.height(rho);
            assert!(
                (approx - exact).abs() < 1e-6 * exact + 1e-9,
                "rho={rho}: {approx} vs {exact}"
            );
        }
    }

    #[test]
    fn flat_disc_field_reproduces_area_times_pp() {
        let pair = PlatePair::symmetric(PermittivityModel::PerfectConductor, FrequencyGrid::ZeroT);
        let d = 50.0;
        let radius = 200.0;
        let field = HeightField {
            height: |_x: f64, _y: f64| 50.0,
            grad: |_x, _y| (0.0, 0.0),
            mask: |x: f64, y: f64| x * x + y * y <= 200.0f64 * 200.0,
            bbox: (-200.0, 200.0, -200.0, 200.0),
            mesh: (160, 160),
        };
        let e = pfa_free_energy_field(&pair, &field).unwrap();
        let fpp = crate::lifshitz::free_energy_pp(&pair, d).unwrap().value;
        let area = std::f64::consts::PI * radius * radius;
        assert!(((e - area * fpp) / (area * fpp)).abs() < 5e-3, "{e} vs {}", area * fpp);
    }

    #[test]
    fn paraboloid_pfa_closed_form() {
        // perfect conductors at T=0: F_pp = −C/H³, paraboloid c1=0:
        // E = 2π ∫ ρ F(d+ρ²/2R) dρ = 2πR ∫_d^∞ F dH = −πRC/d²
        let pair = PlatePair::symmetric(PermittivityModel::PerfectConductor, FrequencyGrid::ZeroT);
        let d = 20.0;
        let radius = 4000.0;
        let profile = AxisymmetricProfile::new(d, radius, 0.0).unwrap();
        let got = pfa_free_energy_profile(&pair, &profile).unwrap();
        let c = std::f64::consts::PI.powi(2) * HBAR_C / 720.0;
        let want = -std::f64::consts::PI * radius * c / (d * d);
        // tail cut at H = 21 d contributes ~ (1/21)² ≈ 2e-3 of the energy
        assert!(
            ((got.value - want) / want).abs() < 3e-3,
            "{} vs {want} (tail {})",
            got.value,
            got.tail_bound
        );
        assert!(got.tail_bound > 0.0 && got.tail_bound < 0.01 * want.abs());
    }

    #[test]
    fn vacuum_profile_energies_vanish() {
        let vac = PermittivityModel::constant(1.0).unwrap();
        let pair = PlatePair::symmetric(vac, FrequencyGrid::ZeroT);
        let profile = AxisymmetricProfile::sphere(20.0, 500.0).unwrap();
        let e = pfa_free_energy_profile(&pair, &profile).unwrap();
        assert_eq!(e.value, 0.0);
    }
}
