//! Kramers–Kronig transform of tabulated Im ε(ω) to the imaginary axis,
//!
//! ```text
//! ε(iξ) = 1 + (2/π) ∫_0^∞ ω Im ε(ω) / (ω² + ξ²) dω,
//! ```
//!
//! with the integrand below the table minimum supplied by the Drude
//! extrapolation Im ε = Ωp²γ/(ω(ω²+γ²)) and above the table maximum by an
//! ω⁻³ tail matched at the last sample. A log-spaced cache in ξ avoids
//! re-evaluating the transform inside nested loops.

use std::sync::OnceLock;

use super::model::DrudeTail;
use super::table::OpticalTable;
use super::DielectricError;
use crate::numerics::{gauss_legendre, integrate, Interval, MonotoneCubic, QuadratureSpec};

/// Cache span and density; outside the span the transform is evaluated
/// directly. 512 points over 11 decades with a monotone cubic in log-log
/// keeps the interpolation error below 1e-6 relative.
const CACHE_XI_MIN: f64 = 1e-6;
const CACHE_XI_MAX: f64 = 1e5;
const CACHE_POINTS: usize = 512;

#[derive(Debug)]
pub(crate) struct KkTransform {
    table: OpticalTable,
    tail: DrudeTail,
    cache: OnceLock<MonotoneCubic>,
}

impl KkTransform {
    pub fn new(table: OpticalTable, tail: DrudeTail) -> Self {
        Self { table, tail, cache: OnceLock::new() }
    }

    /// ε(iξ) via the cache (built on first use).
    pub fn eps(&self, xi: f64) -> Result<f64, DielectricError> {
        if !(CACHE_XI_MIN..=CACHE_XI_MAX).contains(&xi) {
            return self.eps_direct(xi);
        }
        let cache = self.cache.get_or_init(|| {
            let mut lx = Vec::with_capacity(CACHE_POINTS);
            let mut ly = Vec::with_capacity(CACHE_POINTS);
            let lo = CACHE_XI_MIN.ln();
            let hi = CACHE_XI_MAX.ln();
            for i in 0..CACHE_POINTS {
                let l = lo + (hi - lo) * i as f64 / (CACHE_POINTS - 1) as f64;
                let e = self.eps_direct(l.exp()).expect("KK transform on cache grid");
                lx.push(l);
                ly.push(e.ln());
            }
            MonotoneCubic::new(lx, ly)
        });
        Ok(cache.eval(xi.ln()).exp())
    }

    /// Direct evaluation of the transform, split at the table boundaries and
    /// at ω = ξ when it falls inside a segment.
    pub fn eps_direct(&self, xi: f64) -> Result<f64, DielectricError> {
        let xi2 = xi * xi;
        let spec = QuadratureSpec::new(1e-9);
        // below the table: Drude integrand Ωp²γ / ((ω²+γ²)(ω²+ξ²))
        let (wp2, g) = (self.tail.plasma_freq * self.tail.plasma_freq, self.tail.relaxation);
        let low = integrate(
            |w| Ok(wp2 * g / ((w * w + g * g) * (w * w + xi2))),
            Interval::Finite(0.0, self.table.omega_min()),
            &spec,
        )?;

        // tabulated range, one Gauss panel per segment (the interpolant is a
        // power law per segment, smooth inside), extra split at ω = ξ
        let rule = gauss_legendre(24);
        let mut mid = 0.0;
        let omegas = self.table.omegas();
        for pair in omegas.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mut panels = [(a, b), (0.0, 0.0)];
            let mut npanels = 1;
            if xi > a && xi < b {
                panels = [(a, xi), (xi, b)];
                npanels = 2;
            }
            for &(pa, pb) in panels.iter().take(npanels) {
                let c = 0.5 * (pa + pb);
                let h = 0.5 * (pb - pa);
                let mut acc = 0.0;
                for (&x, &wt) in rule.0.iter().zip(rule.1.iter()) {
                    let w = c + h * x;
                    acc += wt * w * self.table.im_eps_at(w) / (w * w + xi2);
                }
                mid += acc * h;
            }
        }

        // tail: Im eps = A/ω³ matched at the last sample; substitute v = ωmax/ω
        let wmax = self.table.omega_max();
        let a_tail = self.table.im_eps_at(wmax) * wmax.powi(3);
        let mut tail = 0.0;
        for (&x, &wt) in rule.0.iter().zip(rule.1.iter()) {
            let v = 0.5 * (x + 1.0);
            tail += 0.5 * wt * a_tail * v * v / (wmax * (wmax * wmax + xi2 * v * v));
        }

        Ok(1.0 + 2.0 / std::f64::consts::PI * (low.value + mid + tail))
    }
}
