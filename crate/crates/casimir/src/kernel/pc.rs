//! Perfect-conductor scattering amplitudes: the ε → ∞ limit of the
//! dielectric expressions, taken analytically once. Only tangential-E
//! continuity survives, and all entries close in (k, q, κ).

use super::spm::BEntries;

/// First-order amplitudes for an ideal mirror.
pub fn pc_b_entries(kappa: f64, k_out: f64, k_in: f64, cos_x: f64, sin_x: f64) -> BEntries {
    let q1 = (k_in * k_in + kappa * kappa).sqrt();
    let q2 = (k_out * k_out + kappa * kappa).sqrt();
    let pref = (q1 / q2).sqrt();
    BEntries {
        ee: pref * (k_in * k_out + kappa * kappa * cos_x) / (q1 * q2),
        mm: -pref * cos_x,
        em: pref * kappa * sin_x / q2,
        me: pref * kappa * sin_x / q1,
    }
}

/// Symmetrized diagonal second-order amplitudes for an ideal mirror.
///
/// With k3² = 4k1² + k2² − 4k1k2c, q_i = √(k_i²+κ²) and W² = k2²(1−c²):
///
/// ```text
/// B2_M = −q2 − q3 + W² (1/q2 + 1/q3)
/// B2_E = q3 (2k1² + κ² − c k1k2)/q1²
///        + (c k2 − k1)(2k1³ + k1k2² + 2k1q1² − 3ck1²k2 − ck2q1²)/(q1² q3)
///        + [c²k1²k2² − c²k2²q1² − ck1³k2 − ck1k2³ + ck1k2(q1²+q2²)
///           + k1²k2² − k1²q2² + q1²q2²]/(q1² q2)
/// ```
pub fn pc_b2sym(kappa: f64, k1: f64, k2: f64, cos_x: f64) -> (f64, f64) {
    let mut c = cos_x.clamp(-1.0, 1.0);
    let mut k3sq = 4.0 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c;
    if k3sq + kappa * kappa < 1e-18 * (k1 * k1 + k2 * k2) {
        c -= 1e-8;
        k3sq = 4.0 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c;
    }
    let q1sq = k1 * k1 + kappa * kappa;
    let q2sq = k2 * k2 + kappa * kappa;
    let q2 = q2sq.sqrt();
    let q3 = (k3sq + kappa * kappa).sqrt();
    let w2 = k2 * k2 * (1.0 - c * c);

    let b2_m = -q2 - q3 + w2 * (1.0 / q2 + 1.0 / q3);

    let lin = (2.0 * k1 * k1 + kappa * kappa - c * k1 * k2) / q1sq;
    let inv = (c * k2 - k1)
        * (2.0 * k1.powi(3) + k1 * k2 * k2 + 2.0 * k1 * q1sq
            - 3.0 * c * k1 * k1 * k2
            - c * k2 * q1sq)
        / q1sq;
    let cst = (c * c * k1 * k1 * k2 * k2 - c * c * k2 * k2 * q1sq - c * k1.powi(3) * k2
        - c * k1 * k2.powi(3)
        + c * k1 * k2 * (q1sq + q2sq)
        + k1 * k1 * k2 * k2
        - k1 * k1 * q2sq
        + q1sq * q2sq)
        / (q1sq * q2);
    let b2_e = q3 * lin + inv / q3 + cst;
    (b2_e, b2_m)
}

/// κ = 0 limits used by the n = 0 Matsubara term.
pub fn pc_b_entries_static(k_out: f64, k_in: f64, cos_x: f64) -> BEntries {
    let pref = (k_in / k_out).sqrt();
    BEntries { ee: pref, mm: -pref * cos_x, em: 0.0, me: 0.0 }
}

/// κ = 0 limit of [`pc_b2sym`].
pub fn pc_b2sym_static(k1: f64, k2: f64, cos_x: f64) -> (f64, f64) {
    let mut c = cos_x.clamp(-1.0, 1.0);
    let mut k3sq = 4.0 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c;
    if k3sq < 1e-18 * (k1 * k1 + k2 * k2) {
        c -= 1e-8;
        k3sq = 4.0 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c;
    }
    let k3 = k3sq.sqrt();
    let w2 = k2 * k2 * (1.0 - c * c);
    let b2_e = k2 + k3;
    let b2_m = -k2 - k3 + w2 * (1.0 / k2 + 1.0 / k3);
    (b2_e, b2_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_identities() {
        let (kappa, k) = (0.9f64, 0.7f64);
        let q = (k * k + kappa * kappa).sqrt();
        let b = pc_b_entries(kappa, k, k, 1.0, 0.0);
        assert!((b.ee - 1.0).abs() < 1e-14);
        assert!((b.mm + 1.0).abs() < 1e-14);
        let (s2e, s2m) = pc_b2sym(kappa, k, k, 1.0);
        assert!((s2e - 2.0 * q).abs() < 1e-12);
        assert!((s2m + 2.0 * q).abs() < 1e-12);
        let (s2e0, s2m0) = pc_b2sym_static(k, k, 1.0);
        assert!((s2e0 - 2.0 * k).abs() < 1e-12);
        assert!((s2m0 + 2.0 * k).abs() < 1e-12);
    }

    #[test]
    fn matches_large_eps_dielectric() {
        use super::super::spm;
        let (kappa, k1, k2, c) = (0.9f64, 0.8f64, 1.7f64, 0.42f64);
        let s = (1.0f64 - c * c).sqrt();
        let eps = 1e9;
        let b = pc_b_entries(kappa, k2, k1, c, s);
        let bd = spm::b_entries(kappa, eps, k2, k1, c, s);
        for (a, b) in [(b.ee, bd.ee), (b.mm, bd.mm), (b.em, bd.em), (b.me, bd.me)] {
            assert!((a - b).abs() < 3e-4 * a.abs().max(0.1), "{a} vs {b}");
        }
        let (e1, m1) = pc_b2sym(kappa, k1, k2, c);
        let (e2, m2) = spm::b2sym(kappa, eps, k1, k2, c);
        assert!((e1 - e2).abs() < 2e-3 * e1.abs(), "{e1} vs {e2}");
        assert!((m1 - m2).abs() < 2e-3 * m1.abs(), "{m1} vs {m2}");
    }

    #[test]
    fn static_limit_continuity() {
        let (k1, k2, c) = (0.8f64, 1.7f64, 0.42f64);
        let (e, m) = pc_b2sym(1e-7, k1, k2, c);
        let (e0, m0) = pc_b2sym_static(k1, k2, c);
        assert!((e - e0).abs() < 1e-5 * e0.abs());
        assert!((m - m0).abs() < 1e-5 * m0.abs());
        let k3 = (4.0f64 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c).sqrt();
        assert!((e0 - (k2 + k3)).abs() < 1e-14);
    }
}
