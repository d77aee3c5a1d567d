//! Perturbative scattering amplitudes of a gently deformed dielectric
//! interface at imaginary frequency, to second order in the deformation.
//!
//! The body (permittivity ε) fills z > h(x), vacuum below; modes are labeled
//! by in-plane momentum and polarization Q ∈ {E, M} (transverse magnetic /
//! electric). With f = e^{i P·x + σz}, the mode fields are
//!
//! ```text
//! M:  E = m̂ f,                        H = −(1/κ)(i n ẑ − σ k̂) f
//! E:  H = m̂ f,                        E = (1/(εκ))(i n ẑ − σ k̂) f
//! ```
//!
//! (n = |P|, m̂ = ẑ×k̂). Tangential continuity at z = h(x) is expanded to
//! second order about z = 0 for a two-mode corrugation
//! h = a₁e^{iu·x} + a₂e^{−iu·x}; each order reduces to decoupled 2×2 solves
//! per outgoing channel. In-plane field components are real and z-components
//! imaginary at imaginary frequency, so the assembly below stores the
//! imaginary part of the z-components and stays entirely in real arithmetic.
//!
//! First order gives the closed forms in [`b_entries`]; the second-order
//! specular amplitude gives the symmetrized diagonal kernel
//! (B₂)_{QQ}(k,k;k″) in [`b2sym`]. Conventions follow the T-operator
//! expansion T = r + √(q q′)(−2B h̃ + ∫B₂ h̃ h̃): a uniform shift a of the
//! surface must reproduce r e^{−2qa}, which pins B(k,k) = r_Q and
//! B₂(k,k;k) = 2q r_Q; both are asserted in tests.

/// First-order amplitudes B_{QQ'}(k_out ← k_in); `sin_x` is the signed sine
/// of the angle from k_in to k_out.
#[derive(Debug, Clone, Copy)]
pub struct BEntries {
    pub ee: f64,
    pub em: f64,
    pub me: f64,
    pub mm: f64,
}

/// Closed-form first-order amplitudes for permittivity `eps` at κ = ξ/ħc.
pub fn b_entries(kappa: f64, eps: f64, k_out: f64, k_in: f64, cos_x: f64, sin_x: f64) -> BEntries {
    let q1 = (k_in * k_in + kappa * kappa).sqrt();
    let q2 = (k_out * k_out + kappa * kappa).sqrt();
    let s1 = (k_in * k_in + eps * kappa * kappa).sqrt();
    let s2 = (k_out * k_out + eps * kappa * kappa).sqrt();
    let pref = (q1 / q2).sqrt() * (eps - 1.0);
    BEntries {
        ee: pref * (eps * k_in * k_out + cos_x * s1 * s2) / ((eps * q1 + s1) * (eps * q2 + s2)),
        mm: -pref * kappa * kappa * cos_x / ((q1 + s1) * (q2 + s2)),
        em: pref * kappa * s2 * sin_x / ((q1 + s1) * (eps * q2 + s2)),
        me: pref * kappa * s1 * sin_x / ((eps * q1 + s1) * (q2 + s2)),
    }
}

#[derive(Debug, Clone, Copy)]
struct Channel {
    p: [f64; 2],
    n: f64,
    q: f64,
    s: f64,
}

impl Channel {
    fn new(px: f64, py: f64, kappa: f64, eps: f64) -> Self {
        let n = px.hypot(py);
        Self {
            p: [px, py],
            n,
            q: (n * n + kappa * kappa).sqrt(),
            s: (n * n + eps * kappa * kappa).sqrt(),
        }
    }

    fn khat(&self) -> [f64; 2] {
        [self.p[0] / self.n, self.p[1] / self.n]
    }

    fn mhat(&self) -> [f64; 2] {
        [-self.p[1] / self.n, self.p[0] / self.n]
    }
}

/// One plane-wave mode: in-plane parts are real, z-parts imaginary (stored as
/// their imaginary part).
#[derive(Debug, Clone, Copy)]
struct Mode {
    sigma: f64,
    e_par: [f64; 2],
    e_z_im: f64,
    h_par: [f64; 2],
    h_z_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pol {
    E,
    M,
}

fn mode(ch: &Channel, sigma: f64, pol: Pol, e_med: f64, kappa: f64) -> Mode {
    let kh = ch.khat();
    let mh = ch.mhat();
    // rot = i n ẑ − σ k̂ from ∇×(m̂ f)
    let rot_par = [-sigma * kh[0], -sigma * kh[1]];
    let rot_z_im = ch.n;
    match pol {
        Pol::M => Mode {
            sigma,
            e_par: mh,
            e_z_im: 0.0,
            h_par: [-rot_par[0] / kappa, -rot_par[1] / kappa],
            h_z_im: -rot_z_im / kappa,
        },
        Pol::E => Mode {
            sigma,
            e_par: [rot_par[0] / (e_med * kappa), rot_par[1] / (e_med * kappa)],
            e_z_im: rot_z_im / (e_med * kappa),
            h_par: mh,
            h_z_im: 0.0,
        },
    }
}

fn vac_up(ch: &Channel, pol: Pol, kappa: f64) -> Mode {
    mode(ch, -ch.q, pol, 1.0, kappa)
}

fn vac_dn(ch: &Channel, pol: Pol, kappa: f64) -> Mode {
    mode(ch, ch.q, pol, 1.0, kappa)
}

fn med_up(ch: &Channel, pol: Pol, eps: f64, kappa: f64) -> Mode {
    mode(ch, -ch.s, pol, eps, kappa)
}

/// In-plane source vectors of one continuity order, for E and H.
#[derive(Debug, Clone, Copy, Default)]
struct Sources {
    e: [f64; 2],
    h: [f64; 2],
}

/// (amplitude, mode, region sign): +1 vacuum side, −1 medium side.
type Entry = (f64, Mode, f64);

/// Amplitudes of the four unknown modes of one outgoing channel.
#[derive(Debug, Clone, Copy)]
struct BlockSolution {
    r_e: f64,
    r_m: f64,
    t_e: f64,
    t_m: f64,
}

/// Solve the tangential-continuity block at channel `ch` given projected
/// sources. The TE and TM sub-blocks decouple in the (m̂, k̂) frame.
fn solve_block(ch: &Channel, eps: f64, kappa: f64, src: &Sources) -> BlockSolution {
    let mh = ch.mhat();
    let kh = ch.khat();
    let dot = |v: [f64; 2], w: [f64; 2]| v[0] * w[0] + v[1] * w[1];
    let se_m = dot(src.e, mh);
    let se_k = dot(src.e, kh);
    let sh_m = dot(src.h, mh);
    let sh_k = dot(src.h, kh);
    let r_m = -(ch.s * se_m + kappa * sh_k) / (ch.q + ch.s);
    let t_m = r_m + se_m;
    let r_e = (eps * kappa * se_k - ch.s * sh_m) / (eps * ch.q + ch.s);
    let t_e = r_e + sh_m;
    BlockSolution { r_e, r_m, t_e, t_m }
}

fn block_modes(sol: &BlockSolution, ch: &Channel, eps: f64, kappa: f64) -> [Entry; 4] {
    [
        (sol.r_e, vac_dn(ch, Pol::E, kappa), 1.0),
        (sol.r_m, vac_dn(ch, Pol::M, kappa), 1.0),
        (sol.t_e, med_up(ch, Pol::E, eps, kappa), -1.0),
        (sol.t_m, med_up(ch, Pol::M, eps, kappa), -1.0),
    ]
}

/// h ∂_z + ∇h·(z-component) source of first order: per zeroth-order mode,
/// region·amp·(σ V_par − u_c V_z_im) for the e^{+iu·x} channel (the i from
/// ∇h and the i of the z-components combine to a real −1).
fn first_order_sources(zeroth: &[Entry], u: [f64; 2]) -> Sources {
    let mut s = Sources::default();
    for (amp, md, region) in zeroth {
        let w = region * amp;
        for c in 0..2 {
            s.e[c] += w * (md.sigma * md.e_par[c] - u[c] * md.e_z_im);
            s.h[c] += w * (md.sigma * md.h_par[c] - u[c] * md.h_z_im);
        }
    }
    s
}

/// The symmetrized diagonal second-order amplitudes
/// B2sym_Q(k1; k2) = ½[B₂(k,k;k″) + B₂(k,k;2k−k″)], |k| = k1, |k″| = k2,
/// cos∠(k,k″) = c, for both polarizations at once.
pub fn b2sym(kappa: f64, eps: f64, k1: f64, k2: f64, cos_x: f64) -> (f64, f64) {
    // nudge the angle when the partner channel 2k−k″ degenerates to zero
    let mut c = cos_x.clamp(-1.0, 1.0);
    let k3sq = 4.0 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c;
    if k3sq < 1e-18 * (k1 * k1 + k2 * k2) {
        c -= 1e-8;
    }
    let sin_x = (1.0 - c * c).max(0.0).sqrt();
    let ux = k2 * c - k1;
    let uy = k2 * sin_x;

    let ch0 = Channel::new(k1, 0.0, kappa, eps);
    let chp = Channel::new(k1 + ux, uy, kappa, eps);
    let chm = Channel::new(k1 - ux, -uy, kappa, eps);

    let mut out = [0.0f64; 2];
    for (idx, pol) in [Pol::E, Pol::M].into_iter().enumerate() {
        let inc = vac_up(&ch0, pol, kappa);

        // flat order: the incident field itself is the source
        let flat_src = Sources { e: inc.e_par, h: inc.h_par };
        let flat = solve_block(&ch0, eps, kappa, &flat_src);
        let mut zeroth: Vec<Entry> = vec![(1.0, inc, 1.0)];
        zeroth.extend(block_modes(&flat, &ch0, eps, kappa));

        // first order at both roughness channels
        let sp = first_order_sources(&zeroth, [ux, uy]);
        let first_p = solve_block(&chp, eps, kappa, &sp);
        let plus = block_modes(&first_p, &chp, eps, kappa);
        let sm = first_order_sources(&zeroth, [-ux, -uy]);
        let first_m = solve_block(&chm, eps, kappa, &sm);
        let minus = block_modes(&first_m, &chm, eps, kappa);

        // second order back at the incident channel:
        //   zeroth modes contribute σ² V (from h²/2 ∂²_z),
        //   first-order modes contribute σ V ± u_c V_z_im
        let mut src = Sources::default();
        for (amp, md, region) in &zeroth {
            let w = region * amp;
            for c in 0..2 {
                src.e[c] += w * md.sigma * md.sigma * md.e_par[c];
                src.h[c] += w * md.sigma * md.sigma * md.h_par[c];
            }
        }
        for (amp, md, region) in &plus {
            let w = region * amp;
            for (c, u_c) in [ux, uy].into_iter().enumerate() {
                src.e[c] += w * (md.sigma * md.e_par[c] + u_c * md.e_z_im);
                src.h[c] += w * (md.sigma * md.h_par[c] + u_c * md.h_z_im);
            }
        }
        for (amp, md, region) in &minus {
            let w = region * amp;
            for (c, u_c) in [ux, uy].into_iter().enumerate() {
                src.e[c] += w * (md.sigma * md.e_par[c] - u_c * md.e_z_im);
                src.h[c] += w * (md.sigma * md.h_par[c] - u_c * md.h_z_im);
            }
        }
        let second = solve_block(&ch0, eps, kappa, &src);
        out[idx] = match pol {
            Pol::E => second.r_e,
            Pol::M => second.r_m,
        } / (2.0 * ch0.q);
    }
    (out[0], out[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fresnel(kappa: f64, eps: f64, k: f64) -> (f64, f64) {
        let q = (k * k + kappa * kappa).sqrt();
        let s = (k * k + eps * kappa * kappa).sqrt();
        ((eps * q - s) / (eps * q + s), (q - s) / (q + s))
    }

    #[test]
    fn shift_identity_first_order() {
        // B_{QQ}(k,k) = r_Q, off-diagonal vanishes in the specular direction
        let (kappa, eps, k) = (0.8f64, 7.0f64, 0.6f64);
        let b = b_entries(kappa, eps, k, k, 1.0, 0.0);
        let (re, rm) = fresnel(kappa, eps, k);
        assert!((b.ee - re).abs() < 1e-14);
        assert!((b.mm - rm).abs() < 1e-14);
        assert_eq!(b.em, 0.0);
        assert_eq!(b.me, 0.0);
    }

    #[test]
    fn shift_identity_second_order() {
        // B₂(k,k;k) = 2 q r_Q
        let (kappa, eps, k) = (1.1f64, 4.0f64, 0.9f64);
        let q = (k * k + kappa * kappa).sqrt();
        let (re, rm) = fresnel(kappa, eps, k);
        let (s2e, s2m) = b2sym(kappa, eps, k, k, 1.0);
        assert!((s2e - 2.0 * q * re).abs() < 1e-12 * (2.0 * q).abs());
        assert!((s2m - 2.0 * q * rm).abs() < 1e-12 * (2.0 * q).abs());
    }

    #[test]
    fn reciprocity_with_q_weights() {
        // q_out B_{QQ'}(out,in) = q_in B_{Q'Q}(in,out)
        let (kappa, eps) = (0.77f64, 11.3f64);
        let (k1, k2, c) = (0.63f64, 1.21f64, 0.34f64);
        let s = (1.0f64 - c * c).sqrt();
        let q1 = (k1 * k1 + kappa * kappa).sqrt();
        let q2 = (k2 * k2 + kappa * kappa).sqrt();
        let fw = b_entries(kappa, eps, k2, k1, c, s);
        let bw = b_entries(kappa, eps, k1, k2, c, s);
        assert!((q2 * fw.ee - q1 * bw.ee).abs() < 1e-12);
        assert!((q2 * fw.mm - q1 * bw.mm).abs() < 1e-12);
        assert!((q2 * fw.em - q1 * bw.me).abs() < 1e-12);
        assert!((q2 * fw.me - q1 * bw.em).abs() < 1e-12);
    }

    #[test]
    fn cross_polarization_is_odd_in_the_angle() {
        let (kappa, eps) = (0.5f64, 3.0f64);
        let (k1, k2, c) = (0.4f64, 0.9f64, 0.2f64);
        let s = (1.0f64 - c * c).sqrt();
        let plus = b_entries(kappa, eps, k2, k1, c, s);
        let minus = b_entries(kappa, eps, k2, k1, c, -s);
        assert_eq!(plus.ee, minus.ee);
        assert_eq!(plus.mm, minus.mm);
        assert!((plus.em + minus.em).abs() < 1e-15);
        assert!((plus.me + minus.me).abs() < 1e-15);
    }

    #[test]
    fn b2_partner_channel_symmetry() {
        // B2sym(k1;k2) at angle c equals B2sym(k1;k3) at the partner angle
        let (kappa, eps) = (0.9f64, 6.0f64);
        let (k1, k2, c) = (0.8f64, 1.7f64, 0.42f64);
        let k3 = (4.0 * k1 * k1 + k2 * k2 - 4.0 * k1 * k2 * c).sqrt();
        let c3 = (2.0 * k1 - k2 * c) / k3;
        let a = b2sym(kappa, eps, k1, k2, c);
        let b = b2sym(kappa, eps, k1, k3, c3);
        assert!((a.0 - b.0).abs() < 1e-11 * a.0.abs());
        assert!((a.1 - b.1).abs() < 1e-11 * a.1.abs().max(1e-3));
    }
}
