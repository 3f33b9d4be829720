//! Readout (anti-Stokes) phase: correlations at the start of the readout,
//! the exact `(a, ã)` covariance and its approximations.
//!
//! Readout formulas take `t_r`, the time since the readout pulse started
//! at `Δτ = τ₁ + τ_d`; [`analytic_readout_covariance`] takes absolute time.

use num_complex::Complex64;

use super::coefficients::{mode_coefficients, Variant};
use super::write::write_moments;
use crate::error::{Error, Result};
use crate::gaussian::BlockDecomposition;
use crate::model::{ProtocolTimeline, SystemParams};

/// Stokes/phonon statistics at the start of the readout.
///
/// `c_ns = Im⟨ab + ba⟩` is the cross-correlation entering the readout
/// rate; `c_re = Re⟨ab + ba⟩` is its in-phase partner, needed for the
/// exact covariance when the modes are detuned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutCorrelations {
    pub n_s: f64,
    pub n_b: f64,
    pub c_ns: f64,
    pub c_re: f64,
}

impl ReadoutCorrelations {
    /// `⟨ab + ba⟩/2`.
    pub fn m_ab(&self) -> Complex64 {
        Complex64::new(self.c_re, self.c_ns) / 2.0
    }

    /// `η² = g̃²(C² − 4 n_b n_s)/(1 + 2n_s)`.
    pub fn eta_sq(&self, g_tilde: f64) -> f64 {
        g_tilde * g_tilde * (self.c_ns * self.c_ns - 4.0 * self.n_b * self.n_s) / (1.0 + 2.0 * self.n_s)
    }
}

/// Correlations at `τ₁ + τ_d` after a write pulse of length `τ₁` from
/// vacuum ⊗ thermal(n_th) and a free delay `τ_d`.
pub fn readout_correlations(params: &SystemParams, tau1: f64, tau_d: f64) -> Result<ReadoutCorrelations> {
    if !(tau1 >= 0.0 && tau_d >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau1 = {tau1}, tau_d = {tau_d} must be >= 0")));
    }
    let w = write_moments(params, tau1, params.n_th())?;
    Ok(readout_correlations_from(params, w.v11 - 0.5, w.v33 - 0.5, w.m_ab, tau_d))
}

/// Applies the delay to write-phase statistics `(n_s, n_b, ⟨ab+ba⟩/2)`:
/// the Stokes light decays at γ̃, the phonon relaxes toward n_th at Γ and
/// the cross term picks up `e^{−(γ̃/2 + iΔa)τ_d}·e^{−(Γ/2 + iΔb)τ_d}`.
pub fn readout_correlations_from(
    params: &SystemParams,
    n_s: f64,
    n_b: f64,
    m_ab: Complex64,
    tau_d: f64,
) -> ReadoutCorrelations {
    let (da, db) = params.detunings();
    let (gt, big) = (params.gamma_tilde(), params.gamma_ac);
    let n = params.n_th();
    let decay_b = (-big * tau_d).exp();
    let phase = Complex64::new(-(gt + big) / 2.0 * tau_d, -(da + db) * tau_d).exp();
    let m = m_ab * phase;
    ReadoutCorrelations {
        n_s: (n_s * (-gt * tau_d).exp()).max(0.0),
        n_b: (n_b * decay_b - n * (-big * tau_d).exp_m1()).max(0.0),
        c_ns: 2.0 * m.im,
        c_re: 2.0 * m.re,
    }
}

/// Exact `(a, ã)` covariance `t_r` after the readout starts, with the
/// anti-Stokes mode initially in vacuum.
pub fn analytic_readout_covariance_since(
    params: &SystemParams,
    corr: &ReadoutCorrelations,
    t_r: f64,
) -> Result<BlockDecomposition> {
    if !(t_r >= 0.0) {
        return Err(Error::InvalidArgument(format!("readout time {t_r} must be >= 0")));
    }
    let c = mode_coefficients(params, Variant::Readout)?;
    let [_, gg] = c.readout_terms();
    let g_amp = c.eval(gg, t_r);
    let (da, _) = params.detunings();
    let gt = params.gamma_tilde();
    let n = params.n_th();

    let v11 = corr.n_s * (-gt * t_r).exp() + 0.5;
    let v33 = corr.n_b * g_amp.norm_sqr() + params.gamma_ac * n * c.cross_integral(gg, gg, t_r).re + 0.5;
    let a_decay = Complex64::new(-gt / 2.0 * t_r, -da * t_r).exp();
    let m = a_decay * g_amp * corr.m_ab();
    Ok(BlockDecomposition::from_elements(v11, v33, m.re, m.im))
}

/// [`analytic_readout_covariance_since`] at absolute time `t ≥ τ₁ + τ_d`.
pub fn analytic_readout_covariance(
    params: &SystemParams,
    corr: &ReadoutCorrelations,
    timeline: &ProtocolTimeline,
    t: f64,
) -> Result<BlockDecomposition> {
    let start = timeline.readout_start();
    if t < start {
        return Err(Error::InvalidArgument(format!(
            "t = {t:e} precedes the readout start {start:e}"
        )));
    }
    analytic_readout_covariance_since(params, corr, t - start)
}

/// Transferred anti-Stokes occupancy `½e^{−(γ+Γ)t/2}[1 − cos 2g̃t]·n_b`.
pub fn nas_transferred(g_tilde: f64, gamma: f64, gamma_ac: f64, n_b: f64, t: f64) -> f64 {
    let s = (g_tilde * t).sin();
    // 1 − cos 2x = 2 sin²x
    (-(gamma + gamma_ac) * t / 2.0).exp() * s * s * n_b
}

/// `½[1 − η²t² + ⅔ g̃²(Γn)t³]`.
pub fn lambda_tilde_minus_cubic(
    g_tilde: f64,
    gamma_ac: f64,
    n_th: f64,
    corr: &ReadoutCorrelations,
    t_r: f64,
) -> f64 {
    let eta2 = corr.eta_sq(g_tilde);
    0.5 * (1.0 - eta2 * t_r * t_r + 2.0 / 3.0 * g_tilde * g_tilde * gamma_ac * n_th * t_r.powi(3))
}

/// Higher-order readout approximant `|Σ η₁ₖ t^k / Σ η₂ₖ t^k|` with numerator
/// of degree 12 and denominator of degree 14. Since `η₁₀/η₂₀ = ½` this is
/// already normalized to `λ̃₋(0) = ½`.
pub fn lambda_tilde_minus_poly(
    g_tilde: f64,
    gamma_ac: f64,
    n_th: f64,
    corr: &ReadoutCorrelations,
    t_r: f64,
) -> f64 {
    let (num, den) = poly_coefficients(g_tilde, gamma_ac, n_th, corr);
    let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &k| acc * t_r + k);
    (horner(&num) / horner(&den)).abs()
}

fn poly_coefficients(g_tilde: f64, big: f64, nt: f64, corr: &ReadoutCorrelations) -> ([f64; 13], [f64; 15]) {
    let (ns, nb) = (corr.n_s, corr.n_b);
    let c2 = corr.c_ns * corr.c_ns;
    let q = 3.0 + 8.0 * ns + 4.0 * ns * ns;
    let s1 = 1.0 + 2.0 * ns;
    let gp = |k: i32| g_tilde.powi(k);

    let num = [
        (1.0 + 3.0 * ns + 2.0 * ns * ns) / 4.0,
        -big / 16.0 * q,
        gp(2) * (nb * q - (1.0 + ns) * c2) / 4.0,
        big * gp(2)
            * ((3.0 + 2.0 * ns) * (2.0 + 4.0 * ns + 3.0 * c2) + 4.0 * nt * q
                - 6.0 * nb * (5.0 + 12.0 * ns + 4.0 * ns * ns))
            / 48.0,
        gp(4) * (6.0 * nb * nb * s1 - nb * q + (1.0 + ns - 3.0 * nb) * c2) / 12.0,
        -big * gp(4) * s1 * (3.0 + 2.0 * ns + 5.0 * nb * (12.0 * nb - 2.0 * ns - 9.0) + nt * (6.0 - 40.0 * nb + 4.0 * ns))
            / 120.0
            - big * gp(4) * (5.0 + 4.0 * nt - 12.0 * nb + 2.0 * ns) / 48.0 * c2,
        gp(6) * (nb * q - 30.0 * nb * nb * s1 - (1.0 + ns - 15.0 * nb) * c2) / 90.0,
        big * gp(6) * s1
            * (3.0 + 420.0 * nb * nb + 2.0 * ns - 7.0 * nb * (21.0 + 2.0 * ns) + 2.0 * nt * (3.0 - 112.0 * nb + 2.0 * ns))
            / 1260.0
            + big * gp(6) * (11.0 + 16.0 * nt - 60.0 * nb + 2.0 * ns) / 360.0 * c2,
        gp(8) * (126.0 * nb * nb * s1 - nb * q + (1.0 + ns - 63.0 * nb) * c2) / 120.0,
        -big * gp(8) * s1
            * (3.0 + 2.0 * ns + 3.0 * nb * (756.0 * nb - 6.0 * ns - 179.0) + 2.0 * nt * (3.0 - 492.0 * nb + 2.0 * ns))
            / 22680.0
            - big * gp(8) * (91.0 + 164.0 * nt - 756.0 * nb + 6.0 * ns) / 15120.0 * c2,
        gp(10) * (nb * q - 510.0 * nb * nb * s1 - (1.0 + ns - 256.0 * nb) * c2) / 28350.0,
        big * gp(10) * (nb * s1 * (-3.0 + 4.0 * nt + 1020.0 * nb - 2.0 * ns) + (1.0 - nt - 510.0 * nb + ns) * c2)
            / 56700.0,
        gp(12) * nb * s1 * (2.0 * nt + 1023.0 * nb) / 467775.0 - gp(12) * (nt + 1023.0 * nb) * c2 / 935550.0,
    ];
    let p2 = 3.0 + 2.0 * ns;
    let den = [
        (1.0 + 3.0 * ns + 2.0 * ns * ns) / 2.0,
        -big * p2 / 8.0,
        gp(2) * (2.0 * nb * p2 + c2) / 4.0,
        big * gp(2) * (6.0 + 4.0 * ns + 4.0 * nt * p2 - 6.0 * nb * (5.0 + 2.0 * ns) - 3.0 * c2) / 24.0,
        gp(4) * (12.0 * nb * nb - 2.0 * nb * p2 - c2) / 12.0,
        big * gp(4) * (-3.0 - 2.0 * ns - 5.0 * nb * (12.0 * nb - 9.0 - 2.0 * ns) + nt * (-6.0 + 40.0 * nb - 4.0 * ns))
            / 60.0,
        gp(6) * (-60.0 * nb * nb + 2.0 * nb * p2 + c2) / 90.0,
        big * gp(6)
            * (6.0 + 4.0 * ns + 14.0 * nb * (60.0 * nb - 21.0 - 2.0 * ns) + 4.0 * nt * (3.0 - 112.0 * nb + 2.0 * ns)
                - 7.0 * c2)
            / 1260.0,
        gp(8) * (252.0 * nb * nb - 2.0 * nb * p2 - c2) / 1260.0,
        big * gp(8)
            * (-6.0 - 4.0 * ns - 6.0 * nb * (756.0 * nb - 6.0 * ns - 179.0) + 4.0 * nt * (-3.0 + 492.0 * nb - 2.0 * ns)
                + 9.0 * c2)
            / 22680.0,
        gp(10) * (2.0 * nb * p2 - 1020.0 * nb * nb + c2) / 28350.0,
        -big * gp(10) * (2.0 * nb * (3.0 - 4.0 * nt + 2.0 * ns) - 2040.0 * nb * nb + c2) / 56700.0,
        gp(12) * nb * (2.0 * nt + 1023.0 * nb) / 233888.0,
        -big * gp(12) * nb * (2.0 * nt + 1023.0 * nb) / 233888.0,
        -gp(14) * nb * nb / 2598.0,
    ];
    (num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(n_s: f64, n_b: f64, c_ns: f64) -> ReadoutCorrelations {
        ReadoutCorrelations { n_s, n_b, c_ns, c_re: 0.0 }
    }

    #[test]
    fn no_write_pulse() {
        let p = SystemParams::reference_point();
        for tau_d in [0.0, 1e-9, 1e-6] {
            let c = readout_correlations(&p, 0.0, tau_d).unwrap();
            assert_eq!(c.n_s, 0.0);
            assert!((c.n_b - p.n_th()).abs() < 1e-12 * p.n_th());
            assert_eq!(c.c_ns, 0.0);
        }
        let mut p0 = p;
        p0.g = 0.0;
        let c = readout_correlations(&p0, 5e-9, 1e-10).unwrap();
        assert!(c.n_s.abs() < 1e-14 && c.c_ns.abs() < 1e-14);
    }

    #[test]
    fn readout_start_is_vacuum_for_anti_stokes() {
        let p = SystemParams::reference_point();
        let c = readout_correlations(&p, 2e-9, 1e-10).unwrap();
        let b = analytic_readout_covariance_since(&p, &c, 0.0).unwrap();
        assert!((b.b[(0, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(b.c, nalgebra::Matrix2::zeros());
        let tl = ProtocolTimeline::new(2e-9, 1e-10, 3e-9).unwrap();
        assert!(analytic_readout_covariance(&p, &c, &tl, 1e-9).is_err());
    }

    #[test]
    fn zero_readout_coupling_keeps_modes_apart() {
        let mut p = SystemParams::reference_point();
        p.g_tilde = 0.0;
        let c = readout_correlations(&p, 2e-9, 1e-10).unwrap();
        let b = analytic_readout_covariance_since(&p, &c, 1e-9).unwrap();
        assert_eq!(b.c.amax(), 0.0);
    }

    #[test]
    fn nas_limits() {
        assert_eq!(nas_transferred(3.0, 0.1, 0.2, 25.0, 0.0), 0.0);
        let gt = 7.0;
        let v = nas_transferred(gt, 0.0, 0.0, 25.0, std::f64::consts::FRAC_PI_2 / gt);
        assert!((v - 25.0).abs() < 1e-12);
    }

    #[test]
    fn readout_approximants_start_at_half() {
        let c = corr(0.3, 25.0, 1.1);
        assert_eq!(lambda_tilde_minus_cubic(40.0, 1.0, 80.0, &c, 0.0), 0.5);
        assert!((lambda_tilde_minus_poly(40.0, 1.0, 80.0, &c, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn no_readout_without_cross_correlation() {
        let c = corr(0.3, 25.0, 0.0);
        for t in [0.01, 0.1, 1.0] {
            assert!(lambda_tilde_minus_cubic(40.0, 1.0, 80.0, &c, t) > 0.5);
        }
    }

    /// Intermediate form `½|(1 + η̃₁t² + η̃₂t³)/(1 + η̃₃t²)|` from which the
    /// long polynomial is expanded; used as an independent printed oracle.
    fn intermediate(gt: f64, big: f64, nt: f64, c: &ReadoutCorrelations, t: f64) -> f64 {
        let (ns, nb, c2) = (c.n_s, c.n_b, c.c_ns * c.c_ns);
        let e1 = gt * gt * (nb / (1.0 + ns) + (2.0 * nb * (1.0 + 2.0 * ns) - c2) / (1.0 + 2.0 * ns));
        let e2 = 2.0 * gt * gt * big * nt / 3.0;
        let e3 = gt * gt * (nb / (1.0 + ns) + (4.0 * nb + c2) / (2.0 * (1.0 + ns) * (1.0 + 2.0 * ns)));
        0.5 * ((1.0 + e1 * t * t + e2 * t.powi(3)) / (1.0 + e3 * t * t)).abs()
    }

    #[test]
    fn poly_agrees_with_intermediate_form_at_small_times() {
        // Without acoustic loss the two forms share all terms through t².
        let (gt, big, n) = (40.0, 0.0, 80.0);
        for c in [corr(0.2, 2.0, 1.5), corr(0.05, 1.0, 0.45), corr(0.3, 25.0, 1.1)] {
            for t in [1e-5, 3e-5, 1e-4] {
                let p = lambda_tilde_minus_poly(gt, big, n, &c, t) - 0.5;
                let q = intermediate(gt, big, n, &c, t) - 0.5;
                assert!((p - q).abs() < 1e-3 * q.abs(), "{t}: {p} {q}");
            }
        }
    }

    #[test]
    fn poly_tracks_cubic_at_small_times() {
        let p = SystemParams::reference_point();
        let (gt, big, n) = (40.0 * p.gamma_ac, p.gamma_ac, p.n_th());
        for c in [corr(0.2, 2.0, 1.5), corr(0.05, 1.0, 0.45), corr(0.3, 25.0, 1.1)] {
            for k in 1..=10 {
                let t = 0.005 * k as f64 / gt;
                let poly = lambda_tilde_minus_poly(gt, big, n, &c, t);
                let cubic = lambda_tilde_minus_cubic(gt, big, n, &c, t);
                assert!((poly - cubic).abs() <= 1e-3 * cubic, "g̃t = {}: {poly} vs {cubic}", gt * t);
            }
        }
    }
}
