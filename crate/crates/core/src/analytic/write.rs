use nalgebra::DMatrix;
use num_complex::Complex64;

use super::coefficients::{mode_coefficients, Variant};
use crate::error::Result;
use crate::gaussian::CovMat;
use crate::model::SystemParams;

/// Independent second moments of the write-phase state.
///
/// `m_ab = ⟨ab + ba⟩/2`; the covariance has `V₁₃ = −V₂₄ = Re m_ab` and
/// `V₁₄ = V₂₃ = Im m_ab`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WriteMoments {
    pub v11: f64,
    pub v33: f64,
    pub m_ab: Complex64,
}

impl WriteMoments {
    pub fn to_covmat(&self) -> Result<CovMat> {
        let (re, im) = (self.m_ab.re, self.m_ab.im);
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            self.v11, 0.0, re, im,
            0.0, self.v11, im, -re,
            re, im, self.v33, 0.0,
            im, -re, 0.0, self.v33,
        ]);
        CovMat::from_matrix(m)
    }
}

/// Closed-form write-phase moments at time `t`, starting from vacuum for
/// the Stokes mode and a thermal phonon state of occupancy `n0`.
pub fn write_moments(params: &SystemParams, t: f64, n0: f64) -> Result<WriteMoments> {
    let c = mode_coefficients(params, Variant::Write)?;
    if t == 0.0 {
        // μ₂ − μ₃ = 1 only up to rounding; return the initial state exactly.
        return Ok(WriteMoments {
            v11: 0.5,
            v33: n0 + 0.5,
            m_ab: Complex64::new(0.0, 0.0),
        });
    }
    let [f, g, h, k] = c.write_terms();
    let (gam, big) = (params.gamma, params.gamma_ac);
    let n = params.n_th();
    let (hv, hb0, hb) = (0.5, n0 + 0.5, n + 0.5);

    let at = |x| c.eval(x, t);
    let int = |x, y| c.cross_integral(x, y, t);
    let (ft, gt, ht, kt) = (at(f), at(g), at(h), at(k));

    let v11 = hv * ft.norm_sqr()
        + hb0 * gt.norm_sqr()
        + gam * hv * int(f, f).re
        + big * hb * int(g, g).re;
    let v33 = hv * ht.norm_sqr()
        + hb0 * kt.norm_sqr()
        + gam * hv * int(h, h).re
        + big * hb * int(k, k).re;
    let m_ab = hv * ft * ht.conj()
        + hb0 * gt * kt.conj()
        + gam * hv * int(f, h)
        + big * hb * int(g, k);
    Ok(WriteMoments { v11, v33, m_ab })
}

/// Write-phase covariance of `(a, b)` at time `t` from vacuum ⊗ thermal(n0).
pub fn covariance_entangle(params: &SystemParams, t: f64, n0: f64) -> Result<CovMat> {
    write_moments(params, t, n0)?.to_covmat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{extract_pair, log_negativity};

    #[test]
    fn initial_state() {
        let v = covariance_entangle(&SystemParams::reference_point(), 0.0, 5.0).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let expect = match (k == l, k < 2) {
                    (true, true) => 0.5,
                    (true, false) => 5.5,
                    _ => 0.0,
                };
                assert!((v.get(k, l) - expect).abs() < 1e-15, "({k},{l})");
            }
        }
    }

    #[test]
    fn uncoupled_relaxation() {
        let mut p = SystemParams::reference_point();
        p.g = 0.0;
        let n = p.n_th();
        let n0 = 3.0;
        for t in [0.1, 1.0, 3.0].map(|x| x / p.gamma_ac) {
            let v = covariance_entangle(&p, t, n0).unwrap();
            let v33 = n + 0.5 + (n0 - n) * (-p.gamma_ac * t).exp();
            assert!((v.get(2, 2) - v33).abs() < 1e-10 * v33);
            assert!((v.get(0, 0) - 0.5).abs() < 1e-12);
            assert!(v.get(0, 2).abs() < 1e-12 && v.get(0, 3).abs() < 1e-12);
            assert_eq!(log_negativity(&extract_pair(&v, 0, 1).unwrap()).unwrap(), 0.0);
        }
    }

    #[test]
    fn physical_at_operating_point() {
        let p = SystemParams::reference_point();
        let v = covariance_entangle(&p, 0.3 / p.gamma_ac, p.n_th()).unwrap();
        assert!(v.symplectic_spectrum()[0] >= 0.5 - 1e-9);
    }
}
