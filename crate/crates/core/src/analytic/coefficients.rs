use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Stokes write phase, modes `(a, b)` with squeezing coupling g.
    Write,
    /// Anti-Stokes readout phase, modes `(ã, b)` with beam-splitter coupling g̃.
    Readout,
}

/// Eigen-rates `ω±` and mixing coefficients of the coupled-mode solution.
///
/// Write variant, with `s = √(16g² + ((Γ−γ) − 2i(Δa+Δb))²)`:
///
/// ```text
/// ω± = −(γ+Γ)/4 − i(Δa−Δb)/2 ∓ s/4
/// τ± = [−(2(Δa+Δb) + i(Γ−γ)) ± i s] / 4g
/// ```
///
/// Readout variant, with `s̃ = √(16g̃² − ((Γ−γ) − 2i(Δã−Δb))²)`:
///
/// ```text
/// ω̃± = −(γ+Γ)/4 − i(Δb+Δã)/2 ∓ i s̃/4
/// τ̃± = [2(Δã−Δb) + i(Γ−γ) ± s̃] / 4g̃
/// ```
///
/// In both cases `μ₁ = 1/(τ₊−τ₋)`, `μ₂ = τ₊ μ₁`, `μ₃ = τ₋ μ₁`. The τ's
/// diverge like 1/g as the coupling vanishes, so the μ's are evaluated
/// from g-scaled forms and stay finite (μ₁ → 0); `tau_plus`/`tau_minus`
/// are `None` at zero coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub tau_plus: Option<Complex64>,
    pub tau_minus: Option<Complex64>,
    pub mu1: Complex64,
    pub mu2: Complex64,
    pub mu3: Complex64,
    pub variant: Variant,
}

pub fn mode_coefficients(params: &SystemParams, variant: Variant) -> Result<ModeCoefficients> {
    let i = Complex64::i();
    let (da, db) = params.detunings();
    let (gamma, big) = (params.gamma, params.gamma_ac);
    let dg = big - gamma;
    let (g, scale, s, omega_c, t_hat_c) = match variant {
        Variant::Write => {
            let sum = da + db;
            let inner = Complex64::new(dg, -2.0 * sum);
            let s = (16.0 * params.g * params.g + inner * inner).sqrt();
            let omega_c = Complex64::new(-(gamma + big) / 4.0, -(da - db) / 2.0);
            // 4g·τ± = t_hat_c ± i s
            let t_hat_c = Complex64::new(-2.0 * sum, -dg);
            (params.g, gamma + big + sum.abs() + params.g.abs(), i * s, omega_c, t_hat_c)
        }
        Variant::Readout => {
            let dat = params.delta_a_tilde();
            let inner = Complex64::new(dg, -2.0 * (dat - db));
            let s = (16.0 * params.g_tilde * params.g_tilde - inner * inner).sqrt();
            let omega_c = Complex64::new(-(gamma + big) / 4.0, -(db + dat) / 2.0);
            let t_hat_c = Complex64::new(2.0 * (dat - db), dg);
            (
                params.g_tilde,
                gamma + big + (dat - db).abs() + params.g_tilde.abs(),
                s,
                omega_c,
                t_hat_c,
            )
        }
    };
    // root = 2g·(τ₊ − τ₋), finite as g → 0.
    let root = s;
    if root.norm() < 1e-14 * scale.max(f64::MIN_POSITIVE) {
        let split = if g != 0.0 { root.norm() / (2.0 * g.abs()) } else { root.norm() };
        return Err(Error::DegenerateRoots(split));
    }
    let (omega_plus, omega_minus) = match variant {
        Variant::Write => (omega_c + i * root / 4.0, omega_c - i * root / 4.0),
        Variant::Readout => (omega_c - i * root / 4.0, omega_c + i * root / 4.0),
    };
    let t_hat_plus = t_hat_c + root;
    let t_hat_minus = t_hat_c - root;
    let mu1 = Complex64::new(2.0 * g, 0.0) / root;
    let mu2 = t_hat_plus / (2.0 * root);
    let mu3 = t_hat_minus / (2.0 * root);
    let (tau_plus, tau_minus) = if g != 0.0 {
        (Some(t_hat_plus / (4.0 * g)), Some(t_hat_minus / (4.0 * g)))
    } else {
        (None, None)
    };
    Ok(ModeCoefficients {
        omega_plus,
        omega_minus,
        tau_plus,
        tau_minus,
        mu1,
        mu2,
        mu3,
        variant,
    })
}

impl ModeCoefficients {
    pub fn exps(&self, t: f64) -> (Complex64, Complex64) {
        ((self.omega_plus * t).exp(), (self.omega_minus * t).exp())
    }

    /// Write-phase amplitudes `[F, G, H, K]` at `t`:
    /// `a(t) = F·a(0) + G·b†(0)` and `b†(t) = H·a(0) + K·b†(0)`, noise omitted.
    pub fn write_amplitudes(&self, t: f64) -> [Complex64; 4] {
        self.write_terms().map(|c| self.eval(c, t))
    }

    /// Readout amplitudes `[F̃, G̃]` at `t`: `ã(t) = F̃·ã(0) + G̃·b(0)`,
    /// noise omitted.
    pub fn readout_amplitudes(&self, t: f64) -> [Complex64; 2] {
        self.readout_terms().map(|c| self.eval(c, t))
    }

    /// Write amplitudes `(F, G, H, K)` as coefficient pairs on
    /// `(e^{ω₊t}, e^{ω₋t})`.
    pub(crate) fn write_terms(&self) -> [[Complex64; 2]; 4] {
        let (m1, m2, m3) = (self.mu1, self.mu2, self.mu3);
        [[m2, -m3], [-m1, m1], [m1, -m1], [-m3, m2]]
    }

    /// Readout amplitudes `(F̃, G̃)` as coefficient pairs on
    /// `(e^{ω̃₊t}, e^{ω̃₋t})`.
    pub(crate) fn readout_terms(&self) -> [[Complex64; 2]; 2] {
        let (m1, m2, m3) = (self.mu1, self.mu2, self.mu3);
        [[m2, -m3], [m1, -m1]]
    }

    pub(crate) fn eval(&self, c: [Complex64; 2], t: f64) -> Complex64 {
        let (ep, em) = self.exps(t);
        c[0] * ep + c[1] * em
    }

    /// `∫₀ᵗ x(s)·y(s)* ds` for amplitudes given as coefficient pairs.
    pub(crate) fn cross_integral(&self, x: [Complex64; 2], y: [Complex64; 2], t: f64) -> Complex64 {
        let w = [self.omega_plus, self.omega_minus];
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..2 {
            for q in 0..2 {
                acc += x[p] * y[q].conj() * exp_integral(w[p] + w[q].conj(), t);
            }
        }
        acc
    }
}

/// `(e^{αt} − 1)/α`, by series when `|α|t < 1e−8`.
pub fn exp_integral(alpha: Complex64, t: f64) -> Complex64 {
    let z = alpha * t;
    if z.norm() < 1e-8 {
        t * (1.0 + z / 2.0 + z * z / 6.0)
    } else {
        z.exp_m1() / alpha
    }
}

trait ExpM1 {
    fn exp_m1(self) -> Self;
}

impl ExpM1 for Complex64 {
    /// `e^z − 1` without cancellation in the real part for small `|z|`.
    fn exp_m1(self) -> Self {
        let (re, im) = (self.re, self.im);
        let em1 = re.exp_m1();
        let e = em1 + 1.0;
        // e^{re}·cos(im) − 1 = (e^{re} − 1)·cos(im) − 2 sin²(im/2)
        let h = (im / 2.0).sin();
        Complex64::new(em1 * im.cos() - 2.0 * h * h, e * im.sin())
    }
}
