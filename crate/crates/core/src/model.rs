//! Physical parameters and the drift/diffusion matrices of each protocol phase.
//!
//! Every mode obeys `ȧ = −(κ/2 + iΔ)a + …`, which in quadratures reads
//!
//! ```text
//! ẋ = −κ/2·x + Δ·p
//! ṗ = −Δ·x − κ/2·p
//! ```
//!
//! The write coupling `−i g b†` in `ȧ` (and `−i g a†` in `ḃ`) becomes
//! `ẋ_a −= g·p_b`, `ṗ_a −= g·x_b` and symmetrically for `b`. The readout
//! beam splitter `−i g̃ ã` in `ḃ` (and `−i g̃ b` in `d ã/dt`) becomes
//! `ẋ_b += g̃·p_ã`, `ṗ_b −= g̃·x_ã` and symmetrically for `ã`.
//!
//! A bath of occupancy `n` at rate `κ` contributes `κ(2n + 1)/2` to the
//! diffusion of both quadratures. Optical baths are at zero temperature.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical configuration of one run. Rates and frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Optical (Stokes and anti-Stokes) loss rate γ.
    pub gamma: f64,
    /// Acoustic loss rate Γ.
    pub gamma_ac: f64,
    /// Acoustic angular frequency Ω.
    pub omega_ac: f64,
    /// Write (Stokes) coupling g.
    pub g: f64,
    /// Readout (anti-Stokes) coupling g̃.
    pub g_tilde: f64,
    /// Loss rate of the delayed Stokes mode in the fiber; `None` means γ.
    pub gamma_tilde: Option<f64>,
    /// Optical group velocity (m/s).
    pub v_opt: f64,
    /// Acoustic group velocity (m/s).
    pub v_ac: f64,
    /// Bath temperature (K).
    pub t_m: f64,
    /// Wavenumber (1/m).
    pub k: f64,
    /// Anti-Stokes detuning Δã; `None` means Δa = k·v_opt.
    pub delta_a_tilde: Option<f64>,
}

impl SystemParams {
    /// Operating point of the reference experiment: Γ/2π = 2 MHz,
    /// γ/2π = 0.1 MHz, Ω/2π = 7.7 GHz, n_opt = 2.4, v_ac = 6000 m/s,
    /// T = 30 K, Δa = 0.2Γ, g = 30Γ, g̃ = 40Γ.
    pub fn reference_point() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let gamma_ac = two_pi * 2e6;
        let v_opt = SPEED_OF_LIGHT / 2.4;
        Self {
            gamma: two_pi * 0.1e6,
            gamma_ac,
            omega_ac: two_pi * 7.7e9,
            g: 30.0 * gamma_ac,
            g_tilde: 40.0 * gamma_ac,
            gamma_tilde: None,
            v_opt,
            v_ac: 6000.0,
            t_m: 30.0,
            k: 0.2 * gamma_ac / v_opt,
            delta_a_tilde: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("gamma", self.gamma),
            ("Gamma", self.gamma_ac),
            ("omega_ac", self.omega_ac),
            ("v_opt", self.v_opt),
            ("v_ac", self.v_ac),
            ("T_m", self.t_m),
            ("gamma_tilde", self.gamma_tilde()),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("g", self.g), ("g_tilde", self.g_tilde), ("k", self.k)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn n_th(&self) -> f64 {
        thermal_occupancy(self.omega_ac, self.t_m)
    }

    /// `(Δa, Δb) = (k·v_opt, k·v_ac)`.
    pub fn detunings(&self) -> (f64, f64) {
        detunings(self)
    }

    pub fn gamma_tilde(&self) -> f64 {
        self.gamma_tilde.unwrap_or(self.gamma)
    }

    pub fn delta_a_tilde(&self) -> f64 {
        self.delta_a_tilde.unwrap_or(self.k * self.v_opt)
    }

    /// Natural rate used to normalize time: Γ when positive, else the
    /// largest remaining rate, else 1.
    pub fn rate_scale(&self) -> f64 {
        if self.gamma_ac > 0.0 {
            return self.gamma_ac;
        }
        let (da, db) = self.detunings();
        let m = [self.gamma, self.g.abs(), self.g_tilde.abs(), da.abs(), db.abs(), self.gamma_tilde()]
            .into_iter()
            .fold(0.0, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }
}

/// Bose–Einstein occupancy `1/(exp(ħΩ/k_B T) − 1)`; exactly 0 at `T = 0`.
pub fn thermal_occupancy(omega_ac: f64, t_m: f64) -> f64 {
    if t_m <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_ac / (K_B * t_m);
    1.0 / x.exp_m1()
}

pub fn detunings(params: &SystemParams) -> (f64, f64) {
    (params.k * params.v_opt, params.k * params.v_ac)
}

/// `dV/dt = A·V + V·Aᵀ + D` for one protocol phase.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub n_modes: usize,
}

impl DriftDiffusion {
    fn zeros(n_modes: usize) -> Self {
        let n = 2 * n_modes;
        Self {
            a: DMatrix::zeros(n, n),
            d: DMatrix::zeros(n, n),
            n_modes,
        }
    }

    /// Damped rotation of mode `m` at loss `kappa`, detuning `delta`, fed
    /// by a bath of occupancy `n`.
    fn local(&mut self, m: usize, kappa: f64, delta: f64, n: f64) {
        let (x, p) = (2 * m, 2 * m + 1);
        self.a[(x, x)] = -kappa / 2.0;
        self.a[(p, p)] = -kappa / 2.0;
        self.a[(x, p)] = delta;
        self.a[(p, x)] = -delta;
        let diff = kappa * (2.0 * n + 1.0) / 2.0;
        self.d[(x, x)] = diff;
        self.d[(p, p)] = diff;
    }

    /// Two-mode squeezing `−i g b†` / `−i g a†` between modes `i` and `j`.
    fn squeeze(&mut self, i: usize, j: usize, g: f64) {
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        self.a[(xi, pj)] -= g;
        self.a[(pi, xj)] -= g;
        self.a[(xj, pi)] -= g;
        self.a[(pj, xi)] -= g;
    }

    /// Beam splitter `−i g ã` / `−i g b` between modes `i` and `j`.
    fn beam_split(&mut self, i: usize, j: usize, g: f64) {
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        self.a[(xi, pj)] += g;
        self.a[(pi, xj)] -= g;
        self.a[(xj, pi)] += g;
        self.a[(pj, xi)] -= g;
    }

    /// `dV/dt` at `v`.
    pub fn rhs(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let av = &self.a * v;
        &av + av.transpose() + &self.d
    }
}

/// Write phase, modes `(a, b)`.
pub fn stokes_drift_diffusion(params: &SystemParams) -> DriftDiffusion {
    let (da, db) = params.detunings();
    let mut dd = DriftDiffusion::zeros(2);
    dd.local(0, params.gamma, da, 0.0);
    dd.local(1, params.gamma_ac, db, params.n_th());
    dd.squeeze(0, 1, params.g);
    dd
}

/// Delay phase, modes `(a, b)`: the Stokes light decays in the fiber at γ̃,
/// the phonon relaxes thermally, no coupling.
pub fn delay_drift_diffusion(params: &SystemParams) -> DriftDiffusion {
    let (da, db) = params.detunings();
    let mut dd = DriftDiffusion::zeros(2);
    dd.local(0, params.gamma_tilde(), da, 0.0);
    dd.local(1, params.gamma_ac, db, params.n_th());
    dd
}

/// Readout phase. With `n_modes = 3` the modes are `(a, b, ã)` and `a`
/// keeps decaying in the fiber; with `n_modes = 2` they are `(b, ã)`.
pub fn antistokes_drift_diffusion(params: &SystemParams, n_modes: usize) -> Result<DriftDiffusion> {
    let offset = match n_modes {
        2 => 0,
        3 => 1,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "anti-Stokes dynamics has 2 or 3 modes, got {n_modes}"
            )))
        }
    };
    let (da, db) = params.detunings();
    let mut dd = DriftDiffusion::zeros(n_modes);
    if offset == 1 {
        dd.local(0, params.gamma_tilde(), da, 0.0);
    }
    let (b, at) = (offset, offset + 1);
    dd.local(b, params.gamma_ac, db, params.n_th());
    dd.local(at, params.gamma, params.delta_a_tilde(), 0.0);
    dd.beam_split(b, at, params.g_tilde);
    Ok(dd)
}

/// Durations of the write pulse, the delay and the readout pulse (s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolTimeline {
    pub tau1: f64,
    pub tau_d: f64,
    pub tau2: f64,
}

impl ProtocolTimeline {
    pub fn new(tau1: f64, tau_d: f64, tau2: f64) -> Result<Self> {
        for (name, v) in [("tau1", tau1), ("tau_d", tau_d), ("tau2", tau2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { tau1, tau_d, tau2 })
    }

    /// `Δτ = τ₁ + τ_d`.
    pub fn readout_start(&self) -> f64 {
        self.tau1 + self.tau_d
    }

    pub fn end(&self) -> f64 {
        self.tau1 + self.tau_d + self.tau2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn thermal_occupancy_values() {
        assert_eq!(thermal_occupancy(1e10, 0.0), 0.0);
        let om = 2.0 * std::f64::consts::PI * 7.7e9;
        // Independent evaluation of the Bose function in long form.
        let bose = |t: f64| 1.0 / ((1.054571817e-34 * om / (1.380649e-23 * t)).exp() - 1.0);
        assert!(rel(thermal_occupancy(om, 30.0), bose(30.0)) < 1e-12);
        assert!((thermal_occupancy(om, 30.0) - 80.7).abs() < 0.05);
        assert!((thermal_occupancy(om, 300.0) - 811.3).abs() < 0.05);
    }

    #[test]
    fn detuning_examples() {
        let mut p = SystemParams::reference_point();
        let (da, db) = p.detunings();
        assert!(rel(da, 0.2 * p.gamma_ac) < 1e-14);
        assert!((p.k - 2.01201e-2).abs() < 1e-6);
        assert!(rel(da / db, p.v_opt / p.v_ac) < 1e-14);
        p.k = 0.0;
        assert_eq!(p.detunings(), (0.0, 0.0));
        p.k = 3.0;
        p.v_ac = p.v_opt;
        let (da, db) = p.detunings();
        assert_eq!(da, db);
    }

    #[test]
    fn decoupled_drift_is_diagonal_damping() {
        let mut p = SystemParams::reference_point();
        p.g = 0.0;
        p.k = 0.0;
        let dd = stokes_drift_diffusion(&p);
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![
            -p.gamma / 2.0,
            -p.gamma / 2.0,
            -p.gamma_ac / 2.0,
            -p.gamma_ac / 2.0,
        ]));
        assert_eq!(dd.a, expect);
    }

    #[test]
    fn thermal_state_is_stationary_without_coupling() {
        let mut p = SystemParams::reference_point();
        p.g = 0.0;
        let n = p.n_th();
        let v = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5, n + 0.5, n + 0.5]));
        let dv = stokes_drift_diffusion(&p).rhs(&v);
        assert!(dv.amax() < 1e-9 * p.gamma_ac * n);
    }

    /// Checks the quadrature drift against the complex-amplitude equations
    /// written directly from the Langevin equations.
    #[test]
    fn quadrature_drift_matches_complex_amplitudes() {
        let mut p = SystemParams::reference_point();
        p.g = 3.7e7;
        let (da, db) = p.detunings();
        let (a, b) = (Complex64::new(0.3, -0.8), Complex64::new(-1.1, 0.4));
        let i = Complex64::i();
        let ad = -(p.gamma / 2.0 + i * da) * a - i * p.g * b.conj();
        let bd = -(p.gamma_ac / 2.0 + i * db) * b - i * p.g * a.conj();
        let s2 = std::f64::consts::SQRT_2;
        let q = |z: Complex64| [s2 * z.re, s2 * z.im];
        let phi = DVector::from_vec([q(a), q(b)].concat());
        let dphi = stokes_drift_diffusion(&p).a * phi;
        let expect = [q(ad), q(bd)].concat();
        for k in 0..4 {
            assert!((dphi[k] - expect[k]).abs() < 1e-9 * p.g);
        }

        let at = Complex64::new(0.2, 0.9);
        let bd = -(p.gamma_ac / 2.0 + i * db) * b - i * p.g_tilde * at;
        let atd = -(p.gamma / 2.0 + i * p.delta_a_tilde()) * at - i * p.g_tilde * b;
        let ad = -(p.gamma_tilde() / 2.0 + i * da) * a;
        let phi = DVector::from_vec([q(a), q(b), q(at)].concat());
        let dphi = antistokes_drift_diffusion(&p, 3).unwrap().a * phi;
        let expect = [q(ad), q(bd), q(atd)].concat();
        for k in 0..6 {
            assert!((dphi[k] - expect[k]).abs() < 1e-9 * p.g_tilde);
        }
    }

    #[test]
    fn diffusion_is_positive_semidefinite() {
        let p = SystemParams::reference_point();
        for dd in [
            stokes_drift_diffusion(&p),
            delay_drift_diffusion(&p),
            antistokes_drift_diffusion(&p, 3).unwrap(),
        ] {
            let ev = dd.d.clone().symmetric_eigenvalues();
            assert!(ev.iter().all(|&e| e >= -1e-12));
            assert_eq!(dd.d, dd.d.transpose());
        }
        assert!(antistokes_drift_diffusion(&p, 4).is_err());
    }
}
