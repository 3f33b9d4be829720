#![allow(dead_code)]

use optoacoustic::model::SystemParams;
use optoacoustic::CovMat;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `|x − y| / max(|y|, ½)`: relative deviation floored at the vacuum variance.
pub fn rel_dev(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(0.5)
}

/// Largest element-wise deviation of `a` from the reference `b`, each
/// element measured against its Cauchy–Schwarz scale `√(b_ii b_jj)`.
/// Diagonal entries are thus compared relatively; off-diagonals that vanish
/// analytically are compared against the size of their modes.
pub fn max_rel_dev(a: &CovMat, b: &CovMat) -> f64 {
    let (x, y) = (a.matrix(), b.matrix());
    let n = y.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let scale = (y[(i, i)] * y[(j, j)]).sqrt().max(y[(i, j)].abs());
            worst = worst.max((x[(i, j)] - y[(i, j)]).abs() / scale);
        }
    }
    worst
}

/// Paper parameters with the detuning set through `Δa = k·v_opt`.
pub fn with_delta_a(mut p: SystemParams, delta_a: f64) -> SystemParams {
    p.k = delta_a / p.v_opt;
    p
}

/// Randomized write-phase parameter set and time, drawn from the ranges
/// g/Γ ∈ [1, 50], γ/Γ ∈ [0.01, 0.1], Δa/Γ ∈ [0, 0.5], T ∈ {30, 300} K.
pub fn random_write_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let base = SystemParams::reference_point();
    let gam = base.gamma_ac;
    let mut p = with_delta_a(base, rng.random_range(0.0..=0.5) * gam);
    p.g = rng.random_range(1.0..=50.0) * gam;
    p.gamma = rng.random_range(0.01..=0.1) * gam;
    p.t_m = if rng.random_bool(0.5) { 30.0 } else { 300.0 };
    p
}

/// Smallest symplectic eigenvalue and an estimate of how well double
/// precision determines it: the spread of `ν_min` under relative
/// perturbations of a few ulps on every entry.
pub fn nu_min_with_uncertainty(v: &CovMat, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let nu = v.symplectic_spectrum()[0];
    let n = v.matrix().nrows();
    let mut spread: f64 = 0.0;
    for _ in 0..4 {
        let mut m = v.matrix().clone();
        for i in 0..n {
            for j in i..n {
                let e = m[(i, j)] * (1.0 + 4.0 * f64::EPSILON * rng.random_range(-1.0..=1.0));
                m[(i, j)] = e;
                m[(j, i)] = e;
            }
        }
        match CovMat::from_matrix(m) {
            Ok(w) => spread = spread.max((w.symplectic_spectrum()[0] - nu).abs()),
            Err(_) => spread = f64::INFINITY,
        }
    }
    (nu, spread)
}

use nalgebra::DMatrix;

/// Local phase rotation of one mode.
pub fn rotation(modes: usize, m: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    let (c, sn) = (theta.cos(), theta.sin());
    s[(2 * m, 2 * m)] = c;
    s[(2 * m, 2 * m + 1)] = sn;
    s[(2 * m + 1, 2 * m)] = -sn;
    s[(2 * m + 1, 2 * m + 1)] = c;
    s
}

/// Single-mode squeezer `diag(e^{−r}, e^{r})` on mode `m`.
pub fn squeezer(modes: usize, m: usize, r: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    s[(2 * m, 2 * m)] = (-r).exp();
    s[(2 * m + 1, 2 * m + 1)] = r.exp();
    s
}

/// Beam splitter of angle `theta` between modes `i` and `j`.
pub fn beam_splitter(modes: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    let (c, sn) = (theta.cos(), theta.sin());
    for q in 0..2 {
        let (a, b) = (2 * i + q, 2 * j + q);
        s[(a, a)] = c;
        s[(b, b)] = c;
        s[(a, b)] = sn;
        s[(b, a)] = -sn;
    }
    s
}

/// Two-mode squeezer with `cosh r` blocks and `sinh r · diag(1, −1)` cross blocks.
pub fn two_mode_squeezer(modes: usize, i: usize, j: usize, r: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    let (c, sh) = (r.cosh(), r.sinh());
    for q in 0..2 {
        let (a, b) = (2 * i + q, 2 * j + q);
        let sign = if q == 0 { 1.0 } else { -1.0 };
        s[(a, a)] = c;
        s[(b, b)] = c;
        s[(a, b)] = sign * sh;
        s[(b, a)] = sign * sh;
    }
    s
}

/// `S · diag(ν₁, ν₁, ν₂, ν₂, …) · Sᵀ` for a random symplectic `S` built
/// from rotations, squeezers, beam splitters and two-mode squeezers.
pub fn random_state(rng: &mut ChaCha8Rng, modes: usize, max_r: f64) -> (CovMat, Vec<f64>) {
    let nus: Vec<f64> = (0..modes).map(|_| 0.5 + rng.random_range(0.0..3.0)).collect();
    let mut v = DMatrix::zeros(2 * modes, 2 * modes);
    for (m, nu) in nus.iter().enumerate() {
        v[(2 * m, 2 * m)] = *nu;
        v[(2 * m + 1, 2 * m + 1)] = *nu;
    }
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    for _ in 0..6 {
        let i = rng.random_range(0..modes);
        let j = (i + 1 + rng.random_range(0..modes - 1)) % modes;
        let (a, b) = (i.min(j), i.max(j));
        let step = match rng.random_range(0..4) {
            0 => rotation(modes, i, rng.random_range(0.0..std::f64::consts::TAU)),
            1 => squeezer(modes, i, rng.random_range(-max_r..max_r)),
            2 => beam_splitter(modes, a, b, rng.random_range(0.0..std::f64::consts::TAU)),
            _ => two_mode_squeezer(modes, a, b, rng.random_range(-max_r..max_r)),
        };
        s = step * s;
    }
    let mut sorted = nus;
    sorted.sort_by(f64::total_cmp);
    (CovMat::from_matrix(&s * v * s.transpose()).unwrap(), sorted)
}

/// Symplectic eigenvalues by brute force: moduli of the eigenvalues of
/// `ΩV`, optionally after flipping `p` of the last mode.
pub fn brute_spectrum(v: &DMatrix<f64>, transpose_last: bool) -> Vec<f64> {
    let n = v.nrows();
    let mut p = DMatrix::identity(n, n);
    if transpose_last {
        p[(n - 1, n - 1)] = -1.0;
    }
    let vt = &p * v * &p;
    let omega = optoacoustic::gaussian::symplectic_form(n / 2);
    let mut m: Vec<f64> = (&omega * vt).complex_eigenvalues().iter().map(|z| z.norm()).collect();
    m.sort_by(f64::total_cmp);
    m.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}
