//! Euler–Maruyama Monte-Carlo oracle for the covariance.
//!
//! Trajectories follow `dx = A·x dt + B·dW` with `B·Bᵀ = D` and start from
//! `x₀ ~ N(0, V₀)`. Trajectory `k` draws from its own ChaCha8 stream
//! `(seed, k)`, so estimates do not depend on how work is split across
//! threads.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::CovMat;
use crate::model::DriftDiffusion;

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = trajectory index";

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub covariance: CovMat,
    /// Per-element standard error of the mean.
    pub std_errors: DMatrix<f64>,
    pub n_traj: usize,
    pub step: f64,
    pub n_steps: usize,
}

/// Largest Euler step: `10⁻³` over the fastest rate of the drift (its
/// infinity norm).
pub fn mc_step_size(dd: &DriftDiffusion) -> f64 {
    let rate = dd
        .a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if rate > 0.0 {
        1e-3 / rate
    } else {
        f64::INFINITY
    }
}

/// Square root `B` with `B·Bᵀ = M` for a symmetric positive semidefinite `M`.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut b = eig.eigenvectors.clone();
    for (j, &l) in eig.eigenvalues.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        b.column_mut(j).scale_mut(s);
    }
    b
}

/// Estimates `V(t)` from `n_traj` trajectories.
pub fn mc_oracle(dd: &DriftDiffusion, v0: &CovMat, t: f64, n_traj: usize, seed: u64) -> Result<McEstimate> {
    let n = v0.matrix().nrows();
    if dd.a.nrows() != n {
        return Err(Error::InvalidArgument("drift and state dimensions differ".into()));
    }
    if n_traj < 100 {
        return Err(Error::InvalidArgument(format!("n_traj = {n_traj} < 100")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t = {t} must be >= 0")));
    }
    let h_max = mc_step_size(dd);
    let n_steps = if t == 0.0 { 0 } else { (t / h_max).ceil().max(1.0) as usize };
    let h = if n_steps == 0 { 0.0 } else { t / n_steps as f64 };
    let sqrt_h = h.sqrt();

    let l0 = psd_sqrt(v0.matrix());
    let b = psd_sqrt(&dd.d);
    // Row-major copies for the inner loop.
    let a: Vec<f64> = dd.a.transpose().iter().copied().collect();
    let b: Vec<f64> = b.transpose().iter().copied().collect();
    let l0: Vec<f64> = l0.transpose().iter().copied().collect();

    let finals: Vec<Vec<f64>> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut xi = vec![0.0; n];
            let fill = |xi: &mut [f64], rng: &mut ChaCha8Rng| {
                for z in xi.iter_mut() {
                    *z = StandardNormal.sample(rng);
                }
            };
            fill(&mut xi, &mut rng);
            let mut x: Vec<f64> = (0..n).map(|i| (0..n).map(|j| l0[i * n + j] * xi[j]).sum()).collect();
            let mut dx = vec![0.0; n];
            for _ in 0..n_steps {
                fill(&mut xi, &mut rng);
                for i in 0..n {
                    let mut drift = 0.0;
                    let mut noise = 0.0;
                    for j in 0..n {
                        drift += a[i * n + j] * x[j];
                        noise += b[i * n + j] * xi[j];
                    }
                    dx[i] = drift * h + noise * sqrt_h;
                }
                for i in 0..n {
                    x[i] += dx[i];
                }
            }
            x
        })
        .collect();

    // Sequential accumulation keeps results independent of thread count.
    let mut sum = DMatrix::<f64>::zeros(n, n);
    let mut sum_sq = DMatrix::<f64>::zeros(n, n);
    for x in &finals {
        for i in 0..n {
            for j in i..n {
                let p = x[i] * x[j];
                sum[(i, j)] += p;
                sum_sq[(i, j)] += p * p;
            }
        }
    }
    let nf = n_traj as f64;
    let mut mean = DMatrix::<f64>::zeros(n, n);
    let mut se = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let m = sum[(i, j)] / nf;
            let var = (sum_sq[(i, j)] / nf - m * m).max(0.0) * nf / (nf - 1.0);
            mean[(i, j)] = m;
            mean[(j, i)] = m;
            se[(i, j)] = (var / nf).sqrt();
            se[(j, i)] = se[(i, j)];
        }
    }
    Ok(McEstimate {
        covariance: CovMat::from_matrix(mean)?,
        std_errors: se,
        n_traj,
        step: h,
        n_steps,
    })
}
