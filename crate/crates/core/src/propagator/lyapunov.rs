//! Dormand–Prince 5(4) integration of `dV/dt = A·V + V·Aᵀ + D` on the
//! upper triangle of `V`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::CovMat;
use crate::model::DriftDiffusion;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

// Dormand–Prince tableau; the system is autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights are the last row of A; E is (5th − 4th).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// The linear map `V ↦ A V + V Aᵀ + D` acting on packed upper triangles.
struct Rhs {
    n: usize,
    a: DMatrix<f64>,
    d: DMatrix<f64>,
    idx: Vec<(usize, usize)>,
    /// Packed positions of `(i, i)` and `(j, j)` for each entry.
    diag: Vec<(usize, usize)>,
}

impl Rhs {
    fn new(dd: &DriftDiffusion, scale: f64) -> Self {
        let n = dd.a.nrows();
        let idx: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let pos = |k: usize| idx.iter().position(|&p| p == (k, k)).unwrap();
        let diag = idx.iter().map(|&(i, j)| (pos(i), pos(j))).collect();
        Self {
            n,
            diag,
            a: &dd.a / scale,
            d: &dd.d / scale,
            idx,
        }
    }

    fn pack(&self, v: &DMatrix<f64>) -> Vec<f64> {
        self.idx.iter().map(|&(i, j)| v[(i, j)]).collect()
    }

    fn unpack(&self, y: &[f64]) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.n, self.n);
        for (&(i, j), &x) in self.idx.iter().zip(y) {
            v[(i, j)] = x;
            v[(j, i)] = x;
        }
        v
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) {
        let v = self.unpack(y);
        let av = &self.a * &v;
        for (o, &(i, j)) in out.iter_mut().zip(&self.idx) {
            *o = av[(i, j)] + av[(j, i)] + self.d[(i, j)];
        }
    }
}

/// Propagates `v0` given at `t_span.0` and returns the covariance at each of
/// the sorted `sample_times` in `[t_span.0, t_span.1]`, with default
/// tolerances.
pub fn lyapunov_propagate(
    dd: &DriftDiffusion,
    v0: &CovMat,
    t_span: (f64, f64),
    sample_times: &[f64],
) -> Result<Vec<CovMat>> {
    lyapunov_propagate_with(dd, v0, t_span, sample_times, Tolerances::default())
}

pub fn lyapunov_propagate_with(
    dd: &DriftDiffusion,
    v0: &CovMat,
    t_span: (f64, f64),
    sample_times: &[f64],
    tol: Tolerances,
) -> Result<Vec<CovMat>> {
    let n = v0.matrix().nrows();
    if dd.a.nrows() != n {
        return Err(Error::InvalidArgument(format!(
            "drift is {}x{} but the state is {n}x{n}",
            dd.a.nrows(),
            dd.a.ncols()
        )));
    }
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::InvalidArgument(format!("bad time span ({t0}, {t1})")));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample times must be sorted".into()));
    }
    if let Some(&t) = sample_times.iter().find(|&&t| t < t0 || t > t1) {
        return Err(Error::InvalidArgument(format!("sample time {t:e} outside ({t0:e}, {t1:e})")));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }

    // Integrate in units of the fastest drift rate.
    let scale = match dd.a.amax() {
        m if m > 0.0 => m,
        _ => 1.0,
    };
    let rhs = Rhs::new(dd, scale);
    let m = rhs.idx.len();
    let mut y = rhs.pack(v0.matrix());
    let mut tau = 0.0;
    let mut h = 1e-2;
    let mut k = vec![vec![0.0; m]; 7];
    let mut stage = vec![0.0; m];
    let mut y_new = vec![0.0; m];
    rhs.eval(&y, &mut k[0]);

    let mut out = Vec::with_capacity(sample_times.len());
    for &ts in sample_times {
        let target = (ts - t0) * scale;
        while tau < target {
            let remaining = target - tau;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * tau.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow {
                    t: t0 + tau / scale,
                    h: step / scale,
                });
            }
            for s in 1..7 {
                for c in 0..m {
                    let mut acc = y[c];
                    for (r, a) in A[s].iter().enumerate().take(s) {
                        acc += step * a * k[r][c];
                    }
                    stage[c] = acc;
                }
                rhs.eval(&stage, &mut k[s]);
            }
            // stage now holds the 5th-order solution (row 6 of A, FSAL).
            y_new.copy_from_slice(&stage);
            let mut err = 0.0;
            for c in 0..m {
                let mut e = 0.0;
                for (r, w) in E.iter().enumerate() {
                    e += w * k[r][c];
                }
                // Entries are measured against their Cauchy–Schwarz bound
                // √(V_ii V_jj): off-diagonals that vanish analytically only
                // carry rounding noise of that size.
                let (di, dj) = rhs.diag[c];
                let bound = (y[di] * y[dj]).abs().max((y_new[di] * y_new[dj]).abs()).sqrt();
                let sc = tol.atol + tol.rtol * bound;
                err += (step * e / sc).powi(2);
            }
            let err = (err / m as f64).sqrt();
            if err.is_finite() && err <= 1.0 {
                tau = if last { target } else { tau + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // A step clipped to hit a sample does not shrink the next one.
                h = if last { h.max(step * fac) } else { step * fac };
            } else {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = step * fac;
                if h < 1e-14 * tau.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow {
                        t: t0 + tau / scale,
                        h: h / scale,
                    });
                }
            }
        }
        out.push(CovMat::from_matrix(rhs.unpack(&y))?);
    }
    Ok(out)
}
