//! Covariance matrices of two- and three-mode Gaussian states.
//!
//! Quadratures are ordered `(x₁, p₁, x₂, p₂, …)` with `x = (a + a†)/√2` and
//! `p = i(a† − a)/√2`, so the vacuum has variance 1/2 in every quadrature and
//! the symplectic form is the block-diagonal `⊕ [[0, 1], [−1, 0]]`.

use nalgebra::{DMatrix, Matrix2, Matrix4};

use crate::error::{Error, Result};

/// Relative tolerance on the bona-fide condition `ν ≥ 1/2`.
pub const TOL_PHYSICAL: f64 = 1e-9;

/// Tolerance on the discriminant `Σ² − 4 det V`, scaled by `max(1, Σ²)`.
pub const TOL_SQRT: f64 = 1e-12;

/// Real symmetric covariance matrix of 2 or 3 bosonic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMat {
    entries: DMatrix<f64>,
}

impl CovMat {
    /// Wraps a matrix, symmetrizing it as `(V + Vᵀ)/2`.
    ///
    /// Checks the shape (4×4 or 6×6), finiteness, and strictly positive
    /// diagonal. The bona-fide condition is checked by [`CovMat::physical`].
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols || !(rows == 4 || rows == 6) {
            return Err(Error::Shape { rows, cols });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let sym = (&m + m.transpose()) * 0.5;
        if let Some(k) = (0..rows).find(|&k| sym[(k, k)] <= 0.0) {
            return Err(Error::InvalidCovariance(format!(
                "diagonal entry {k} is {} (must be > 0)",
                sym[(k, k)]
            )));
        }
        Ok(Self { entries: sym })
    }

    /// Like [`CovMat::from_matrix`] but also requires every symplectic
    /// eigenvalue to be at least `1/2 (1 − TOL_PHYSICAL)`.
    pub fn physical(m: DMatrix<f64>) -> Result<Self> {
        let v = Self::from_matrix(m)?;
        let nu_min = v.symplectic_spectrum()[0];
        if nu_min < 0.5 * (1.0 - TOL_PHYSICAL) {
            return Err(Error::InvalidCovariance(format!(
                "smallest symplectic eigenvalue {nu_min} < 1/2"
            )));
        }
        Ok(v)
    }

    pub fn from_row_slice(dim_modes: usize, data: &[f64]) -> Result<Self> {
        let n = 2 * dim_modes;
        if data.len() != n * n {
            return Err(Error::Shape {
                rows: data.len(),
                cols: 1,
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(n, n, data))
    }

    /// Product of single-mode thermal states; `occupancies[k] = 0` is vacuum.
    pub fn thermal(occupancies: &[f64]) -> Result<Self> {
        let diag: Vec<f64> = occupancies
            .iter()
            .flat_map(|&n| [n + 0.5, n + 0.5])
            .collect();
        Self::from_matrix(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            diag,
        )))
    }

    pub fn vacuum(dim_modes: usize) -> Result<Self> {
        Self::thermal(&vec![0.0; dim_modes])
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Mean excitation number `(V_xx + V_pp − 1)/2` of mode `k`.
    pub fn occupancy(&self, k: usize) -> f64 {
        0.5 * (self.entries[(2 * k, 2 * k)] + self.entries[(2 * k + 1, 2 * k + 1)] - 1.0)
    }

    /// Embeds this state into a larger register, adding vacuum modes with no
    /// cross-correlations after the existing ones.
    pub fn embed_with_vacuum(&self, dim_modes: usize) -> Result<Self> {
        let n = 2 * dim_modes;
        let old = self.entries.nrows();
        if n < old {
            return Err(Error::InvalidArgument(format!(
                "cannot embed {}-mode state into {dim_modes} modes",
                self.dim()
            )));
        }
        let mut m = DMatrix::<f64>::identity(n, n) * 0.5;
        m.view_mut((0, 0), (old, old)).copy_from(&self.entries);
        Self::from_matrix(m)
    }

    /// Symplectic eigenvalues, sorted ascending, one per mode.
    pub fn symplectic_spectrum(&self) -> Vec<f64> {
        symplectic_spectrum(self)
    }

    pub fn is_physical(&self) -> bool {
        self.symplectic_spectrum()[0] >= 0.5 * (1.0 - TOL_PHYSICAL)
    }
}

/// The `(A, C; Cᵀ, B)` block form of a two-mode covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDecomposition {
    pub a: Matrix2<f64>,
    pub b: Matrix2<f64>,
    pub c: Matrix2<f64>,
}

impl BlockDecomposition {
    pub fn from_matrix4(m: &Matrix4<f64>) -> Self {
        Self {
            a: m.fixed_view::<2, 2>(0, 0).into_owned(),
            b: m.fixed_view::<2, 2>(2, 2).into_owned(),
            c: m.fixed_view::<2, 2>(0, 2).into_owned(),
        }
    }

    /// Blocks of a covariance that has the phase-insensitive structure
    /// `A = v11·I`, `B = v33·I`, `C = [[v13, v14], [v14, −v13]]`.
    pub fn from_elements(v11: f64, v33: f64, v13: f64, v14: f64) -> Self {
        Self {
            a: Matrix2::new(v11, 0.0, 0.0, v11),
            b: Matrix2::new(v33, 0.0, 0.0, v33),
            c: Matrix2::new(v13, v14, v14, -v13),
        }
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.c);
        m.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.c.transpose());
        m
    }

    pub fn to_covmat(&self) -> Result<CovMat> {
        let m = self.to_matrix4();
        CovMat::from_matrix(DMatrix::from_iterator(4, 4, m.iter().copied()))
    }
}

/// Reduced covariance of modes `i < j`.
pub fn extract_pair(v: &CovMat, i: usize, j: usize) -> Result<BlockDecomposition> {
    let dim = v.dim();
    if i >= j || j >= dim {
        return Err(Error::ModeIndex { i, j, dim });
    }
    let m = v.matrix();
    let (ri, rj) = (2 * i, 2 * j);
    Ok(BlockDecomposition {
        a: m.fixed_view::<2, 2>(ri, ri).into_owned(),
        b: m.fixed_view::<2, 2>(rj, rj).into_owned(),
        c: m.fixed_view::<2, 2>(ri, rj).into_owned(),
    })
}

/// `Σ = det A + det B − 2 det C` and `det V`. The sign of the `det C` term
/// implements the partial transposition of the second mode.
pub fn sigma_delta(blocks: &BlockDecomposition) -> (f64, f64) {
    let sigma = blocks.a.determinant() + blocks.b.determinant() - 2.0 * blocks.c.determinant();
    (sigma, blocks.to_matrix4().determinant())
}

/// Smallest symplectic eigenvalue of the partially transposed two-mode state.
pub fn lambda_minus(blocks: &BlockDecomposition) -> Result<f64> {
    if blocks.c.iter().all(|&x| x == 0.0) {
        // Product state: the spectrum is that of the two local blocks.
        let (da, db) = (blocks.a.determinant(), blocks.b.determinant());
        return Ok(da.min(db).max(0.0).sqrt());
    }
    let (sigma, det) = sigma_delta(blocks);
    let disc = sigma * sigma - 4.0 * det;
    if disc < -TOL_SQRT * (sigma * sigma).max(1.0) {
        return Err(Error::DiscriminantNegative(disc));
    }
    let root = disc.max(0.0).sqrt();
    // (Σ − √disc)/2 rewritten as 2 det/(Σ + √disc) to avoid cancellation.
    let denom = sigma + root;
    let lam_sq = if denom > 0.0 {
        2.0 * det / denom
    } else {
        0.5 * (sigma - root)
    };
    Ok(lam_sq.max(0.0).sqrt())
}

/// `E_N = max(0, −ln 2λ₋)`.
pub fn log_negativity(blocks: &BlockDecomposition) -> Result<f64> {
    Ok(log_negativity_from_lambda(lambda_minus(blocks)?))
}

pub fn log_negativity_from_lambda(lambda: f64) -> f64 {
    (-(2.0 * lambda).ln()).max(0.0)
}

/// Symplectic spectrum, sorted ascending, one value per mode.
///
/// With `V = L·Lᵀ` the antisymmetric `Lᵀ·Ω·L` is similar to `ΩV` up to a
/// factor, so its singular values are the symplectic eigenvalues, each
/// twice. Falls back to the eigenvalues of `ΩV` when `V` is not positive
/// definite.
pub fn symplectic_spectrum(v: &CovMat) -> Vec<f64> {
    let n = v.matrix().nrows();
    let omega = symplectic_form(n / 2);
    let mut sv: Vec<f64> = match v.matrix().clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let k = l.transpose() * &omega * l;
            k.singular_values().iter().copied().collect()
        }
        None => (&omega * v.matrix())
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect(),
    };
    sv.sort_by(|a, b| a.total_cmp(b));
    sv.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// `Ω = ⊕ [[0, 1], [−1, 0]]` for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}
