use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode index out of range: ({i}, {j}) for a {dim}-mode state")]
    ModeIndex { i: usize, j: usize, dim: usize },

    #[error("covariance matrix must be square with even side 4 or 6, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("negative discriminant Σ² − 4 det V = {0:e}")]
    DiscriminantNegative(f64),

    #[error("coupled-mode roots are degenerate (|τ₊ − τ₋| = {0:e})")]
    DegenerateRoots(f64),

    #[error("heating dominates: 2 (g / Γ n_th)² = {0} ≥ 1")]
    HeatingDominates(f64),

    #[error("integrator step size underflow at t = {t:e} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
