//! Gaussian-state simulation of pulsed photon–phonon entanglement in
//! Brillouin-active waveguides.
//!
//! Three independent routes to the same covariance dynamics are provided:
//! closed-form solutions ([`analytic`]), Lyapunov moment integration
//! ([`propagator::lyapunov_propagate`]) and a Monte-Carlo stochastic oracle
//! ([`propagator::mc_oracle`]).

pub mod analytic;
pub mod cli;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod propagator;

pub use error::{Error, Result};
pub use gaussian::{extract_pair, lambda_minus, log_negativity, sigma_delta, BlockDecomposition, CovMat};
pub use model::{DriftDiffusion, ProtocolTimeline, SystemParams};
