//! Closed-form solutions and approximations.
//!
//! The write phase is solved exactly in terms of the operator amplitudes
//! `a(t) = F·a₀ + G·b₀† + noise` and `b†(t) = H·a₀ + K·b₀† + noise`, the
//! readout phase in terms of `ã(t) = F̃·ã₀ + G̃·b₀ + noise`. The covariance
//! elements follow from these amplitudes and exponential noise integrals.

mod approx;
mod coefficients;
mod readout;
mod write;

pub use approx::{
    covariance_elements_room, covariance_elements_strongcoupling, en_max, lambda_minus_cubic,
    lambda_minus_from_elements, lambda_minus_rational, lambda_minus_room,
};
pub use coefficients::{exp_integral, mode_coefficients, ModeCoefficients, Variant};
pub use readout::{
    analytic_readout_covariance, analytic_readout_covariance_since, lambda_tilde_minus_cubic,
    lambda_tilde_minus_poly, nas_transferred, readout_correlations, readout_correlations_from,
    ReadoutCorrelations,
};
pub use write::{covariance_entangle, write_moments, WriteMoments};
