//! Numerical engines: Lyapunov integration of the covariance, the
//! three-phase protocol, and a Monte-Carlo oracle.

mod lyapunov;
mod mc;
mod protocol;

pub use lyapunov::{lyapunov_propagate, lyapunov_propagate_with, Tolerances};
pub use mc::{mc_oracle, mc_step_size, McEstimate, RNG_ALGORITHM};
pub use protocol::{refine_peak, run_protocol, run_protocol_with, Pair, Peak, Phase, Sampling, Trajectory};

pub use crate::model::ProtocolTimeline;
