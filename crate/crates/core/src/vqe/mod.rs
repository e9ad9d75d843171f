//! Variational loop: the energy objective over MPS circuit simulation,
//! derivative-free optimizers, and the timed one-shot evaluation used by the
//! scaling benchmarks.
//!
//! Every optimizer evaluation is recorded in [`VqeResult::trace`];
//! [`VqeResult::accepted_trace`] gives the best-so-far energy.

mod nelder_mead;
mod problem;
mod trust_region;

pub use nelder_mead::{minimize_nelder_mead, NelderMeadConfig};
#[cfg(feature = "std")]
pub use problem::SystemClock;
pub use problem::{Clock, Evaluation, InitialParameters, NoClock, OneShot, OptimizerConfig, VqeProblem, VqeResult};
pub use trust_region::{minimize_trust_region, Minimum, TrustRegionConfig};
