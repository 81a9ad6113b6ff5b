//! Steady states: residual, Newton's method and natural continuation in `alpha`.

mod continuation;
pub mod io;
mod newton;

pub use continuation::{continue_branch, ContinuationOptions, ContinuationRun, Predictor, Spacing, StepPolicy, Termination};
pub use newton::{jacobian, newton_solve, picard_iterate, residual, NewtonFailure, NewtonOptions, SteadyState};
