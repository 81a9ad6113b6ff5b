use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode set: {0}")]
    InvalidModes(String),
    #[error("fields live on different mode sets")]
    ModeMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("singular Jacobian at alpha = {alpha:e}: fold or bifurcation suspected")]
    SingularJacobian { alpha: f64 },
    #[error("Newton stopped at alpha = {alpha:e} after {iterations} iterations, residual {residual:e}")]
    NoConvergence {
        alpha: f64,
        iterations: usize,
        residual: f64,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
