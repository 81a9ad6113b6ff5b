//! Steady states of the Galerkin-truncated periodic Navier-Stokes equations
//! `A v + alpha B(v, v) = g` at large Grashof number: branch continuation,
//! unitary asymptotic expansions, order classification of the limiting
//! balances, and constructions of forces realising them.

pub mod benchmark;
pub mod error;
pub mod expansion;
pub mod force;
pub mod linalg;
pub mod order;
mod scalar;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spectral::{ModeSet, SpectralField, WaveVector};

/// Double-precision field.
pub type Field = SpectralField<f64>;
/// Single-precision field.
pub type Field32 = SpectralField<f32>;
