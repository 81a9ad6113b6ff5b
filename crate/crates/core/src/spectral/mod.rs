//! Galerkin truncation of the periodic Navier-Stokes operators.

mod bilinear;
mod field;
pub mod io;
mod modes;

pub use bilinear::{advect, bilinear, bilinear_sym, bilinear_sym_matrix};
pub use field::{cross, cvec_dot_k, cvec_norm_sq, czero, project_vec, tangent_frame, CVec, SpectralField};
pub use modes::{FullRef, ModeSet, Triad, WaveVector};
