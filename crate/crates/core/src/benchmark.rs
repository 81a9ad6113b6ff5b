//! The shear-flow benchmark: `u = (sin z, sin x, 0)` on the 3-torus, which has
//! `A u = u`, and the force making `-u` a steady state at `alpha = 1`.

use num_complex::Complex;

use crate::error::Result;
use crate::spectral::{bilinear, ModeSet, SpectralField, WaveVector};
use crate::Scalar;

/// `u = (sin z, sin x, 0)`.
pub fn shear_flow<T: Scalar>(modes: &ModeSet) -> Result<SpectralField<T>> {
    let z = Complex::new(T::zero(), T::zero());
    let h = Complex::new(T::zero(), T::lit(-0.5));
    let mut u = SpectralField::zeros(modes);
    u.set(WaveVector::new(1, 0, 0), [z, h, z])?;
    u.set(WaveVector::new(0, 0, 1), [h, z, z])?;
    Ok(u)
}

/// Benchmark data: the flow `u`, the starting state `-u` and the force
/// `g = -u + B(u, u) = A(-u) + B(-u, -u)`.
#[derive(Clone, Debug)]
pub struct ShearBenchmark<T> {
    pub flow: SpectralField<T>,
    pub start: SpectralField<T>,
    pub force: SpectralField<T>,
}

impl<T: Scalar> ShearBenchmark<T> {
    pub fn new(modes: &ModeSet) -> Result<Self> {
        let flow = shear_flow(modes)?;
        let start = -flow.clone();
        let force = &start.stokes() + &bilinear(&flow, &flow)?;
        Ok(ShearBenchmark { flow, start, force })
    }

    /// The benchmark on the 3-torus with `|k|^2 <= 9`.
    pub fn standard() -> Result<Self> {
        Self::new(&ModeSet::ball(3, 9.0)?)
    }
}
