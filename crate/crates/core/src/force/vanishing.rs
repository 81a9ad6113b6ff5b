//! Forces with a prescribed nonzero limit whose steady states tend to zero.

use crate::error::{Error, Result};
use crate::spectral::{bilinear, SpectralField};
use crate::Scalar;

/// `v_n = alpha_n^{-1/2} w1`, `g_n = g + alpha_n^{-1/2} h1` with
/// `g = B(w1, w1)`, `h1 = A w1`.
#[derive(Clone, Debug)]
pub struct VanishingPair<T> {
    pub w1: SpectralField<T>,
    pub g: SpectralField<T>,
    pub h1: SpectralField<T>,
    pub alphas: Vec<T>,
    pub states: Vec<SpectralField<T>>,
    pub forces: Vec<SpectralField<T>>,
    /// `|A v_n + alpha_n B(v_n, v_n) - g_n|`.
    pub residuals: Vec<T>,
}

/// Scales `u` so that `|B(w1, w1)| = m` and tabulates the pair at `alphas`.
/// Needs `B(u, u) != 0`.
pub fn vanishing_limit_pair<T: Scalar>(u: &SpectralField<T>, m: T, alphas: &[T]) -> Result<VanishingPair<T>> {
    if !(m > T::zero()) {
        return Err(Error::InvalidInput(format!("limit norm must be positive, got {m}")));
    }
    let buu = bilinear(u, u)?.h_norm();
    let un = u.h_norm();
    if buu <= T::epsilon() * T::lit(1e3) * un * u.v_norm() {
        return Err(Error::Precondition(format!(
            "B(u, u) must not vanish, |B(u, u)| = {buu:e}"
        )));
    }
    let w1 = u.scaled((m / buu).sqrt());
    let g = bilinear(&w1, &w1)?;
    let h1 = w1.stokes();
    let mut states = Vec::with_capacity(alphas.len());
    let mut forces = Vec::with_capacity(alphas.len());
    let mut residuals = Vec::with_capacity(alphas.len());
    for &a in alphas {
        if !(a > T::zero()) {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {a}")));
        }
        let s = T::one() / a.sqrt();
        let v = w1.scaled(s);
        let mut gn = g.clone();
        gn.axpy(s, &h1);
        let mut r = v.stokes();
        r.axpy(a, &bilinear(&v, &v)?);
        r -= &gn;
        residuals.push(r.h_norm());
        states.push(v);
        forces.push(gn);
    }
    Ok(VanishingPair {
        w1,
        g,
        h1,
        alphas: alphas.to_vec(),
        states,
        forces,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{advect, ModeSet, WaveVector};
    use num_complex::Complex;

    fn two_mode_pair(m: &ModeSet) -> SpectralField<f64> {
        // e2 (E_{e1} + E_{-e1}) + e3 (E_{e2} + E_{-e2})
        let o = Complex::new(1.0, 0.0);
        let z = Complex::new(0.0, 0.0);
        let mut u = SpectralField::zeros(m);
        u.set(WaveVector::new(1, 0, 0), [z, o, z]).unwrap();
        u.set(WaveVector::new(0, 1, 0), [z, z, o]).unwrap();
        u
    }

    #[test]
    fn crossed_modes_produce_an_out_of_plane_coefficient() {
        let m = ModeSet::ball(3, 2.0).unwrap();
        let u = two_mode_pair(&m);
        // (u . grad) u at e1 + e2 before projection: the e2 component of the
        // first mode times i k_2 of the second mode's e3 coefficient.
        let c = advect(&u, &u).unwrap().get(WaveVector::new(1, 1, 0));
        assert_eq!(c[0], Complex::new(0.0, 0.0));
        assert_eq!(c[1], Complex::new(0.0, 0.0));
        assert!(c[2].re.abs() < 1e-15 && c[2].im > 0.0);
        assert!(bilinear(&u, &u).unwrap().z_norm() > 0.0);
    }

    #[test]
    fn force_norm_is_exact_and_states_are_steady() {
        let m = ModeSet::ball(3, 2.0).unwrap();
        let alphas: Vec<f64> = (0..10).map(|n| 2f64.powi(n)).collect();
        let p = vanishing_limit_pair(&two_mode_pair(&m), 4.0, &alphas).unwrap();
        assert!((p.g.h_norm() - 4.0).abs() <= 1e-12 * 4.0);
        for r in &p.residuals {
            assert!(*r <= 1e-12 * 5.0, "{r}");
        }
    }

    #[test]
    fn single_mode_field_is_rejected() {
        let m = ModeSet::ball(3, 2.0).unwrap();
        let z = Complex::new(0.0, 0.0);
        let u = SpectralField::single(&m, WaveVector::new(1, 0, 0), [z, Complex::new(1.0, 0.0), z]).unwrap();
        assert!(matches!(vanishing_limit_pair(&u, 1.0, &[1.0]), Err(Error::Precondition(_))));
    }
}
