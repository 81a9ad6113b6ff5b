//! The truncated nonlinear term `B(u, v) = P_N P (u . grad) v` and its
//! symmetrisation.

use num_complex::Complex;

use super::field::{czero, project_vec, CVec, SpectralField};
use super::modes::FullRef;
use crate::error::Result;
use crate::linalg::DenseMatrix;
use crate::Scalar;

fn full_vector<T: Scalar>(u: &SpectralField<T>, r: FullRef) -> [T; 3] {
    let k = u.modes().mode(r.index).to_array::<T>();
    if r.conj {
        k.map(|x| -x)
    } else {
        k
    }
}

fn dot_real<T: Scalar>(a: &CVec<T>, m: &[T; 3]) -> Complex<T> {
    a[0] * m[0] + a[1] * m[1] + a[2] * m[2]
}

fn times_i<T: Scalar>(z: Complex<T>) -> Complex<T> {
    Complex::new(-z.im, z.re)
}

/// Truncated advection `(u . grad) v` without projection.
pub fn advect<T: Scalar>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<SpectralField<T>> {
    u.ensure_same_modes(v)?;
    let modes = u.modes().clone();
    let mut out = SpectralField::zeros(&modes);
    for (t, c) in out.coeffs_mut().iter_mut().enumerate() {
        let mut acc = czero::<T>();
        for tr in modes.triads(t) {
            let m = full_vector(v, tr.right);
            let s = dot_real(&u.value(tr.left), &m);
            let vm = v.value(tr.right);
            for i in 0..3 {
                acc[i] = acc[i] + s * vm[i];
            }
        }
        *c = acc.map(times_i);
    }
    Ok(out)
}

/// `B(u, v)`: advection followed by the Leray projection.
pub fn bilinear<T: Scalar>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<SpectralField<T>> {
    Ok(advect(u, v)?.leray_project())
}

/// `B_s(u, v) = B(u, v) + B(v, u)`.
pub fn bilinear_sym<T: Scalar>(u: &SpectralField<T>, v: &SpectralField<T>) -> Result<SpectralField<T>> {
    let mut a = advect(u, v)?;
    a += &advect(v, u)?;
    Ok(a.leray_project())
}

/// Matrix of `w -> B_s(v, w)` in the real layout of [`SpectralField::to_real`].
pub fn bilinear_sym_matrix<T: Scalar>(v: &SpectralField<T>) -> DenseMatrix<T> {
    let modes = v.modes().clone();
    let d = modes.dim();
    let n = modes.real_len();
    let mut mat = DenseMatrix::zeros(n, n);
    let units = [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::one())];
    let mut column: Vec<(usize, CVec<T>)> = Vec::new();
    for c in 0..modes.len() {
        for comp in 0..d {
            for (part, unit) in units.iter().enumerate() {
                let mut e = czero::<T>();
                e[comp] = *unit;
                let w_at = |r: FullRef| -> CVec<T> {
                    if r.index != c {
                        czero()
                    } else if r.conj {
                        super::field::cvec_conj(&e)
                    } else {
                        e
                    }
                };
                column.clear();
                for &(t, ti) in modes.touching(c) {
                    let tr = modes.triads(t)[ti];
                    let m = full_vector(v, tr.right);
                    let wl = w_at(tr.left);
                    let wr = w_at(tr.right);
                    let vl = v.value(tr.left);
                    let vr = v.value(tr.right);
                    let s_v = dot_real(&vl, &m);
                    let s_w = dot_real(&wl, &m);
                    let mut acc = czero::<T>();
                    for i in 0..3 {
                        acc[i] = s_v * wr[i] + s_w * vr[i];
                    }
                    match column.iter_mut().find(|(tt, _)| *tt == t) {
                        Some((_, a)) => {
                            for i in 0..3 {
                                a[i] = a[i] + acc[i];
                            }
                        }
                        None => column.push((t, acc)),
                    }
                }
                let col = 2 * d * c + 2 * comp + part;
                for (t, acc) in &column {
                    let k = modes.mode(*t).to_array::<T>();
                    let p = project_vec(&k, &acc.map(times_i));
                    for i in 0..d {
                        mat[(2 * d * t + 2 * i, col)] = p[i].re;
                        mat[(2 * d * t + 2 * i + 1, col)] = p[i].im;
                    }
                }
            }
        }
    }
    mat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ModeSet, WaveVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn shear_pair_coefficients() {
        // u = (sin z, sin x, 0)
        let m = ModeSet::ball(3, 9.0).unwrap();
        let z = c(0.0, 0.0);
        let h = c(0.0, -0.5);
        let mut u = SpectralField::zeros(&m);
        u.set(WaveVector::new(1, 0, 0), [z, h, z]).unwrap();
        u.set(WaveVector::new(0, 0, 1), [h, z, z]).unwrap();
        let b = bilinear(&u, &u).unwrap();
        let want = c(0.0, -0.25);
        let b1 = b.get(WaveVector::new(1, 0, 1));
        let b2 = b.get(WaveVector::new(-1, 0, 1));
        assert!((b1[1] - want).norm() < 1e-15);
        assert!((b2[1] - want).norm() < 1e-15);
        let rest: f64 = b.z_norm().powi(2) - 2.0 * 0.0625;
        assert!(rest.abs() < 1e-15);
    }

    #[test]
    fn two_mode_sum_coefficient() {
        // u1 = e2 (E_{e1} + E_{-e1}), u2 = e3 (E_{e2} + E_{-e2})
        let m = ModeSet::ball(3, 2.0).unwrap();
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let u1 = SpectralField::single(&m, WaveVector::new(1, 0, 0), [z, one, z]).unwrap();
        let u2 = SpectralField::single(&m, WaveVector::new(0, 1, 0), [z, z, one]).unwrap();
        let a = advect(&u1, &u2).unwrap() + advect(&u2, &u1).unwrap();
        let at = a.get(WaveVector::new(1, 1, 0));
        assert!((at[2] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(at[0].norm() < 1e-15 && at[1].norm() < 1e-15);
    }

    #[test]
    fn matrix_matches_direct_application() {
        for (dim, cut) in [(2, 5.0), (3, 4.0)] {
            let m = ModeSet::ball(dim, cut).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let v = SpectralField::<f64>::random_solenoidal(&m, &mut rng);
            let w = SpectralField::<f64>::random_solenoidal(&m, &mut rng);
            let direct = bilinear_sym(&v, &w).unwrap().to_real();
            let via = bilinear_sym_matrix(&v).mul_vec(&w.to_real());
            let err: f64 = direct.iter().zip(&via).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-13, "dim {dim}: {err}");
        }
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = SpectralField::<f64>::zeros(&ModeSet::ball(2, 2.0).unwrap());
        let b = SpectralField::<f64>::zeros(&ModeSet::ball(2, 4.0).unwrap());
        assert!(bilinear(&a, &b).is_err());
    }
}
