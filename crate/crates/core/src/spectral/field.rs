//! Real vector fields stored by their Fourier coefficients on a [`ModeSet`].

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::modes::{FullRef, ModeSet, WaveVector};
use crate::error::{Error, Result};
use crate::Scalar;

/// Complex 3-vector; planar fields keep the third entry at zero.
pub type CVec<T> = [Complex<T>; 3];

pub fn czero<T: Scalar>() -> CVec<T> {
    [Complex::new(T::zero(), T::zero()); 3]
}

pub fn cvec_dot_k<T: Scalar>(k: &[T; 3], a: &CVec<T>) -> Complex<T> {
    a[0] * k[0] + a[1] * k[1] + a[2] * k[2]
}

pub fn cvec_norm_sq<T: Scalar>(a: &CVec<T>) -> T {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

pub fn cvec_conj<T: Scalar>(a: &CVec<T>) -> CVec<T> {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

/// Coefficient of `k` with its divergent part removed. A coefficient whose
/// divergent part is already at rounding level is returned untouched, which
/// makes the projection exactly idempotent.
pub fn project_vec<T: Scalar>(k: &[T; 3], a: &CVec<T>) -> CVec<T> {
    let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let dot = cvec_dot_k(k, a);
    if dot.norm_sqr() <= (T::lit(16.0) * T::epsilon()).powi(2) * kk * cvec_norm_sq(a) {
        return *a;
    }
    let s = dot / kk;
    [a[0] - s * k[0], a[1] - s * k[1], a[2] - s * k[2]]
}

/// Real vector field `u(x) = sum_k u_k e^{i k.x}` with `u_{-k} = conj(u_k)`,
/// represented by the coefficients on the canonical half of its mode set.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T> {
    modes: ModeSet,
    coeffs: Vec<CVec<T>>,
}

impl<T: Scalar> SpectralField<T> {
    pub fn zeros(modes: &ModeSet) -> Self {
        SpectralField {
            modes: modes.clone(),
            coeffs: vec![czero(); modes.len()],
        }
    }

    pub fn from_fn<F: FnMut(WaveVector) -> CVec<T>>(modes: &ModeSet, mut f: F) -> Self {
        let coeffs = modes.modes().iter().map(|&k| f(k)).collect();
        SpectralField {
            modes: modes.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(modes: &ModeSet, coeffs: Vec<CVec<T>>) -> Result<Self> {
        if coeffs.len() != modes.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for {} modes",
                coeffs.len(),
                modes.len()
            )));
        }
        Ok(SpectralField {
            modes: modes.clone(),
            coeffs,
        })
    }

    /// Field `c e^{ik.x} + conj(c) e^{-ik.x}`.
    pub fn single(modes: &ModeSet, k: WaveVector, c: CVec<T>) -> Result<Self> {
        let mut f = Self::zeros(modes);
        f.set(k, c)?;
        Ok(f)
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes.dim()
    }

    pub fn coeffs(&self) -> &[CVec<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [CVec<T>] {
        &mut self.coeffs
    }

    pub fn value(&self, r: FullRef) -> CVec<T> {
        let c = &self.coeffs[r.index];
        if r.conj {
            cvec_conj(c)
        } else {
            *c
        }
    }

    /// Coefficient at any `k`, zero outside the mode set.
    pub fn get(&self, k: WaveVector) -> CVec<T> {
        match self.modes.find(k) {
            Some(r) if !k.is_zero() => self.value(r),
            _ => czero(),
        }
    }

    /// Sets the coefficient at `k`; the one at `-k` follows by conjugation.
    pub fn set(&mut self, k: WaveVector, c: CVec<T>) -> Result<()> {
        let r = self
            .modes
            .find(k)
            .filter(|_| !k.is_zero())
            .ok_or_else(|| Error::InvalidInput(format!("{k} not in mode set")))?;
        self.coeffs[r.index] = if r.conj { cvec_conj(&c) } else { c };
        Ok(())
    }

    pub fn ensure_same_modes(&self, other: &Self) -> Result<()> {
        if self.modes.same_as(&other.modes) {
            Ok(())
        } else {
            Err(Error::ModeMismatch)
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn scale(&mut self, a: T) {
        for c in &mut self.coeffs {
            for z in c.iter_mut() {
                *z = *z * a;
            }
        }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: T, x: &Self) {
        assert!(self.modes.same_as(&x.modes), "axpy on different mode sets");
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            for i in 0..3 {
                c[i] = c[i] + d[i] * a;
            }
        }
    }

    /// Multiplies every coefficient by `i`; this is no longer the same real field.
    pub fn times_i(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            for z in c.iter_mut() {
                *z = Complex::new(-z.im, z.re);
            }
        }
        out
    }

    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        for (k, c) in self.modes.modes().iter().zip(out.coeffs.iter_mut()) {
            *c = project_vec(&k.to_array(), c);
        }
        out
    }

    /// Stokes operator: multiplication by `|k|^2`.
    pub fn stokes(&self) -> Self {
        self.map_by_norm(|n| n)
    }

    /// Inverse Stokes operator: division by `|k|^2`.
    pub fn stokes_inverse(&self) -> Self {
        self.map_by_norm(|n| T::one() / n)
    }

    fn map_by_norm<F: Fn(T) -> T>(&self, f: F) -> Self {
        let mut out = self.clone();
        for (k, c) in self.modes.modes().iter().zip(out.coeffs.iter_mut()) {
            let s = f(T::lit(k.norm_sq() as f64));
            for z in c.iter_mut() {
                *z = *z * s;
            }
        }
        out
    }

    fn raw_inner<F: Fn(i64) -> T>(&self, other: &Self, weight: F) -> Result<T> {
        self.ensure_same_modes(other)?;
        let mut s = T::zero();
        for ((k, a), b) in self.modes.modes().iter().zip(&self.coeffs).zip(&other.coeffs) {
            let mut t = T::zero();
            for i in 0..3 {
                t = t + (a[i] * b[i].conj()).re;
            }
            s = s + weight(k.norm_sq()) * t;
        }
        Ok(s)
    }

    fn volume_factor(&self) -> T {
        let two_pi = T::PI() + T::PI();
        two_pi.powi(self.dim() as i32) * T::lit(2.0)
    }

    /// `L^2` inner product over the torus `[0, 2pi]^d`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        Ok(self.volume_factor() * self.raw_inner(other, |_| T::one())?)
    }

    /// `L^2` norm over the torus.
    pub fn h_norm(&self) -> T {
        self.inner(self).expect("same field").sqrt()
    }

    /// `<A u, v>`.
    pub fn v_inner(&self, other: &Self) -> Result<T> {
        Ok(self.volume_factor() * self.raw_inner(other, |n| T::lit(n as f64))?)
    }

    /// `|A^{1/2} u|`.
    pub fn v_norm(&self) -> T {
        self.v_inner(self).expect("same field").sqrt()
    }

    /// `|A u|`.
    pub fn a_norm(&self) -> T {
        self.stokes().h_norm()
    }

    /// Coefficient inner product: real part of the sum over canonical modes.
    pub fn z_inner(&self, other: &Self) -> Result<T> {
        self.raw_inner(other, |_| T::one())
    }

    /// Coefficient norm; `|u|^2 = 2 (2pi)^d ||u||_Z^2`.
    pub fn z_norm(&self) -> T {
        self.coeffs.iter().map(cvec_norm_sq).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| cvec_norm_sq(c).sqrt())
            .fold(T::zero(), T::max)
    }

    /// Largest `|k . u_k| / |k|` over the modes.
    pub fn divergence_defect(&self) -> T {
        self.modes
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(k, c)| {
                let ka = k.to_array::<T>();
                cvec_dot_k(&ka, c).norm() / T::lit(k.norm_sq() as f64).sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// `|k . u_k| <= 1e-12 |u_k|` on every mode.
    pub fn is_divergence_free(&self) -> bool {
        self.modes.modes().iter().zip(&self.coeffs).all(|(k, c)| {
            let ka = k.to_array::<T>();
            cvec_dot_k(&ka, c).norm() <= T::lit(1e-12) * cvec_norm_sq(c).sqrt() * T::lit(k.norm_sq() as f64).sqrt()
        })
    }

    /// Pointwise value, summed as the real part over canonical modes.
    pub fn eval(&self, x: [T; 3]) -> [T; 3] {
        let two = T::lit(2.0);
        let mut out = [T::zero(); 3];
        for (k, c) in self.modes.modes().iter().zip(&self.coeffs) {
            let ka = k.to_array::<T>();
            let ph = ka[0] * x[0] + ka[1] * x[1] + ka[2] * x[2];
            let e = Complex::new(ph.cos(), ph.sin());
            for i in 0..3 {
                out[i] = out[i] + two * (c[i] * e).re;
            }
        }
        out
    }

    /// Pointwise value summed explicitly over the full lattice `+-k`.
    pub fn eval_full(&self, x: [T; 3]) -> CVec<T> {
        let mut out = czero();
        for (k, c) in self.modes.modes().iter().zip(&self.coeffs) {
            let ka = k.to_array::<T>();
            let ph = ka[0] * x[0] + ka[1] * x[1] + ka[2] * x[2];
            let e = Complex::new(ph.cos(), ph.sin());
            for i in 0..3 {
                out[i] = out[i] + c[i] * e + c[i].conj() * e.conj();
            }
        }
        out
    }

    /// Flattens to `(re, im)` pairs per component, `2 d` reals per mode.
    pub fn to_real(&self) -> Vec<T> {
        let d = self.dim();
        let mut v = Vec::with_capacity(self.modes.real_len());
        for c in &self.coeffs {
            for z in c.iter().take(d) {
                v.push(z.re);
                v.push(z.im);
            }
        }
        v
    }

    pub fn from_real(modes: &ModeSet, v: &[T]) -> Result<Self> {
        if v.len() != modes.real_len() {
            return Err(Error::InvalidInput(format!(
                "{} reals for {} unknowns",
                v.len(),
                modes.real_len()
            )));
        }
        let d = modes.dim();
        let coeffs = v
            .chunks(2 * d)
            .map(|ch| {
                let mut c = czero();
                for i in 0..d {
                    c[i] = Complex::new(ch[2 * i], ch[2 * i + 1]);
                }
                c
            })
            .collect();
        Ok(SpectralField {
            modes: modes.clone(),
            coeffs,
        })
    }

    /// Converts the scalar type.
    pub fn cast<U: Scalar>(&self) -> SpectralField<U> {
        let cv = |z: Complex<T>| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()));
        SpectralField {
            modes: self.modes.clone(),
            coeffs: self.coeffs.iter().map(|c| c.map(cv)).collect(),
        }
    }

    /// Random divergence-free field with Gaussian coefficients, normalised to
    /// `||u||_Z = 1`.
    pub fn random_solenoidal<R: Rng + ?Sized>(modes: &ModeSet, rng: &mut R) -> Self {
        let d = modes.dim();
        loop {
            let f = Self::from_fn(modes, |_| {
                let mut c = czero();
                for z in c.iter_mut().take(d) {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *z = Complex::new(T::lit(re), T::lit(im));
                }
                c
            })
            .leray_project();
            let n = f.z_norm();
            if n > T::zero() {
                return f.scaled(T::one() / n);
            }
        }
    }

    /// Orthonormal (coefficient norm) real basis of the divergence-free fields.
    pub fn solenoidal_basis(modes: &ModeSet) -> Vec<Self> {
        let mut out = Vec::new();
        for (idx, k) in modes.modes().iter().enumerate() {
            for t in tangent_frame::<T>(modes.dim(), k) {
                for unit in [Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::one())] {
                    let mut f = Self::zeros(modes);
                    f.coeffs[idx] = t.map(|x| unit * x);
                    out.push(f);
                }
            }
        }
        out
    }
}

/// Real orthonormal vectors spanning the plane orthogonal to `k` (one vector in 2D).
pub fn tangent_frame<T: Scalar>(dim: usize, k: &WaveVector) -> Vec<[T; 3]> {
    let ka = k.to_array::<T>();
    let nk = T::lit(k.norm_sq() as f64).sqrt();
    let n = ka.map(|x| x / nk);
    if dim == 2 {
        return vec![[-n[1], n[0], T::zero()]];
    }
    // Pick the axis least aligned with k.
    let mut axis = 0;
    for i in 1..3 {
        if n[i].abs() < n[axis].abs() {
            axis = i;
        }
    }
    let mut e = [T::zero(); 3];
    e[axis] = T::one();
    let dot = n[axis];
    let mut t1 = [e[0] - dot * n[0], e[1] - dot * n[1], e[2] - dot * n[2]];
    let l = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
    t1 = t1.map(|x| x / l);
    let t2 = cross(&n, &t1);
    vec![t1, t2]
}

pub fn cross<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl<'a, T: Scalar> Add for &'a SpectralField<T> {
    type Output = SpectralField<T>;
    fn add(self, rhs: Self) -> SpectralField<T> {
        let mut out = self.clone();
        out.axpy(T::one(), rhs);
        out
    }
}

impl<'a, T: Scalar> Sub for &'a SpectralField<T> {
    type Output = SpectralField<T>;
    fn sub(self, rhs: Self) -> SpectralField<T> {
        let mut out = self.clone();
        out.axpy(-T::one(), rhs);
        out
    }
}

impl<T: Scalar> Add for SpectralField<T> {
    type Output = SpectralField<T>;
    fn add(mut self, rhs: Self) -> SpectralField<T> {
        self.axpy(T::one(), &rhs);
        self
    }
}

impl<T: Scalar> Sub for SpectralField<T> {
    type Output = SpectralField<T>;
    fn sub(mut self, rhs: Self) -> SpectralField<T> {
        self.axpy(-T::one(), &rhs);
        self
    }
}

impl<T: Scalar> AddAssign<&SpectralField<T>> for SpectralField<T> {
    fn add_assign(&mut self, rhs: &SpectralField<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Scalar> SubAssign<&SpectralField<T>> for SpectralField<T> {
    fn sub_assign(&mut self, rhs: &SpectralField<T>) {
        self.axpy(-T::one(), rhs);
    }
}

impl<T: Scalar> Neg for SpectralField<T> {
    type Output = SpectralField<T>;
    fn neg(mut self) -> SpectralField<T> {
        self.scale(-T::one());
        self
    }
}

impl<T: Scalar> Mul<T> for &SpectralField<T> {
    type Output = SpectralField<T>;
    fn mul(self, a: T) -> SpectralField<T> {
        self.scaled(a)
    }
}

impl<T: Scalar> Mul<T> for SpectralField<T> {
    type Output = SpectralField<T>;
    fn mul(mut self, a: T) -> SpectralField<T> {
        self.scale(a);
        self
    }
}
