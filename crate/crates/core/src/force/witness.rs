//! Fields certifying that `B_s(v, .)` is not identically zero, and a mode
//! set on which it is.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::spectral::{bilinear_sym, cross, cvec_norm_sq, czero, ModeSet, SpectralField, WaveVector};
use crate::Scalar;

/// `w = c (E_{k'} + E_{-k'})` with `B_s(v, w) != 0`.
#[derive(Clone, Debug)]
pub struct BsWitness<T> {
    pub w: SpectralField<T>,
    /// Lexicographically largest mode of `v`.
    pub k: WaveVector,
    pub k_prime: WaveVector,
    /// `||B_s(v, w)||_Z`.
    pub margin: T,
    /// Size of the coefficient of `B_s(v, w)` at `k + k'`.
    pub coefficient: T,
}

/// Smallest witness margin accepted.
pub const WITNESS_MARGIN: f64 = 1e-8;

/// Partner mode for a planar `k` with `k` lexicographically maximal.
pub fn planar_partner(k: WaveVector) -> WaveVector {
    let [k1, k2, _] = k.0;
    match (k1, k2.abs()) {
        (k1, _) if k1 >= 2 => WaveVector::planar(0, 1),
        (1, a) if a >= 1 => WaveVector::planar(0, 1),
        (1, _) => WaveVector::planar(0, 2),
        (_, a) if a >= 2 => WaveVector::planar(1, 0),
        _ => WaveVector::planar(2, 0),
    }
}

/// Builds `w` from the largest mode `k` of `v`: in 2D `k'` follows
/// [`planar_partner`] and the amplitude is `e3 x k'`; in 3D `k'` is the first
/// axis not parallel to `k` that the coefficient of `v` at `k` has a
/// component along, with amplitude `k x k'`. Needs a ball of radius
/// `sqrt(Lambda) >= sqrt(5)` and `v` supported in `|k| <= sqrt(Lambda) - 1`.
pub fn find_bs_witness<T: Scalar>(v: &SpectralField<T>) -> Result<BsWitness<T>> {
    let modes = v.modes();
    let lambda = modes
        .cutoff()
        .ok_or_else(|| Error::Precondition("witness needs a ball-shaped mode set".into()))?;
    if lambda < 5.0 {
        return Err(Error::Precondition(format!("witness needs Lambda >= 5, got {lambda}")));
    }
    let floor = v.max_abs() * T::lit(1e-14);
    if v.max_abs() == T::zero() {
        return Err(Error::InvalidInput("v is zero".into()));
    }
    let support: Vec<WaveVector> = modes
        .modes()
        .iter()
        .zip(v.coeffs())
        .filter(|(_, c)| cvec_norm_sq(c).sqrt() > floor)
        .map(|(k, _)| *k)
        .collect();
    let radius = lambda.sqrt() - 1.0;
    if let Some(k) = support.iter().find(|k| (k.norm_sq() as f64).sqrt() > radius + 1e-12) {
        return Err(Error::Precondition(format!("v has mode {k} beyond |k| <= sqrt(Lambda) - 1 = {radius}")));
    }
    // Canonical vectors are the larger of each +-pair.
    let k = *support.iter().max().expect("nonzero v");
    let (k_prime, amp) = if modes.dim() == 2 {
        let kp = planar_partner(k);
        (kp, cross(&[T::zero(), T::zero(), T::one()], &kp.to_array::<T>()))
    } else {
        let a = v.get(k);
        let an = cvec_norm_sq(&a).sqrt();
        let axis = |i: usize| {
            let mut e = [0; 3];
            e[i] = 1;
            WaveVector(e)
        };
        let kp = (0..3)
            .find(|&i| !k.is_parallel(&axis(i)) && a[i].norm() > T::lit(1e-8) * an)
            .map(axis)
            .ok_or_else(|| Error::Numerical(format!("no axis partner for {k}")))?;
        (kp, cross(&k.to_array::<T>(), &kp.to_array::<T>()))
    };
    let mut w = SpectralField::zeros(modes);
    let mut c = czero::<T>();
    for i in 0..3 {
        c[i] = Complex::new(amp[i], T::zero());
    }
    w.set(k_prime, c)?;
    let bs = bilinear_sym(v, &w)?;
    let margin = bs.z_norm();
    let coefficient = cvec_norm_sq(&bs.get(k + k_prime)).sqrt();
    if margin <= T::lit(WITNESS_MARGIN) {
        return Err(Error::Numerical(format!("witness margin {margin:e} too small for k = {k}, k' = {k_prime}")));
    }
    Ok(BsWitness {
        w,
        k,
        k_prime,
        margin,
        coefficient,
    })
}

/// Mode set `{+-k} u {0 < |j| <= M} u K3` on which `B_s(v, .) = 0` for every
/// `v` supported on `+-k`.
#[derive(Clone, Debug)]
pub struct ZeroBsSpace {
    pub modes: ModeSet,
    pub k: WaveVector,
    /// Members of `K3` already inside the ball `|j| <= M`.
    pub merged: Vec<WaveVector>,
    /// Largest `||B_s(v, u)||_Z` over basis `v` on `+-k` and every basis `u`.
    pub max_defect: f64,
    pub checks: usize,
}

/// Largest defect accepted by [`ZeroBsSpace::passed`].
pub const ZERO_BS_TOL: f64 = 1e-12;

impl ZeroBsSpace {
    pub fn passed(&self) -> bool {
        self.max_defect <= ZERO_BS_TOL
    }

    /// Basis fields supported on `+-k`.
    pub fn base_fields(&self) -> Vec<SpectralField<f64>> {
        SpectralField::<f64>::solenoidal_basis(&self.modes)
            .into_iter()
            .filter(|b| b.get(self.k) != czero())
            .collect()
    }
}

/// Builds the space after checking `|k| > 2M`, and that `K3` is symmetric,
/// nonzero and orthogonal to `k`; then sweeps the basis.
pub fn zero_bs_subspace(dim: usize, k: WaveVector, m_bound: f64, k3: &[WaveVector]) -> Result<ZeroBsSpace> {
    if !(m_bound > 0.0) {
        return Err(Error::InvalidInput(format!("M must be positive, got {m_bound}")));
    }
    if (k.norm_sq() as f64) <= 4.0 * m_bound * m_bound {
        return Err(Error::InvalidInput(format!("|k| > 2M fails: |k|^2 = {}, 2M = {}", k.norm_sq(), 2.0 * m_bound)));
    }
    for j in k3 {
        if j.is_zero() {
            return Err(Error::InvalidInput("K3 contains the zero vector".into()));
        }
        if j.dot(&k) != 0 {
            return Err(Error::InvalidInput(format!("K3 member {j} is not orthogonal to {k}")));
        }
        if !k3.contains(&-*j) {
            return Err(Error::InvalidInput(format!("K3 is not symmetric: {} missing", -*j)));
        }
    }
    let r = m_bound.floor() as i32;
    let zr = if dim == 3 { r } else { 0 };
    let mut ball = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -zr..=zr {
                let j = WaveVector::new(a, b, c);
                if !j.is_zero() && (j.norm_sq() as f64) <= m_bound * m_bound {
                    ball.push(j);
                }
            }
        }
    }
    let merged: Vec<WaveVector> = k3.iter().copied().filter(|j| ball.contains(j)).collect();
    let modes = ModeSet::custom(dim, std::iter::once(k).chain(ball).chain(k3.iter().copied()))?;
    let mut space = ZeroBsSpace {
        modes,
        k,
        merged,
        max_defect: 0.0,
        checks: 0,
    };
    let all = SpectralField::<f64>::solenoidal_basis(&space.modes);
    for v in space.base_fields() {
        for u in &all {
            space.max_defect = space.max_defect.max(bilinear_sym(&v, u)?.z_norm());
            space.checks += 1;
        }
    }
    Ok(space)
}
