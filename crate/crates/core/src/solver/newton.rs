use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::spectral::{bilinear, bilinear_sym_matrix, SpectralField};
use crate::Scalar;

/// `A v + alpha B(v, v) - g`.
pub fn residual<T: Scalar>(alpha: T, v: &SpectralField<T>, g: &SpectralField<T>) -> Result<SpectralField<T>> {
    v.ensure_same_modes(g)?;
    let mut r = v.stokes();
    r.axpy(alpha, &bilinear(v, v)?);
    r -= g;
    Ok(r)
}

/// Dense matrix of `w -> A w + alpha B_s(v, w)` in the real layout.
pub fn jacobian<T: Scalar>(alpha: T, v: &SpectralField<T>) -> DenseMatrix<T> {
    let modes = v.modes();
    let d = modes.dim();
    let mut j = bilinear_sym_matrix(v);
    j.scale(alpha);
    for (idx, k) in modes.modes().iter().enumerate() {
        let kk = T::lit(k.norm_sq() as f64);
        for r in 2 * d * idx..2 * d * (idx + 1) {
            j[(r, r)] = j[(r, r)] + kk;
        }
    }
    j
}

/// Converged solution of the steady equation at one parameter value.
#[derive(Clone, Debug)]
pub struct SteadyState<T> {
    pub alpha: T,
    pub v: SpectralField<T>,
    /// Coefficient norm of the residual.
    pub residual: T,
    pub newton_iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions<T> {
    /// Stop once the residual coefficient norm is at most this.
    pub tol: T,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for NewtonOptions<T> {
    fn default() -> Self {
        NewtonOptions {
            tol: T::lit(1e-9),
            max_iterations: 25,
        }
    }
}

#[derive(Clone, Debug)]
pub enum NewtonFailure<T> {
    /// A pivot of the Jacobian vanished.
    Singular { alpha: T },
    /// Iteration budget exhausted or divergence; carries the last iterate.
    NoConvergence(Box<SteadyState<T>>),
}

impl<T: Scalar> From<NewtonFailure<T>> for Error {
    fn from(f: NewtonFailure<T>) -> Error {
        match f {
            NewtonFailure::Singular { alpha } => Error::SingularJacobian { alpha: alpha.as_f64() },
            NewtonFailure::NoConvergence(s) => Error::NoConvergence {
                alpha: s.alpha.as_f64(),
                iterations: s.newton_iterations,
                residual: s.residual.as_f64(),
            },
        }
    }
}

fn check_force<T: Scalar>(g: &SpectralField<T>) -> Result<()> {
    let scale = g.max_abs().max(T::min_positive_value());
    if g.divergence_defect() > T::lit(1e3) * T::epsilon() * scale {
        return Err(Error::InvalidInput("force is not divergence-free".into()));
    }
    Ok(())
}

/// Newton's method for `A v + alpha B(v, v) = g` started from `init`.
pub fn newton_solve<T: Scalar>(
    alpha: T,
    g: &SpectralField<T>,
    init: &SpectralField<T>,
    opts: &NewtonOptions<T>,
) -> Result<std::result::Result<SteadyState<T>, NewtonFailure<T>>> {
    check_force(g)?;
    init.ensure_same_modes(g)?;
    let mut v = init.leray_project();
    let mut r = residual(alpha, &v, g)?;
    let mut rn = r.z_norm();
    let first = rn;
    for it in 0..=opts.max_iterations {
        if rn <= opts.tol {
            return Ok(Ok(SteadyState {
                alpha,
                v,
                residual: rn,
                newton_iterations: it,
            }));
        }
        let diverged = !rn.is_finite() || rn > T::lit(1e8) * first.max(T::one());
        if it == opts.max_iterations || diverged {
            break;
        }
        let lu = match jacobian(alpha, &v).lu() {
            Some(lu) => lu,
            None => return Ok(Err(NewtonFailure::Singular { alpha })),
        };
        let rhs: Vec<T> = r.to_real().into_iter().map(|x| -x).collect();
        let step = SpectralField::from_real(g.modes(), &lu.solve(&rhs))?;
        v += &step;
        v = v.leray_project();
        r = residual(alpha, &v, g)?;
        rn = r.z_norm();
    }
    Ok(Err(NewtonFailure::NoConvergence(Box::new(SteadyState {
        alpha,
        v,
        residual: rn,
        newton_iterations: opts.max_iterations,
    }))))
}

/// Fixed-point iteration `v <- A^{-1}(g - alpha B(v, v))` from `A^{-1} g`.
/// Contracts only for small `alpha |g|`; used to seed a branch.
pub fn picard_iterate<T: Scalar>(alpha: T, g: &SpectralField<T>, iterations: usize) -> Result<SpectralField<T>> {
    let mut v = g.stokes_inverse();
    for _ in 0..iterations {
        let mut rhs = g.clone();
        rhs.axpy(-alpha, &bilinear(&v, &v)?);
        v = rhs.stokes_inverse();
    }
    Ok(v)
}
