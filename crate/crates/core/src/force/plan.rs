//! Force expansions `g_n = sum_k alpha_n^{-k} h_k` whose steady states are
//! `v_n = sum_k alpha_n^{-k} w_k`, built order by order.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norms::{l_u_solve, operator_norms, OperatorNorms};
use crate::error::{Error, Result};
use crate::solver::{newton_solve, NewtonOptions};
use crate::spectral::{bilinear, bilinear_sym, SpectralField};
use crate::Scalar;

/// Whether `w -> B_s(w0, w)` vanishes on the whole space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForceCase {
    /// `B_s(w0, .)` is not identically zero: each `w_{m+1}` is drawn so that
    /// `B_s(w0, w_{m+1})` keeps `h_m` away from zero.
    Coupled,
    /// `B_s(w0, .) = 0`: `w_1` solves the steady equation with a small force
    /// and later `w_m` come from `L_{w_1} w_m = f_m`.
    Decoupled,
}

impl fmt::Display for ForceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForceCase::Coupled => "coupled",
            ForceCase::Decoupled => "decoupled",
        })
    }
}

impl std::str::FromStr for ForceCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupled" => Ok(ForceCase::Coupled),
            "decoupled" => Ok(ForceCase::Decoupled),
            _ => Err(Error::InvalidInput(format!("unknown force case {s:?}"))),
        }
    }
}

/// Terms `w_0..w_K`, `h_0..h_K` with `A w_m + sum_{k=0}^{m+1} B(w_k, w_{m+1-k}) = h_m`
/// (taking `w_{K+1} = 0`) and `|w_k| <= M D0^k`.
#[derive(Clone, Debug)]
pub struct ForceExpansionPlan<T> {
    pub w: Vec<SpectralField<T>>,
    pub h: Vec<SpectralField<T>>,
    pub m: T,
    pub d0: T,
    pub c0: T,
    pub norms: OperatorNorms<T>,
    pub case: ForceCase,
    pub seed: u64,
    /// Random draws spent on each `w_{m+1}` (coupled) or `f_m` (decoupled).
    pub draws: Vec<usize>,
}

/// Draws allowed per order before giving up.
pub const MAX_DRAWS: usize = 100;
/// Smallest accepted `|h_m|` for `m >= 1`.
pub const H_MARGIN: f64 = 1e-8;

impl<T: Scalar> ForceExpansionPlan<T> {
    /// `K`.
    pub fn depth(&self) -> usize {
        self.w.len() - 1
    }

    fn w_or_zero(&self, k: usize) -> SpectralField<T> {
        self.w.get(k).cloned().unwrap_or_else(|| SpectralField::zeros(self.w[0].modes()))
    }

    /// `|A w_m + sum_{k=0}^{m+1} B(w_k, w_{m+1-k}) - h_m| / (1 + |h_m|)` for `m = 0..=K`.
    pub fn balance_residuals(&self) -> Result<Vec<T>> {
        (0..=self.depth())
            .map(|m| {
                let mut r = self.w[m].stokes();
                for k in 0..=m + 1 {
                    r += &bilinear(&self.w_or_zero(k), &self.w_or_zero(m + 1 - k))?;
                }
                r -= &self.h[m];
                Ok(r.h_norm() / (T::one() + self.h[m].h_norm()))
            })
            .collect()
    }

    /// `|B(w0, w0)|`.
    pub fn base_defect(&self) -> Result<T> {
        Ok(bilinear(&self.w[0], &self.w[0])?.h_norm())
    }

    /// `|w_k| <= M D0^k` for every `k >= 1`.
    pub fn budgets_hold(&self) -> bool {
        let slack = T::one() + T::lit(1e-12);
        self.w.iter().enumerate().skip(1).all(|(k, w)| w.h_norm() <= self.m * self.d0.powi(k as i32) * slack)
    }
}

fn random_unit<T: Scalar, R: Rng>(w0: &SpectralField<T>, rng: &mut R) -> SpectralField<T> {
    let x = SpectralField::<T>::random_solenoidal(w0.modes(), rng);
    let n = x.h_norm();
    x.scaled(T::one() / n)
}

/// Builds `K` orders of a force expansion around `w0`, which must satisfy
/// `B(w0, w0) = 0`. The random choices are seeded by `seed`.
pub fn build_force_expansion<T: Scalar>(
    w0: &SpectralField<T>,
    m: T,
    d0: T,
    k_max: usize,
    seed: u64,
) -> Result<ForceExpansionPlan<T>> {
    if !(m >= T::one()) || !(d0 > T::one()) || k_max == 0 {
        return Err(Error::InvalidInput(format!("need M >= 1, D0 > 1, K >= 1; got M = {m}, D0 = {d0}, K = {k_max}")));
    }
    if !w0.is_divergence_free() {
        return Err(Error::InvalidInput("w0 is not divergence-free".into()));
    }
    let tol = T::epsilon() * T::lit(1e4);
    let b00 = bilinear(w0, w0)?.h_norm();
    let w0n = w0.h_norm();
    if b00 > tol * (T::one() + w0n * w0.v_norm()) {
        return Err(Error::Precondition(format!("B(w0, w0) must vanish, |B(w0, w0)| = {b00:e}")));
    }
    let modes = w0.modes();
    let norms = operator_norms::<T>(modes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = SpectralField::<T>::solenoidal_basis(modes);
    let mut coupling = T::zero();
    for b in &basis {
        coupling = coupling.max(bilinear_sym(w0, b)?.z_norm());
    }
    let case = if coupling <= tol * (T::one() + w0.z_norm()) {
        ForceCase::Decoupled
    } else {
        ForceCase::Coupled
    };
    let margin = T::lit(H_MARGIN);
    let mut w = vec![w0.clone()];
    let mut h = Vec::new();
    let mut draws = Vec::new();

    match case {
        ForceCase::Coupled => {
            // r_m = A w_m + sum_{k=1}^m B(w_k, w_{m+1-k}); h_m = r_m + B_s(w0, w_{m+1}).
            let accumulated = |w: &[SpectralField<T>], mm: usize| -> Result<SpectralField<T>> {
                let mut r = w[mm].stokes();
                for k in 1..=mm {
                    r += &bilinear(&w[k], &w[mm + 1 - k])?;
                }
                Ok(r)
            };
            for mm in 0..k_max {
                let r = accumulated(&w, mm)?;
                let rn = r.h_norm();
                let r_vanishes = rn <= tol * (T::one() + w[mm].a_norm());
                let budget = m * d0.powi(mm as i32 + 1);
                let mut accepted = None;
                for t in 0..MAX_DRAWS {
                    let cand = random_unit(w0, &mut rng).scaled(budget * T::lit(0.7f64.powi(t as i32)));
                    let bs = bilinear_sym(w0, &cand)?;
                    let bn = bs.h_norm();
                    let hm = &r + &bs;
                    let ok = if r_vanishes { bn > margin } else { bn < rn && hm.h_norm() > margin };
                    if ok {
                        accepted = Some((cand, hm, t + 1));
                        break;
                    }
                }
                let (cand, hm, t) = accepted.ok_or_else(|| {
                    Error::Numerical(format!("no admissible w_{} after {MAX_DRAWS} draws", mm + 1))
                })?;
                w.push(cand);
                h.push(hm);
                draws.push(t);
            }
            h.push(accumulated(&w, k_max)?);
        }
        ForceCase::Decoupled => {
            let c0 = norms.c0();
            let h1 = random_unit(w0, &mut rng).scaled(c0 / T::lit(2.0));
            let opts = NewtonOptions {
                tol: T::epsilon() * T::lit(1e2) * h1.z_norm(),
                max_iterations: 50,
            };
            let w1 = match newton_solve(T::one(), &h1, &h1.stokes_inverse(), &opts)? {
                Ok(s) => s.v,
                Err(f) => return Err(Error::Numerical(format!("small-force steady equation: {}", Error::from(f)))),
            };
            if w1.h_norm() > h1.h_norm() * (T::one() + tol) {
                return Err(Error::Numerical(format!(
                    "|w_1| = {:e} exceeds |h_1| = {:e}",
                    w1.h_norm(),
                    h1.h_norm()
                )));
            }
            let mut h0 = w0.stokes();
            h0 += &bilinear_sym(w0, &w1)?;
            h.push(h0);
            w.push(w1);
            h.push(h1);
            draws.push(1);
            for mm in 2..=k_max {
                let mut tail = SpectralField::zeros(modes);
                for k in 2..mm {
                    tail += &bilinear(&w[k], &w[mm + 1 - k])?;
                }
                let mut accepted = None;
                for t in 0..MAX_DRAWS {
                    let size = m * d0.powi(mm as i32) / T::lit(2.0) * T::lit(rng.gen_range(0.5..=1.0));
                    let f = random_unit(w0, &mut rng).scaled(size);
                    let hm = &f + &tail;
                    if hm.h_norm() > margin {
                        accepted = Some((l_u_solve(&w[1], &f, &norms)?, hm, t + 1));
                        break;
                    }
                }
                let (wm, hm, t) =
                    accepted.ok_or_else(|| Error::Numerical(format!("no admissible f_{mm} after {MAX_DRAWS} draws")))?;
                w.push(wm);
                h.push(hm);
                draws.push(t);
            }
        }
    }
    Ok(ForceExpansionPlan {
        w,
        h,
        m,
        d0,
        c0: norms.c0(),
        norms,
        case,
        seed,
        draws,
    })
}

/// Truncated pair at one parameter value.
#[derive(Clone, Debug)]
pub struct PlanPoint<T> {
    pub n: usize,
    pub alpha: T,
    pub v: SpectralField<T>,
    pub g: SpectralField<T>,
    /// `|A v + alpha B(v, v) - g|`.
    pub residual: T,
    /// `M D0^{m+1} theta / (1 - D0 theta)` with `theta = 1/alpha`.
    pub tail_bound: T,
    /// `|theta^{-m} (v_full - sum_{k<m} theta^k w_k) - w_m|` using every
    /// term of the plan.
    pub measured_tail: T,
}

#[derive(Clone, Debug)]
pub struct PlanEvaluation<T> {
    pub m_trunc: usize,
    pub points: Vec<PlanPoint<T>>,
    /// Indices with `D0 / alpha_n > 1/2`, outside the convergence radius.
    pub excluded: Vec<usize>,
    /// First index inside it.
    pub n0: Option<usize>,
}

/// Largest `D0 theta_n` accepted.
pub const GAMMA: f64 = 0.5;

/// Partial sums through order `m_trunc` at each `alpha_n`.
pub fn evaluate_plan<T: Scalar>(plan: &ForceExpansionPlan<T>, alphas: &[T], m_trunc: usize) -> Result<PlanEvaluation<T>> {
    if m_trunc > plan.depth() {
        return Err(Error::InvalidInput(format!("m_trunc = {m_trunc} beyond plan depth {}", plan.depth())));
    }
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (n, &alpha) in alphas.iter().enumerate() {
        let theta = T::one() / alpha;
        if !(alpha > T::zero()) || plan.d0 * theta > T::lit(GAMMA) {
            excluded.push(n);
            continue;
        }
        let modes = plan.w[0].modes();
        let mut v = SpectralField::zeros(modes);
        let mut g = SpectralField::zeros(modes);
        for k in 0..=m_trunc {
            let p = theta.powi(k as i32);
            v.axpy(p, &plan.w[k]);
            g.axpy(p, &plan.h[k]);
        }
        let mut tail = SpectralField::zeros(modes);
        for k in m_trunc + 1..=plan.depth() {
            tail.axpy(theta.powi((k - m_trunc) as i32), &plan.w[k]);
        }
        let mut r = v.stokes();
        r.axpy(alpha, &bilinear(&v, &v)?);
        r -= &g;
        let dt = plan.d0 * theta;
        points.push(PlanPoint {
            n,
            alpha,
            residual: r.h_norm(),
            tail_bound: plan.m * plan.d0.powi(m_trunc as i32 + 1) * theta / (T::one() - dt),
            measured_tail: tail.h_norm(),
            v,
            g,
        });
    }
    let n0 = points.first().map(|p| p.n);
    Ok(PlanEvaluation {
        m_trunc,
        points,
        excluded,
        n0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ModeSet, WaveVector};
    use num_complex::Complex;

    fn pair_field(m: &ModeSet) -> SpectralField<f64> {
        let z = Complex::new(0.0, 0.0);
        SpectralField::single(m, WaveVector::new(1, 1, 0), [Complex::new(0.3, 0.1), Complex::new(-0.3, -0.1), z]).unwrap()
    }

    #[test]
    fn coupled_plan_balances_every_order() {
        let m = ModeSet::ball(3, 9.0).unwrap();
        let plan = build_force_expansion(&pair_field(&m), 1.0, 2.0, 6, 11).unwrap();
        assert_eq!(plan.case, ForceCase::Coupled);
        for r in plan.balance_residuals().unwrap() {
            assert!(r <= 1e-10, "{r}");
        }
        assert!(plan.budgets_hold());
        assert!(plan.h.iter().skip(1).all(|h| h.h_norm() > H_MARGIN));
    }

    #[test]
    fn nonvanishing_base_nonlinearity_is_rejected() {
        let m = ModeSet::ball(3, 9.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w0 = SpectralField::<f64>::random_solenoidal(&m, &mut rng);
        let e = build_force_expansion(&w0, 1.0, 2.0, 3, 1).unwrap_err();
        assert!(e.to_string().contains("B(w0, w0) must vanish"));
    }

    #[test]
    fn zeroth_truncation_returns_the_base_terms() {
        let m = ModeSet::ball(2, 5.0).unwrap();
        let w0 = SpectralField::single(&m, WaveVector::planar(1, 1), [Complex::new(0.5, 0.0), Complex::new(-0.5, 0.0), Complex::new(0.0, 0.0)]).unwrap();
        let plan = build_force_expansion(&w0, 1.0, 2.0, 3, 4).unwrap();
        let ev = evaluate_plan(&plan, &[1.0, 40.0], 0).unwrap();
        assert_eq!(ev.excluded, vec![0]);
        assert_eq!(ev.n0, Some(1));
        assert_eq!(ev.points[0].v, plan.w[0]);
        assert_eq!(ev.points[0].g, plan.h[0]);
    }

    #[test]
    fn measured_tails_respect_the_geometric_bound() {
        let m = ModeSet::ball(2, 5.0).unwrap();
        let w0 = SpectralField::single(&m, WaveVector::planar(0, 1), [Complex::new(0.0, 0.7), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)]).unwrap();
        let plan = build_force_expansion(&w0, 1.0, 2.0, 5, 9).unwrap();
        let alphas: Vec<f64> = (0..12).map(|n| 10.0 * 2f64.powi(n)).collect();
        for mt in 0..=5 {
            for p in evaluate_plan(&plan, &alphas, mt).unwrap().points {
                assert!(p.measured_tail <= p.tail_bound, "m = {mt}, n = {}", p.n);
            }
        }
    }

    #[test]
    fn decoupled_plan_on_a_separated_mode() {
        let space = crate::force::zero_bs_subspace(3, WaveVector::new(3, 0, 0), 1.0, &[]).unwrap();
        let z = Complex::new(0.0, 0.0);
        let w0 = SpectralField::single(&space.modes, WaveVector::new(3, 0, 0), [z, Complex::new(0.5, 0.0), Complex::new(0.0, 0.5)]).unwrap();
        let plan = build_force_expansion(&w0, 1.0, 2.0, 6, 3).unwrap();
        assert_eq!(plan.case, ForceCase::Decoupled);
        assert!(plan.w[1].h_norm() <= plan.h[1].h_norm());
        assert!(plan.h[1].h_norm() <= plan.c0);
        assert!(plan.budgets_hold());
        for r in plan.balance_residuals().unwrap() {
            assert!(r <= 1e-10, "{r}");
        }
    }

    #[test]
    fn truncation_residual_shrinks_with_order() {
        let m = ModeSet::ball(3, 9.0).unwrap();
        let plan = build_force_expansion(&pair_field(&m), 1.0, 2.0, 6, 11).unwrap();
        let r: Vec<f64> = (2..=6).map(|mt| evaluate_plan(&plan, &[160.0], mt).unwrap().points[0].residual).collect();
        for w in r.windows(2) {
            assert!(w[1] < 0.5 * w[0], "{r:?}");
        }
    }
}
