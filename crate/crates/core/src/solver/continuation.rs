use super::newton::{newton_solve, NewtonFailure, NewtonOptions, SteadyState};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::Scalar;

/// How the sampled parameter values are placed. Step sizes are measured in
/// `ln alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Spacing {
    /// Every state at `alpha_{i+1} = ratio * alpha_i`.
    Geometric { ratio: f64 },
    /// Step grows after easy Newton solves, up to `max_step`.
    Adaptive { initial_step: f64, max_step: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    pub spacing: Spacing,
    /// Smallest `ln alpha` step tried before giving up.
    pub min_step: f64,
    pub growth: f64,
    pub shrink: f64,
    /// Newton iterations at or below which a step counts as easy.
    pub easy_iterations: usize,
    pub max_states: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            spacing: Spacing::Geometric { ratio: 1.05 },
            min_step: 1e-7,
            growth: 1.3,
            shrink: 0.5,
            easy_iterations: 3,
            max_states: 1_000_000,
        }
    }
}

/// Initial guess for the next Newton solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Predictor {
    #[default]
    Previous,
    /// Linear extrapolation in `ln alpha` through the last two states.
    Secant,
}

#[derive(Clone, Copy, Debug)]
pub struct ContinuationOptions<T> {
    pub newton: NewtonOptions<T>,
    pub policy: StepPolicy,
    pub predictor: Predictor,
}

impl<T: Scalar> Default for ContinuationOptions<T> {
    fn default() -> Self {
        ContinuationOptions {
            newton: NewtonOptions::default(),
            policy: StepPolicy::default(),
            predictor: Predictor::Previous,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// Step size underflowed or the Jacobian became singular.
    PossibleFold { alpha: f64, reason: String },
}

/// Sampled branch of steady states for one force, with increasing `alpha`.
#[derive(Clone, Debug)]
pub struct ContinuationRun<T> {
    pub force: SpectralField<T>,
    pub states: Vec<SteadyState<T>>,
    pub policy: StepPolicy,
    pub tol: T,
    pub termination: Termination,
}

impl<T: Scalar> ContinuationRun<T> {
    pub fn alphas(&self) -> Vec<T> {
        self.states.iter().map(|s| s.alpha).collect()
    }

    pub fn fields(&self) -> Vec<SpectralField<T>> {
        self.states.iter().map(|s| s.v.clone()).collect()
    }

    /// Grashof number `alpha |g|` of state `i`.
    pub fn grashof(&self, i: usize) -> T {
        self.states[i].alpha * self.force.h_norm()
    }

    pub fn is_complete(&self) -> bool {
        self.termination == Termination::Completed
    }
}

fn accept<T: Scalar>(s: &SteadyState<T>, g_norm: T) -> bool {
    // |v| <= |g| holds up to the residual.
    s.v.h_norm() <= g_norm * (T::one() + T::lit(1e-8)) + T::lit(1e3) * s.residual
}

struct Stepper<'a, T: Scalar> {
    g: &'a SpectralField<T>,
    g_norm: T,
    opts: &'a ContinuationOptions<T>,
    prev: Option<SteadyState<T>>,
}

impl<'a, T: Scalar> Stepper<'a, T> {
    fn predict(&self, cur: &SteadyState<T>, alpha: T) -> SpectralField<T> {
        match (self.opts.predictor, &self.prev) {
            (Predictor::Secant, Some(p)) => {
                let den = (cur.alpha / p.alpha).ln();
                let t = (alpha / cur.alpha).ln() / den;
                let mut x = cur.v.clone();
                x.axpy(t, &(&cur.v - &p.v));
                x
            }
            _ => cur.v.clone(),
        }
    }

    fn solve(&self, cur: &SteadyState<T>, alpha: T) -> Result<std::result::Result<SteadyState<T>, String>> {
        let init = self.predict(cur, alpha);
        Ok(match newton_solve(alpha, self.g, &init, &self.opts.newton)? {
            Ok(s) if accept(&s, self.g_norm) => Ok(s),
            Ok(s) => Err(format!("bound |v| <= |g| violated at alpha = {:e}", s.alpha.as_f64())),
            Err(NewtonFailure::Singular { alpha }) => Err(format!("singular Jacobian at alpha = {:e}", alpha.as_f64())),
            Err(NewtonFailure::NoConvergence(s)) => Err(format!(
                "Newton stalled at alpha = {:e} with residual {:e}",
                s.alpha.as_f64(),
                s.residual.as_f64()
            )),
        })
    }

    fn advance(&mut self, cur: SteadyState<T>, next: SteadyState<T>) -> SteadyState<T> {
        self.prev = Some(cur);
        next
    }
}

/// Natural-parameter continuation of `A v + alpha B(v, v) = g` from
/// `alpha_start` to `alpha_end`, each solve seeded from the preceding state.
pub fn continue_branch<T: Scalar>(
    g: &SpectralField<T>,
    alpha_start: T,
    alpha_end: T,
    init: &SpectralField<T>,
    opts: &ContinuationOptions<T>,
) -> Result<ContinuationRun<T>> {
    if !(alpha_start > T::zero() && alpha_start < alpha_end) {
        return Err(Error::InvalidInput(format!(
            "need 0 < alpha_start < alpha_end, got {} and {}",
            alpha_start, alpha_end
        )));
    }
    let policy = opts.policy;
    match policy.spacing {
        Spacing::Geometric { ratio } if !(ratio > 1.0) => {
            return Err(Error::InvalidInput(format!("geometric ratio {ratio} must exceed 1")));
        }
        Spacing::Adaptive { initial_step, max_step } if !(initial_step > 0.0 && max_step >= initial_step) => {
            return Err(Error::InvalidInput("adaptive steps must satisfy 0 < initial <= max".into()));
        }
        _ => {}
    }
    let first = match newton_solve(alpha_start, g, init, &opts.newton)? {
        Ok(s) => s,
        Err(f) => return Err(f.into()),
    };
    let mut stepper = Stepper {
        g,
        g_norm: g.h_norm(),
        opts,
        prev: None,
    };
    let mut states = vec![first.clone()];
    let mut cur = first;
    let mut termination = Termination::Completed;
    let ln_end = alpha_end.as_f64().ln();
    let mut h = match policy.spacing {
        Spacing::Geometric { ratio } => ratio.ln(),
        Spacing::Adaptive { initial_step, .. } => initial_step,
    };

    'outer: while cur.alpha < alpha_end && states.len() < policy.max_states {
        let ln_cur = cur.alpha.as_f64().ln();
        match policy.spacing {
            Spacing::Geometric { ratio } => {
                let target = (ln_cur + ratio.ln()).min(ln_end);
                let mut sub = target - ln_cur;
                let mut here = ln_cur;
                while here < target {
                    let ln_next = (here + sub).min(target);
                    let alpha = if ln_next >= ln_end { alpha_end } else { T::lit(ln_next.exp()) };
                    match stepper.solve(&cur, alpha)? {
                        Ok(s) => {
                            here = ln_next;
                            cur = stepper.advance(cur, s);
                        }
                        Err(reason) => {
                            sub *= policy.shrink;
                            if sub < policy.min_step {
                                termination = Termination::PossibleFold {
                                    alpha: T::lit(here.exp()).as_f64(),
                                    reason: format!("step underflow: {reason}"),
                                };
                                break 'outer;
                            }
                        }
                    }
                }
                states.push(cur.clone());
            }
            Spacing::Adaptive { max_step, .. } => {
                let ln_next = (ln_cur + h).min(ln_end);
                let alpha = if ln_next >= ln_end { alpha_end } else { T::lit(ln_next.exp()) };
                match stepper.solve(&cur, alpha)? {
                    Ok(s) => {
                        let easy = s.newton_iterations <= policy.easy_iterations;
                        cur = stepper.advance(cur, s);
                        states.push(cur.clone());
                        if easy {
                            h = (h * policy.growth).min(max_step);
                        }
                    }
                    Err(reason) => {
                        h *= policy.shrink;
                        if h < policy.min_step {
                            termination = Termination::PossibleFold {
                                alpha: cur.alpha.as_f64(),
                                reason: format!("step underflow: {reason}"),
                            };
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(ContinuationRun {
        force: g.clone(),
        states,
        policy,
        tol: opts.newton.tol,
        termination,
    })
}
