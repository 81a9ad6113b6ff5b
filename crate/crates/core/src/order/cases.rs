use std::fmt;

use super::compare::{ComparePolicy, Verdict};
use super::table::{totalize_signed, SignClass, SigmaTable, Totalized};
use super::SigmaLabel;
use crate::error::{Error, Result};
use crate::expansion::UnitaryExpansion;
use crate::spectral::{bilinear, bilinear_sym, SpectralField};
use crate::Scalar;

use SigmaLabel::{AlphaGamma, Beta, Chi, Pair, Sigma, Sigma0};

/// Thresholds for recognising special limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CasePolicy {
    /// `||v||_Z <= zero_tol ||g||_Z` counts as a zero limit.
    pub zero_tol: f64,
    /// `||Av - g||_Z <= stokes_tol ||g||_Z` counts as `v = A^{-1} g`.
    pub stokes_tol: f64,
    /// Fewest rows kept when totalizing after a sign split.
    pub min_rows: usize,
}

impl Default for CasePolicy {
    fn default() -> Self {
        CasePolicy {
            zero_tol: 1e-6,
            stokes_tol: 1e-6,
            min_rows: 16,
        }
    }
}

/// Which limit relation the data selects. Branch codes follow the
/// roman/letter numbering of the corresponding results.
#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    /// The sequence equals its limit, so `Av = g`.
    Constant,
    /// Nonzero limit off `A^{-1} g`; branch `a`, `b` or `c` from comparing
    /// `sigma_0` with `sigma_0_1`.
    NonzeroLimit(&'static str),
    /// `v = 0`; branches `i-1`, `i-2`, `ii`, `ii-1a`, `ii-1b`, `ii-2a`, `ii-2b`.
    ZeroLimit(&'static str),
    /// `v = A^{-1} g` with a nontrivial expansion; branches `ii` to `vi`.
    StokesLimit(&'static str),
    /// Forces varying with `n`; branches `iii`, `iv`, `v`, `v-1` to `v-5`.
    PerturbedForce(&'static str),
    Indeterminate { reason: String },
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Constant => write!(f, "constant"),
            Scenario::NonzeroLimit(b) => write!(f, "nonzero-limit ({b})"),
            Scenario::ZeroLimit(b) => write!(f, "zero-limit ({b})"),
            Scenario::StokesLimit(b) => write!(f, "stokes-limit ({b})"),
            Scenario::PerturbedForce(b) => write!(f, "perturbed-force ({b})"),
            Scenario::Indeterminate { reason } => write!(f, "indeterminate: {reason}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub scenario: Scenario,
    pub lambdas: Vec<(String, f64)>,
    /// Signed sequence used for the finer split and its kept sign class.
    pub chi: Option<(Vec<f64>, SignClass)>,
    /// Identity name and its coefficient-norm residual (or absolute value
    /// for scalar identities).
    pub residuals: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub policy: CasePolicy,
    pub compare_policy: ComparePolicy,
}

impl CaseReport {
    fn new(policy: &CasePolicy, table: &SigmaTable) -> Self {
        CaseReport {
            scenario: Scenario::Indeterminate { reason: String::new() },
            lambdas: Vec::new(),
            chi: None,
            residuals: Vec::new(),
            notes: Vec::new(),
            policy: *policy,
            compare_policy: table.policy,
        }
    }

    pub fn lambda(&self, name: &str) -> Option<f64> {
        self.lambdas.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn res<T: Scalar>(&mut self, name: &str, x: &SpectralField<T>) {
        self.residuals.push((name.to_string(), x.z_norm().as_f64()));
    }

    fn scalar(&mut self, name: &str, x: f64) {
        self.residuals.push((name.to_string(), x.abs()));
    }

    fn lam(&mut self, name: &str, x: f64) -> f64 {
        self.lambdas.push((name.to_string(), x));
        x
    }
}

fn need(t: &SigmaTable, a: &SigmaLabel, b: &SigmaLabel) -> std::result::Result<Verdict, String> {
    match t.verdict(a, b) {
        None => Err(format!("{a} or {b} missing from the table")),
        Some(Verdict::Undecided) => Err(format!("{a} vs {b} undecided")),
        Some(v) => Ok(v),
    }
}

macro_rules! need {
    ($t:expr, $a:expr, $b:expr) => {
        match need($t, &$a, &$b) {
            Ok(v) => v,
            Err(reason) => return Ok(Scenario::Indeterminate { reason }),
        }
    };
}

fn blocked(reason: impl Into<String>) -> Result<Scenario> {
    Ok(Scenario::Indeterminate { reason: reason.into() })
}

fn combo<T: Scalar>(terms: &[(f64, &SpectralField<T>)]) -> SpectralField<T> {
    let mut out = SpectralField::zeros(terms[0].1.modes());
    for (c, x) in terms {
        out.axpy(T::lit(*c), x);
    }
    out
}

fn f<T: Scalar>(x: T) -> f64 {
    x.as_f64()
}

/// Signed split of `chi` over the table rows, with the outcome recorded.
fn split(rep: &mut CaseReport, table: &SigmaTable, chi: Vec<f64>) -> Result<(Totalized, SignClass)> {
    let (tot, class) = totalize_signed(table, &chi, rep.policy.min_rows)?;
    rep.notes.extend(tot.table.notes.iter().cloned());
    rep.notes.extend(tot.diagnostics.iter().cloned());
    rep.chi = Some((chi, class));
    Ok((tot, class))
}

/// Selects and checks the limit relation for steady states of a fixed force
/// `g`, given the expansion of the states and its coefficient table.
pub fn classify_case<T: Scalar>(
    g: &SpectralField<T>,
    exp: &UnitaryExpansion<T>,
    table: &SigmaTable,
    policy: &CasePolicy,
) -> Result<CaseReport> {
    let mut rep = CaseReport::new(policy, table);
    let v = &exp.limit;
    v.ensure_same_modes(g)?;
    rep.res("|B(v,v)|", &bilinear(v, v)?);
    let av_g = &v.stokes() - g;
    let gz = f(g.z_norm());
    rep.scenario = if exp.is_trivial() {
        rep.res("|Av-g|", &av_g);
        Scenario::Constant
    } else if f(v.z_norm()) <= policy.zero_tol * gz {
        zero_limit(g, exp, table, &mut rep)?
    } else if f(av_g.z_norm()) <= policy.stokes_tol * gz {
        stokes_limit(g, exp, table, &mut rep)?
    } else {
        nonzero_limit(g, exp, table, &mut rep)?
    };
    Ok(rep)
}

fn nonzero_limit<T: Scalar>(
    g: &SpectralField<T>,
    exp: &UnitaryExpansion<T>,
    t: &SigmaTable,
    rep: &mut CaseReport,
) -> Result<Scenario> {
    let v = &exp.limit;
    let w1 = exp.direction(1).expect("nontrivial");
    let av = v.stokes();
    let bs = bilinear_sym(v, w1)?;
    rep.res("|Av-g|", &(&av - g));
    rep.res("|Bs(v,w1)|", &bs);
    Ok(match need!(t, Sigma0, AlphaGamma(1)) {
        Verdict::Greater => Scenario::NonzeroLimit("a"),
        Verdict::Less => Scenario::NonzeroLimit("b"),
        Verdict::Equiv(r) => {
            let l = rep.lam("lambda", 1.0 / r);
            rep.res("|Av+lambda Bs(v,w1)-g|", &combo(&[(1.0, &av), (l, &bs), (-1.0, g)]));
            Scenario::NonzeroLimit("c")
        }
        Verdict::Undecided => unreachable!(),
    })
}

fn stokes_limit<T: Scalar>(
    _g: &SpectralField<T>,
    exp: &UnitaryExpansion<T>,
    t: &SigmaTable,
    rep: &mut CaseReport,
) -> Result<Scenario> {
    let v = &exp.limit;
    let w1 = exp.direction(1).expect("nontrivial");
    rep.res("|Bs(v,w1)|", &bilinear_sym(v, w1)?);
    let Some(w2) = exp.direction(2) else {
        return blocked("second direction missing");
    };
    let labels = [Sigma(1), AlphaGamma(2), Pair(1, 1)];
    let mut top = [true; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j && need!(t, labels[j], labels[i]) == Verdict::Greater {
                top[i] = false;
            }
        }
    }
    let lim = |a: &SigmaLabel, b: &SigmaLabel| match t.verdict(a, b) {
        Some(Verdict::Equiv(r)) => r,
        _ => f64::NAN,
    };
    let aw1 = w1.stokes();
    let bs2 = bilinear_sym(v, w2)?;
    let b11 = bilinear(w1, w1)?;
    Ok(match top {
        [false, true, false] => {
            rep.res("|Bs(v,w2)|", &bs2);
            Scenario::StokesLimit("ii")
        }
        [false, false, true] => {
            rep.res("|B(w1,w1)|", &b11);
            Scenario::StokesLimit("iii")
        }
        [true, true, false] => {
            let l = rep.lam("lambda", lim(&labels[1], &labels[0]));
            rep.res("|Aw1+lambda Bs(v,w2)|", &combo(&[(1.0, &aw1), (l, &bs2)]));
            Scenario::StokesLimit("iv")
        }
        [false, true, true] => {
            let l = rep.lam("lambda", lim(&labels[2], &labels[1]));
            rep.res("|Bs(v,w2)+lambda B(w1,w1)|", &combo(&[(1.0, &bs2), (l, &b11)]));
            Scenario::StokesLimit("v")
        }
        [true, true, true] => {
            let l1 = rep.lam("lambda_1", lim(&labels[1], &labels[0]));
            let l2 = rep.lam("lambda_2", lim(&labels[2], &labels[0]));
            rep.res(
                "|Aw1+lambda_1 Bs(v,w2)+lambda_2 B(w1,w1)|",
                &combo(&[(1.0, &aw1), (l1, &bs2), (l2, &b11)]),
            );
            Scenario::StokesLimit("vi")
        }
        _ => return blocked("ordering of sigma_1, sigma_0_2, sigma_1_1 is excluded for this limit"),
    })
}

fn zero_limit<T: Scalar>(
    g: &SpectralField<T>,
    exp: &UnitaryExpansion<T>,
    t: &SigmaTable,
    rep: &mut CaseReport,
) -> Result<Scenario> {
    let w1 = exp.direction(1).expect("nontrivial");
    let b11 = bilinear(w1, w1)?;
    let w2 = exp.direction(2);
    match need!(t, Pair(1, 1), Sigma0) {
        Verdict::Greater => {
            rep.res("|B(w1,w1)|", &b11);
            let Some(w2) = w2 else {
                return blocked("second direction missing");
            };
            let bs12 = bilinear_sym(w1, w2)?;
            Ok(match need!(t, Pair(1, 2), Sigma0) {
                Verdict::Greater => {
                    rep.res("|Bs(w1,w2)|", &bs12);
                    Scenario::ZeroLimit("i-1")
                }
                Verdict::Equiv(l) => {
                    let l = rep.lam("lambda", l);
                    rep.res("|lambda Bs(w1,w2)-g|", &combo(&[(l, &bs12), (-1.0, g)]));
                    rep.scalar("<g,w1>", f(g.inner(w1)?));
                    Scenario::ZeroLimit("i-2")
                }
                _ => return blocked("sigma_1_2 below sigma_0 is excluded for a zero limit"),
            })
        }
        Verdict::Equiv(ls) => {
            let ls = rep.lam("lambda_star", ls);
            rep.res("|lambda_star B(w1,w1)-g|", &combo(&[(ls, &b11), (-1.0, g)]));
            let Some(w2) = w2 else {
                return Ok(Scenario::ZeroLimit("ii"));
            };
            let s11 = t.values(&Pair(1, 1)).expect("present");
            let chi: Vec<f64> = s11.iter().map(|x| 1.0 - x / ls).collect();
            let (tot, class) = split(rep, t, chi)?;
            let tt = &tot.table;
            let s = class.sign();
            let bs12 = bilinear_sym(w1, w2)?;
            let aw1 = w1.stokes();
            let w1v = f(w1.v_norm()).powi(2);
            let gw2 = f(g.inner(w2)?);
            let lim_chi = |a: &SigmaLabel| -> std::result::Result<Option<f64>, String> {
                if class == SignClass::Zero {
                    return Ok(None);
                }
                match need(tt, a, &Chi)? {
                    Verdict::Greater => Ok(None),
                    Verdict::Equiv(r) => Ok(Some(r)),
                    _ => Err(format!("|chi| dominates {a}, excluded for this ordering")),
                }
            };
            match need!(t, AlphaGamma(2), Sigma0) {
                Verdict::Equiv(l02) => match lim_chi(&Sigma(1)) {
                    Err(reason) => blocked(reason),
                    Ok(None) => {
                        let l2 = rep.lam("lambda_2", l02);
                        rep.res("|Aw1+lambda_2 Bs(w1,w2)|", &combo(&[(1.0, &aw1), (l2, &bs12)]));
                        rep.scalar("lambda_star |w1|_V^2 - lambda_2 <g,w2>", ls * w1v - l2 * gw2);
                        Ok(Scenario::ZeroLimit("ii-1b"))
                    }
                    Ok(Some(r)) => {
                        let l1 = rep.lam("lambda_1", s * r);
                        let r12 = match need!(tt, Pair(1, 2), Chi) {
                            Verdict::Equiv(x) => x,
                            _ => return blocked("sigma_1_2 not comparable to |chi| at equal order"),
                        };
                        let l2 = rep.lam("lambda_2", s * r12);
                        rep.res(
                            "|lambda_1 Aw1+lambda_2 Bs(w1,w2)-g|",
                            &combo(&[(l1, &aw1), (l2, &bs12), (-1.0, g)]),
                        );
                        rep.scalar("lambda_star lambda_1 |w1|_V^2 - lambda_2 <g,w2>", ls * l1 * w1v - l2 * gw2);
                        Ok(Scenario::ZeroLimit("ii-1a"))
                    }
                },
                Verdict::Greater => {
                    rep.scalar("<g,w2>", gw2);
                    rep.scalar("<B(w2,w2),w1>", f(bilinear(w2, w2)?.inner(w1)?));
                    match lim_chi(&Pair(1, 2)) {
                        Err(reason) => blocked(reason),
                        Ok(None) => {
                            rep.res("|Bs(w1,w2)|", &bs12);
                            Ok(Scenario::ZeroLimit("ii-2b"))
                        }
                        Ok(Some(r)) => {
                            let l2 = rep.lam("lambda_2", s * r);
                            rep.res("|lambda_2 Bs(w1,w2)-g|", &combo(&[(l2, &bs12), (-1.0, g)]));
                            Ok(Scenario::ZeroLimit("ii-2a"))
                        }
                    }
                }
                _ => blocked("sigma_0_2 below sigma_0 is excluded for a zero limit"),
            }
        }
        _ => blocked("sigma_1_1 below sigma_0 is excluded for a zero limit"),
    }
}

/// Selects and checks the limit relation when the forces `g_n` vary with
/// `n` and have the nontrivial expansion `exp_g` (limit `g`, first
/// direction `h_1`, levels `beta_k` in the table).
pub fn classify_perturbed_case<T: Scalar>(
    exp_v: &UnitaryExpansion<T>,
    exp_g: &UnitaryExpansion<T>,
    table: &SigmaTable,
    policy: &CasePolicy,
) -> Result<CaseReport> {
    if exp_g.is_trivial() || exp_g.depth() == 0 {
        return Err(Error::InvalidInput("exp_g trivial, use classify_case".into()));
    }
    let mut rep = CaseReport::new(policy, table);
    let v = &exp_v.limit;
    v.ensure_same_modes(&exp_g.limit)?;
    rep.res("|B(v,v)|", &bilinear(v, v)?);
    rep.scenario = perturbed(exp_v, exp_g, table, &mut rep)?;
    Ok(rep)
}

fn perturbed<T: Scalar>(
    exp_v: &UnitaryExpansion<T>,
    exp_g: &UnitaryExpansion<T>,
    t: &SigmaTable,
    rep: &mut CaseReport,
) -> Result<Scenario> {
    let v = &exp_v.limit;
    let g = &exp_g.limit;
    let h1 = exp_g.direction(1).expect("nontrivial");
    let Some(w1) = exp_v.direction(1) else {
        return blocked("state expansion trivial although the forces vary");
    };
    let w2 = exp_v.direction(2);
    let av_g = &v.stokes() - g;
    let bs1 = bilinear_sym(v, w1)?;
    let l1 = match t.verdict(&Beta(1), &AlphaGamma(1)) {
        Some(Verdict::Less) => Some(0.0),
        Some(Verdict::Equiv(r)) => Some(r),
        _ => None,
    };
    if let Some(l1) = l1 {
        rep.lam("lambda_1", l1);
    }
    match need!(t, AlphaGamma(1), Sigma0) {
        Verdict::Greater => {
            rep.res("|Bs(v,w1)|", &bs1);
            Ok(Scenario::PerturbedForce("iii"))
        }
        Verdict::Less => {
            rep.res("|Av-g|", &av_g);
            let Some(l1) = l1 else {
                return blocked("beta_1 dominates sigma_0_1, excluded for this ordering");
            };
            rep.res("|Bs(v,w1)-lambda_1 h1|", &combo(&[(1.0, &bs1), (-l1, h1)]));
            Ok(Scenario::PerturbedForce("iv"))
        }
        Verdict::Equiv(l2) => {
            let l2 = rep.lam("lambda_2", l2);
            rep.res("|Av-g+lambda_2 Bs(v,w1)|", &combo(&[(1.0, &av_g), (l2, &bs1)]));
            rep.notes.push("chi centred on lambda_2 = lim alpha Gamma_1".into());
            let s01 = t.values(&AlphaGamma(1)).expect("present");
            let chi: Vec<f64> = s01.iter().map(|x| x - l2).collect();
            let (tot, class) = split(rep, t, chi)?;
            let tt = &tot.table;
            let s = class.sign();
            let zero = class == SignClass::Zero;
            let rel = |a: &SigmaLabel, b: &SigmaLabel| tt.verdict(a, b).unwrap_or(Verdict::Undecided);
            let chi_below = |a: &SigmaLabel| zero || rel(a, &Chi) == Verdict::Greater;
            let lim_or_zero = |a: &SigmaLabel, b: &SigmaLabel| match rel(a, b) {
                Verdict::Equiv(r) => Some(r),
                Verdict::Less => Some(0.0),
                _ => None,
            };
            let aw1 = w1.stokes();
            let b11 = bilinear(w1, w1)?;
            let bs2 = match w2 {
                Some(w2) => Some(bilinear_sym(v, w2)?),
                None => None,
            };
            let (g1, h, a2) = (Sigma(1), Beta(1), AlphaGamma(2));
            if rel(&g1, &h) == Verdict::Greater && chi_below(&g1) {
                let (Some(bs2), Some(l3)) = (&bs2, lim_or_zero(&g1, &a2)) else {
                    return blocked("second direction missing or too small for this branch");
                };
                let l3 = rep.lam("lambda_3", l3);
                rep.res(
                    "|lambda_3 (Aw1+lambda_2 B(w1,w1))+Bs(v,w2)|",
                    &combo(&[(l3, &aw1), (l3 * l2, &b11), (1.0, bs2)]),
                );
                return Ok(Scenario::PerturbedForce("v-1"));
            }
            if rel(&h, &g1) == Verdict::Greater && chi_below(&h) {
                let (Some(bs2), Some(l4)) = (&bs2, lim_or_zero(&h, &a2)) else {
                    return blocked("second direction missing or too small for this branch");
                };
                let l4 = rep.lam("lambda_4", l4);
                rep.res("|Bs(v,w2)-lambda_4 h1|", &combo(&[(1.0, bs2), (-l4, h1)]));
                return Ok(Scenario::PerturbedForce("v-2"));
            }
            if let Some(bs2) = &bs2 {
                if rel(&a2, &g1) == Verdict::Greater && rel(&a2, &h) == Verdict::Greater && chi_below(&a2) {
                    rep.res("|Bs(v,w2)|", bs2);
                    return Ok(Scenario::PerturbedForce("v-3"));
                }
            }
            if !zero && rel(&Chi, &g1) == Verdict::Greater && rel(&Chi, &h) == Verdict::Greater {
                match &bs2 {
                    None => {
                        rep.res("|Bs(v,w1)|", &bs1);
                        rep.res("|Av-g|", &av_g);
                    }
                    Some(bs2) => {
                        let Some(r) = lim_or_zero(&a2, &Chi) else {
                            return blocked("sigma_0_2 dominates |chi|, excluded for this branch");
                        };
                        let l5 = rep.lam("lambda_5", s * r);
                        rep.res("|Bs(v,w1)+lambda_5 Bs(v,w2)|", &combo(&[(1.0, &bs1), (l5, bs2)]));
                    }
                }
                return Ok(Scenario::PerturbedForce("v-4"));
            }
            if let (Verdict::Equiv(r7), Verdict::Equiv(r6)) = (rel(&h, &g1), rel(&Chi, &g1)) {
                let l6 = rep.lam("lambda_6", s * r6);
                let l7 = rep.lam("lambda_7", r7);
                let mut terms: Vec<(f64, &SpectralField<T>)> = vec![(1.0, &aw1), (l6, &bs1), (l2, &b11), (-l7, h1)];
                if let Some(bs2) = &bs2 {
                    let Some(l8) = lim_or_zero(&a2, &g1) else {
                        return blocked("sigma_0_2 dominates sigma_1, excluded for this branch");
                    };
                    terms.push((rep.lam("lambda_8", l8), bs2));
                }
                rep.res("|Aw1+lambda_6 Bs(v,w1)+lambda_2 B(w1,w1)+lambda_8 Bs(v,w2)-lambda_7 h1|", &combo(&terms));
                return Ok(Scenario::PerturbedForce("v-5"));
            }
            rep.notes.push("no finer branch matched the orderings of sigma_1, beta_1, sigma_0_2 and |chi|".into());
            Ok(Scenario::PerturbedForce("v"))
        }
        Verdict::Undecided => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::convert_pre_unitary;
    use crate::order::build_sigma_table;
    use crate::spectral::ModeSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alphas(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.1f64.powi(i as i32 + 1)).collect()
    }

    #[test]
    fn constant_states_solve_the_stokes_problem() {
        let m = ModeSet::ball(3, 2.0).unwrap();
        let g = SpectralField::<f64>::random_solenoidal(&m, &mut ChaCha8Rng::seed_from_u64(3));
        let v = g.stokes_inverse();
        let e = convert_pre_unitary(&v, &[], &[]).unwrap();
        let a = alphas(40);
        let t = build_sigma_table(&e, &a, 2, None, &ComparePolicy::default()).unwrap();
        let r = classify_case(&g, &e, &t, &CasePolicy::default()).unwrap();
        assert_eq!(r.scenario, Scenario::Constant);
        assert!(r.residual("|Av-g|").unwrap() < 1e-14);
    }

    #[test]
    fn balanced_square_with_zero_limit() {
        // v_n = alpha^{-1/2} w with g = B(w, w) != 0.
        let m = ModeSet::ball(3, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (w, g) = loop {
            let w = SpectralField::<f64>::random_solenoidal(&m, &mut rng);
            let g = bilinear(&w, &w).unwrap();
            if g.z_norm() > 1e-3 {
                break (w, g);
            }
        };
        let a = alphas(80);
        let idx: Vec<usize> = (0..80).collect();
        let gamma: Vec<f64> = a.iter().map(|x| x.powf(-0.5)).collect();
        let zero = SpectralField::zeros(&m);
        let e = convert_pre_unitary(&zero, &[(gamma, w.clone())], &idx).unwrap();
        let t = build_sigma_table(&e, &a, 2, None, &ComparePolicy::default()).unwrap();
        let r = classify_case(&g, &e, &t, &CasePolicy::default()).unwrap();
        assert_eq!(r.scenario, Scenario::ZeroLimit("ii"));
        let ls = r.lambda("lambda_star").unwrap();
        assert!((ls - w.z_norm().powi(2)).abs() < 1e-12 * ls);
        assert!(r.residual("|lambda_star B(w1,w1)-g|").unwrap() < 1e-12 * g.z_norm());
    }

    #[test]
    fn trivial_force_expansion_is_rejected() {
        let m = ModeSet::ball(3, 2.0).unwrap();
        let zero = SpectralField::<f64>::zeros(&m);
        let e = convert_pre_unitary(&zero, &[], &[]).unwrap();
        let t = build_sigma_table(&e, &alphas(30), 1, None, &ComparePolicy::default()).unwrap();
        let err = classify_perturbed_case(&e, &e, &t, &CasePolicy::default()).unwrap_err();
        assert!(err.to_string().contains("use classify_case"));
    }
}
