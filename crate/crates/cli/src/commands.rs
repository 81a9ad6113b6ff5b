use std::fs;
use std::path::Path;

use nsgalerkin::benchmark::ShearBenchmark;
use nsgalerkin::expansion::io::{read_expansion, write_expansion};
use nsgalerkin::expansion::{extract_expansion, ExpansionOptions};
use nsgalerkin::force::{
    build_force_expansion, evaluate_plan, vanishing_limit_pair, write_evaluation, write_plan, zero_bs_subspace,
};
use nsgalerkin::order::io::{default_ratio_pairs, write_case_report, write_ratios_csv, write_sigma_csv};
use nsgalerkin::order::{build_sigma_table, classify_case, ordinal_assign, totalize, CasePolicy, ComparePolicy};
use nsgalerkin::solver::io::{read_branch, write_branch};
use nsgalerkin::solver::{continue_branch, picard_iterate, ContinuationOptions, Predictor, Spacing};
use nsgalerkin::spectral::io::{load_field, save_field};
use nsgalerkin::{Field, ModeSet, WaveVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{self, RunConfig};
use crate::{Common, Failure};

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = config::load(c.preset.as_deref(), c.config.as_deref())?;
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    Ok(cfg)
}

fn create_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))
}

/// Field from rows `k_1 .. k_d, re_1, im_1, .., re_d, im_d`.
fn field_from_rows(modes: &ModeSet, rows: &[Vec<f64>], key: &str) -> Result<Field, Failure> {
    let d = modes.dim();
    let mut u = Field::zeros(modes);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 3 * d {
            return Err(Failure::Config(format!("{key}[{i}]: expected {} numbers, got {}", 3 * d, row.len())));
        }
        let mut k = [0i32; 3];
        for (j, x) in row[..d].iter().enumerate() {
            if x.fract() != 0.0 {
                return Err(Failure::Config(format!("{key}[{i}]: wave-vector entry {x} is not an integer")));
            }
            k[j] = *x as i32;
        }
        let mut c = [Complex::new(0.0, 0.0); 3];
        for (j, z) in c.iter_mut().take(d).enumerate() {
            *z = Complex::new(row[d + 2 * j], row[d + 2 * j + 1]);
        }
        u.set(WaveVector(k), c).map_err(|e| Failure::Config(format!("{key}[{i}]: {e}")))?;
    }
    Ok(u)
}

fn field_source(
    modes: &ModeSet,
    rows: &Option<Vec<Vec<f64>>>,
    file: &Option<std::path::PathBuf>,
    key: &str,
) -> Result<Option<Field>, Failure> {
    if let Some(p) = file {
        let u: Field = load_field(p)?;
        if !u.modes().same_as(modes) && u.modes().modes() != modes.modes() {
            return Err(Failure::Config(format!("{}: field lives on a different mode set", p.display())));
        }
        return Ok(Some(Field::from_coeffs(modes, u.coeffs().to_vec())?));
    }
    rows.as_ref().map(|r| field_from_rows(modes, r, key)).transpose()
}

pub fn run_continue(c: &Common) -> Result<(), Failure> {
    let cfg = load_config(c)?;
    let modes = ModeSet::ball(cfg.dimension(), cfg.lambda_cut())?;
    let bench = || ShearBenchmark::<f64>::new(&modes);
    let force = match cfg.force.as_deref() {
        Some("shear") => bench()?.force,
        Some(other) => return Err(Failure::Config(format!("unknown force `{other}`"))),
        None => field_source(&modes, &cfg.force_coeffs, &cfg.force_file, "force_coeffs")?
            .ok_or_else(|| Failure::Config("no force given: set force, force_file or force_coeffs".into()))?,
    };
    let alpha_start = cfg.alpha_start.unwrap_or(1.0);
    let alpha_end = cfg.alpha_end.unwrap_or(100.0);
    let start = match (&cfg.start_file, cfg.start.as_deref()) {
        (Some(_), _) => field_source(&modes, &None, &cfg.start_file, "start_file")?.expect("file given"),
        (None, Some("shear")) => bench()?.start,
        (None, None | Some("stokes")) => picard_iterate(alpha_start, &force, 20)?,
        (None, Some(other)) => return Err(Failure::Config(format!("unknown start `{other}`"))),
    };
    let mut opts = ContinuationOptions::default();
    opts.policy.spacing = match cfg.spacing.as_deref().unwrap_or("geometric") {
        "geometric" => Spacing::Geometric {
            ratio: cfg.ratio.unwrap_or(1.05),
        },
        "adaptive" => Spacing::Adaptive {
            initial_step: cfg.initial_step.unwrap_or(0.01),
            max_step: cfg.max_step.unwrap_or(0.03),
        },
        other => return Err(Failure::Config(format!("unknown spacing `{other}`"))),
    };
    opts.predictor = match cfg.predictor.as_deref().unwrap_or("previous") {
        "previous" => Predictor::Previous,
        "secant" => Predictor::Secant,
        other => return Err(Failure::Config(format!("unknown predictor `{other}`"))),
    };
    if let Some(x) = cfg.min_step {
        opts.policy.min_step = x;
    }
    if let Some(x) = cfg.max_states {
        opts.policy.max_states = x;
    }
    if let Some(x) = cfg.newton_tol {
        opts.newton.tol = x;
    }
    if let Some(x) = cfg.max_iterations {
        opts.newton.max_iterations = x;
    }
    let run = continue_branch(&force, alpha_start, alpha_end, &start, &opts)?;
    write_branch(&run, &c.out, cfg.snapshots.unwrap_or(true))?;
    let last = run.states.last().map(|s| s.alpha).unwrap_or(f64::NAN);
    println!("states = {}", run.states.len());
    println!("alpha_max = {last}");
    println!("force_hnorm = {}", force.h_norm());
    if !run.is_complete() {
        return Err(Failure::Numerical(format!("branch truncated: {:?}", run.termination)));
    }
    Ok(())
}

fn expansion_options(cfg: &RunConfig, depth: usize) -> ExpansionOptions<f64> {
    let mut o = ExpansionOptions::new(depth);
    if let Some(x) = cfg.trivial_threshold {
        o.trivial_threshold = x;
    }
    if let Some(x) = cfg.stagnation_tol {
        o.stagnation_tol = x;
    }
    if let Some(x) = cfg.tail_fraction {
        o.tail_fraction = x;
    }
    o
}

pub fn run_expand(c: &Common, branch: &Path, depth: Option<usize>) -> Result<(), Failure> {
    let cfg = load_config(c)?;
    let run = read_branch::<f64>(branch)?;
    let depth = depth.or(cfg.depth).unwrap_or(2);
    let seq = run.fields();
    let alphas = run.alphas();
    let exp = extract_expansion(&seq, &expansion_options(&cfg, depth))?;
    write_expansion(&exp, &seq, &alphas, &c.out)?;
    println!("kind = {}", exp.kind);
    println!("depth = {}", exp.depth());
    if exp.is_trivial() {
        println!("note = trivial expansion: every state equals the limit");
    }
    for d in &exp.diagnostics {
        println!("diagnostic = {d}");
    }
    Ok(())
}

pub fn run_classify(c: &Common, branch: &Path, expansion: &Path, k_max: Option<usize>) -> Result<(), Failure> {
    let cfg = load_config(c)?;
    if !expansion.is_dir() {
        return Err(Failure::Config(format!("expansion directory {} not found", expansion.display())));
    }
    let run = read_branch::<f64>(branch)?;
    let exp = read_expansion::<f64>(expansion)?;
    let d = ComparePolicy::default();
    let policy = ComparePolicy {
        tail_fraction: cfg.tail_fraction.unwrap_or(d.tail_fraction),
        window: cfg.window.unwrap_or(d.window),
        slope_threshold: cfg.slope_threshold.unwrap_or(d.slope_threshold),
        plateau_tolerance: cfg.plateau_tolerance.unwrap_or(d.plateau_tolerance),
        min_points: cfg.min_points.unwrap_or(d.min_points),
    };
    let cd = CasePolicy::default();
    let case_policy = CasePolicy {
        zero_tol: cfg.zero_tol.unwrap_or(cd.zero_tol),
        stokes_tol: cfg.stokes_tol.unwrap_or(cd.stokes_tol),
        min_rows: cfg.min_rows.unwrap_or(cd.min_rows),
    };
    let k_max = k_max.or(cfg.k_max).unwrap_or(2);
    let table = build_sigma_table(&exp, &run.alphas(), k_max, None, &policy)?;
    let tot = totalize(&table, cfg.totalize_floor.unwrap_or(16))?;
    let order = if tot.complete() { Some(ordinal_assign(&tot.table)?) } else { None };
    let report = classify_case(&run.force, &exp, &tot.table, &case_policy)?;
    create_out(&c.out)?;
    write_sigma_csv(&tot.table, &c.out.join("sigma.csv"))?;
    write_ratios_csv(&tot.table, &default_ratio_pairs(), &c.out.join("ratios.csv"))?;
    write_case_report(&report, &tot.table, order.as_ref(), &c.out.join("case_report.txt"))?;
    println!("scenario = {}", report.scenario);
    println!("rows = {} (dropped {})", tot.table.len(), tot.dropped);
    if let Some(o) = &order {
        println!("chain = {}", o.chain());
    }
    for d in &tot.diagnostics {
        println!("diagnostic = {d}");
    }
    Ok(())
}

pub fn run_construct(c: &Common) -> Result<(), Failure> {
    let cfg = load_config(c)?;
    match cfg.construction.as_deref().unwrap_or("plan") {
        "plan" => construct_plan(&cfg, &c.out),
        "vanishing" => construct_vanishing(&cfg, &c.out),
        other => Err(Failure::Config(format!("unknown construction `{other}`"))),
    }
}

fn wave(v: &[i32], key: &str) -> Result<WaveVector, Failure> {
    match v {
        [a, b] => Ok(WaveVector::new(*a, *b, 0)),
        [a, b, c] => Ok(WaveVector::new(*a, *b, *c)),
        _ => Err(Failure::Config(format!("{key}: wave vectors need 2 or 3 entries"))),
    }
}

fn construct_plan(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let m = cfg.m_bound.unwrap_or(1.0);
    let modes = match &cfg.subspace_k {
        Some(k) => {
            let k3 = cfg
                .subspace_k3
                .iter()
                .flatten()
                .map(|j| wave(j, "subspace_k3"))
                .collect::<Result<Vec<_>, _>>()?;
            let space = zero_bs_subspace(cfg.dimension(), wave(k, "subspace_k")?, m, &k3)?;
            if !space.passed() {
                return Err(Failure::Numerical(format!("subspace check failed, defect {:e}", space.max_defect)));
            }
            space.modes
        }
        None => ModeSet::ball(cfg.dimension(), cfg.lambda_cut())?,
    };
    let w0 = field_source(&modes, &cfg.w0_coeffs, &cfg.w0_file, "w0_coeffs")?
        .ok_or_else(|| Failure::Config("no base field: set w0_coeffs or w0_file".into()))?;
    let plan = build_force_expansion(&w0, m, cfg.d0.unwrap_or(2.0), cfg.order.unwrap_or(6), cfg.seed())?;
    let m_trunc = cfg.m_trunc.unwrap_or(plan.depth());
    let ev = evaluate_plan(&plan, &cfg.alpha_list(), m_trunc)?;
    write_plan(&plan, &out.join("plan"))?;
    write_evaluation(&ev, &out.join("evaluation.csv"))?;
    let bal = plan.balance_residuals()?.into_iter().fold(0.0, f64::max);
    println!("case = {}", plan.case);
    println!("depth = {}", plan.depth());
    println!("c0 = {}", plan.c0);
    println!("max_balance_residual = {bal:e}");
    println!("excluded = {}", ev.excluded.len());
    Ok(())
}

fn construct_vanishing(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let modes = ModeSet::ball(cfg.dimension(), cfg.lambda_cut())?;
    let u = match field_source(&modes, &cfg.u_coeffs, &cfg.u_file, "u_coeffs")? {
        Some(u) => u,
        None => Field::random_solenoidal(&modes, &mut ChaCha8Rng::seed_from_u64(cfg.seed())),
    };
    let m = cfg.m_bound.unwrap_or(1.0);
    let pair = vanishing_limit_pair(&u, m, &cfg.alpha_list())?;
    create_out(out)?;
    save_field(&pair.g, &out.join("g.sf"))?;
    save_field(&pair.w1, &out.join("w1.sf"))?;
    save_field(&pair.h1, &out.join("h1.sf"))?;
    let mut w = csv::Writer::from_path(out.join("pair.csv")).map_err(|e| Failure::Config(e.to_string()))?;
    let rows = (|| -> csv::Result<()> {
        w.write_record(["n", "alpha", "state_hnorm", "force_hnorm", "residual"])?;
        for (n, a) in pair.alphas.iter().enumerate() {
            w.write_record([
                n.to_string(),
                a.to_string(),
                pair.states[n].h_norm().to_string(),
                pair.forces[n].h_norm().to_string(),
                pair.residuals[n].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })();
    rows.map_err(|e| Failure::Config(e.to_string()))?;
    println!("g_hnorm = {}", pair.g.h_norm());
    println!("w1_hnorm = {}", pair.w1.h_norm());
    println!("max_residual = {:e}", pair.residuals.iter().copied().fold(0.0, f64::max));
    Ok(())
}
