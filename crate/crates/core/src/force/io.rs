//! Plan directories: `w_<k>.sf`, `h_<k>.sf`, `plan.txt`, `balance.csv`, and
//! the evaluation table `n,alpha,residual,tail_bound,measured_tail`.

use std::fs;
use std::path::Path;

use super::norms::OperatorNorms;
use super::plan::{ForceCase, ForceExpansionPlan, PlanEvaluation};
use crate::error::{Error, Result};
use crate::spectral::io::{load_field, save_field};
use crate::Scalar;

pub const PLAN_FILE: &str = "plan.txt";

pub fn write_plan<T: Scalar>(plan: &ForceExpansionPlan<T>, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (k, (w, h)) in plan.w.iter().zip(&plan.h).enumerate() {
        save_field(w, &dir.join(format!("w_{k}.sf")))?;
        save_field(h, &dir.join(format!("h_{k}.sf")))?;
    }
    let draws: Vec<String> = plan.draws.iter().map(usize::to_string).collect();
    let text = format!(
        "M = {}\nD0 = {}\nc0 = {}\nM_A = {}\nM_B = {}\nM_B_lower = {}\ncase = {}\nseed = {}\ndepth = {}\ndraws = {}\n",
        plan.m.as_f64(),
        plan.d0.as_f64(),
        plan.c0.as_f64(),
        plan.norms.m_a.as_f64(),
        plan.norms.m_b_upper.as_f64(),
        plan.norms.m_b_lower.as_f64(),
        plan.case,
        plan.seed,
        plan.depth(),
        draws.join(" ")
    );
    fs::write(dir.join(PLAN_FILE), text)?;
    let mut w = csv::Writer::from_path(dir.join("balance.csv"))?;
    w.write_record(["m", "residual", "norm_w", "norm_h"])?;
    for (m, r) in plan.balance_residuals()?.iter().enumerate() {
        w.write_record([
            m.to_string(),
            r.as_f64().to_string(),
            plan.w[m].h_norm().as_f64().to_string(),
            plan.h[m].h_norm().as_f64().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_plan<T: Scalar>(dir: &Path) -> Result<ForceExpansionPlan<T>> {
    let text = fs::read_to_string(dir.join(PLAN_FILE))?;
    let mut kv = std::collections::HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected key = value, got {line:?}"),
        })?;
        kv.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
    }
    let get = |key: &str| -> Result<&(usize, String)> {
        kv.get(key).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing {key}"),
        })
    };
    let real = |key: &str| -> Result<T> {
        let (ln, v) = get(key)?;
        v.parse::<f64>().map(T::lit).map_err(|_| Error::Parse {
            line: *ln,
            msg: format!("bad number {v:?}"),
        })
    };
    let int = |key: &str| -> Result<u64> {
        let (ln, v) = get(key)?;
        v.parse::<u64>().map_err(|_| Error::Parse {
            line: *ln,
            msg: format!("bad integer {v:?}"),
        })
    };
    let depth = int("depth")? as usize;
    let mut w = Vec::with_capacity(depth + 1);
    let mut h = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        w.push(load_field::<T>(&dir.join(format!("w_{k}.sf")))?);
        h.push(load_field::<T>(&dir.join(format!("h_{k}.sf")))?);
    }
    let draws = match kv.get("draws") {
        Some((ln, v)) => v
            .split_whitespace()
            .map(|x| {
                x.parse().map_err(|_| Error::Parse {
                    line: *ln,
                    msg: format!("bad integer {x:?}"),
                })
            })
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(ForceExpansionPlan {
        w,
        h,
        m: real("M")?,
        d0: real("D0")?,
        c0: real("c0")?,
        norms: OperatorNorms {
            m_a: real("M_A")?,
            m_b_lower: real("M_B_lower")?,
            m_b_upper: real("M_B")?,
        },
        case: get("case")?.1.parse::<ForceCase>()?,
        seed: int("seed")?,
        draws,
    })
}

pub fn write_evaluation<T: Scalar>(ev: &PlanEvaluation<T>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "alpha", "residual", "tail_bound", "measured_tail"])?;
    for p in &ev.points {
        w.write_record([
            p.n.to_string(),
            p.alpha.as_f64().to_string(),
            p.residual.as_f64().to_string(),
            p.tail_bound.as_f64().to_string(),
            p.measured_tail.as_f64().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
