//! Branch directories: `branch.csv`, `force.sf`, `run.txt` and optional
//! `state_<index>.sf` snapshots.

use std::fs;
use std::path::Path;

use super::continuation::{ContinuationRun, Spacing, StepPolicy, Termination};
use super::newton::SteadyState;
use crate::error::{Error, Result};
use crate::spectral::io::{load_field, save_field};
use crate::Scalar;

pub const BRANCH_HEADER: [&str; 5] = ["alpha", "znorm", "hnorm", "residual", "newton_iters"];

pub fn state_file_name(index: usize) -> String {
    format!("state_{index}.sf")
}

/// Writes the branch table, the force and the run metadata; snapshots of
/// every state when `snapshots` is set.
pub fn write_branch<T: Scalar>(run: &ContinuationRun<T>, dir: &Path, snapshots: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("branch.csv"))?;
    w.write_record(BRANCH_HEADER)?;
    for s in &run.states {
        w.write_record([
            s.alpha.as_f64().to_string(),
            s.v.z_norm().as_f64().to_string(),
            s.v.h_norm().as_f64().to_string(),
            s.residual.as_f64().to_string(),
            s.newton_iterations.to_string(),
        ])?;
    }
    w.flush()?;
    save_field(&run.force, &dir.join("force.sf"))?;
    if snapshots {
        for (i, s) in run.states.iter().enumerate() {
            save_field(&s.v, &dir.join(state_file_name(i)))?;
        }
    }
    fs::write(dir.join("run.txt"), run_metadata(run))?;
    Ok(())
}

fn run_metadata<T: Scalar>(run: &ContinuationRun<T>) -> String {
    let p = &run.policy;
    let mut s = String::new();
    match p.spacing {
        Spacing::Geometric { ratio } => s.push_str(&format!("spacing = geometric\nratio = {ratio}\n")),
        Spacing::Adaptive { initial_step, max_step } => s.push_str(&format!(
            "spacing = adaptive\ninitial_step = {initial_step}\nmax_step = {max_step}\n"
        )),
    }
    s.push_str(&format!(
        "min_step = {}\ngrowth = {}\nshrink = {}\neasy_iterations = {}\n",
        p.min_step, p.growth, p.shrink, p.easy_iterations
    ));
    s.push_str(&format!("newton_tol = {}\n", run.tol.as_f64()));
    s.push_str(&format!("states = {}\n", run.states.len()));
    s.push_str(&format!("force_hnorm = {}\n", run.force.h_norm().as_f64()));
    if let Some(last) = run.states.last() {
        s.push_str(&format!("grashof_max = {}\n", run.grashof(run.states.len() - 1).as_f64()));
        s.push_str(&format!("alpha_max = {}\n", last.alpha.as_f64()));
    }
    match &run.termination {
        Termination::Completed => s.push_str("termination = completed\n"),
        Termination::PossibleFold { alpha, reason } => {
            s.push_str(&format!("termination = possible fold\nfold_alpha = {alpha}\nreason = {reason}\n"))
        }
    }
    s
}

/// One row of `branch.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRow {
    pub alpha: f64,
    pub znorm: f64,
    pub hnorm: f64,
    pub residual: f64,
    pub newton_iters: usize,
}

pub fn read_branch_table(path: &Path) -> Result<Vec<BranchRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != BRANCH_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |c: usize| Error::Parse {
            line: i + 2,
            msg: format!("bad value in column {}", BRANCH_HEADER[c]),
        };
        let f = |c: usize| rec.get(c).and_then(|x| x.parse::<f64>().ok()).ok_or_else(|| bad(c));
        rows.push(BranchRow {
            alpha: f(0)?,
            znorm: f(1)?,
            hnorm: f(2)?,
            residual: f(3)?,
            newton_iters: rec.get(4).and_then(|x| x.parse().ok()).ok_or_else(|| bad(4))?,
        });
    }
    Ok(rows)
}

/// Reads a branch directory written with snapshots.
pub fn read_branch<T: Scalar>(dir: &Path) -> Result<ContinuationRun<T>> {
    let rows = read_branch_table(&dir.join("branch.csv"))?;
    let force = load_field::<T>(&dir.join("force.sf"))?;
    let mut states = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let v = load_field::<T>(&dir.join(state_file_name(i)))?;
        v.ensure_same_modes(&force)?;
        states.push(SteadyState {
            alpha: T::lit(row.alpha),
            v,
            residual: T::lit(row.residual),
            newton_iterations: row.newton_iters,
        });
    }
    let meta = fs::read_to_string(dir.join("run.txt")).unwrap_or_default();
    let get = |key: &str| {
        meta.lines()
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim().to_string())
    };
    let termination = match get("termination").as_deref() {
        Some("possible fold") => Termination::PossibleFold {
            alpha: get("fold_alpha").and_then(|x| x.parse().ok()).unwrap_or(f64::NAN),
            reason: get("reason").unwrap_or_default(),
        },
        _ => Termination::Completed,
    };
    let tol = get("newton_tol").and_then(|x| x.parse().ok()).unwrap_or(1e-9);
    let mut policy = StepPolicy::default();
    if get("spacing").as_deref() == Some("adaptive") {
        policy.spacing = Spacing::Adaptive {
            initial_step: get("initial_step").and_then(|x| x.parse().ok()).unwrap_or(0.01),
            max_step: get("max_step").and_then(|x| x.parse().ok()).unwrap_or(0.03),
        };
    } else if let Some(ratio) = get("ratio").and_then(|x| x.parse().ok()) {
        policy.spacing = Spacing::Geometric { ratio };
    }
    Ok(ContinuationRun {
        force,
        states,
        policy,
        tol: T::lit(tol),
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::ShearBenchmark;
    use crate::solver::{continue_branch, ContinuationOptions};

    #[test]
    fn branch_round_trip() {
        let b = ShearBenchmark::<f64>::standard().unwrap();
        let run = continue_branch(&b.force, 1.0, 1.5, &b.start, &ContinuationOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_branch(&run, dir.path(), true).unwrap();
        let back: ContinuationRun<f64> = read_branch(dir.path()).unwrap();
        assert_eq!(back.states.len(), run.states.len());
        for (a, b) in back.states.iter().zip(&run.states) {
            assert_eq!(a.alpha, b.alpha);
            assert_eq!(a.v.coeffs(), b.v.coeffs());
        }
        assert_eq!(back.policy, run.policy);
        let first = fs::read(dir.path().join("branch.csv")).unwrap();
        write_branch(&run, dir.path(), true).unwrap();
        assert_eq!(first, fs::read(dir.path().join("branch.csv")).unwrap());
    }
}
