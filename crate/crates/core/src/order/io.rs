//! `sigma.csv`, `ratios.csv` and `case_report.txt`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::cases::CaseReport;
use super::ordinal::OrderReport;
use super::table::SigmaTable;
use super::SigmaLabel;
use crate::error::Result;

/// Ratios plotted to separate decaying from flat pairs on a depth-two table.
pub fn default_ratio_pairs() -> Vec<(SigmaLabel, SigmaLabel)> {
    use SigmaLabel::*;
    vec![
        (Sigma(1), AlphaGamma(1)),
        (Sigma(1), AlphaGamma(2)),
        (Pair(1, 1), AlphaGamma(2)),
        (Sigma(2), Pair(1, 1)),
        (Pair(1, 2), Sigma(2)),
    ]
}

/// Wide table `n,alpha,<label>...`.
pub fn write_sigma_csv(table: &SigmaTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["n".to_string(), "alpha".to_string()];
    header.extend(table.sequences.iter().map(|s| s.label.to_string()));
    w.write_record(&header)?;
    for (i, n) in table.indices.iter().enumerate() {
        let mut rec = vec![n.to_string(), table.alphas[i].to_string()];
        rec.extend(table.sequences.iter().map(|s| s.values[i].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `n,alpha,<a>/<b>...` for the pairs present in the table.
pub fn write_ratios_csv(table: &SigmaTable, pairs: &[(SigmaLabel, SigmaLabel)], path: &Path) -> Result<()> {
    let present: Vec<(&[f64], &[f64], String)> = pairs
        .iter()
        .filter_map(|(a, b)| Some((table.values(a)?, table.values(b)?, format!("{a}/{b}"))))
        .collect();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["n".to_string(), "alpha".to_string()];
    header.extend(present.iter().map(|(_, _, name)| name.clone()));
    w.write_record(&header)?;
    for (i, n) in table.indices.iter().enumerate() {
        let mut rec = vec![n.to_string(), table.alphas[i].to_string()];
        rec.extend(present.iter().map(|(a, b, _)| (a[i] / b[i]).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable report: scenario, estimates, residuals, verdicts,
/// ordering and the policy constants used.
pub fn format_case_report(report: &CaseReport, table: &SigmaTable, order: Option<&OrderReport>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario = {}", report.scenario);
    for (k, v) in &report.lambdas {
        let _ = writeln!(s, "{k} = {v}");
    }
    for (k, v) in &report.residuals {
        let _ = writeln!(s, "residual {k} = {v:e}");
    }
    if let Some((chi, class)) = &report.chi {
        let _ = writeln!(s, "chi sign class = {class:?} over {} rows", chi.len());
    }
    let _ = writeln!(s, "rows = {}", table.len());
    for (i, a) in table.sequences.iter().enumerate() {
        for (j, b) in table.sequences.iter().enumerate().skip(i + 1) {
            let v = table.verdicts[i][j];
            match v {
                super::Verdict::Equiv(l) => {
                    let _ = writeln!(s, "verdict {} ~ {} (limit {l})", a.label, b.label);
                }
                _ => {
                    let _ = writeln!(s, "verdict {} {} {}", a.label, v.symbol(), b.label);
                }
            }
        }
    }
    if let Some(o) = order {
        let _ = writeln!(s, "chain = {}", o.chain());
        for (l, k) in &o.ordinals {
            let _ = writeln!(s, "ord({l}) = {k}");
        }
        for c in &o.checks {
            let _ = writeln!(s, "bound {}: {} {}", c.label, c.description, if c.passed { "ok" } else { "VIOLATED" });
        }
        for a in &o.annotations {
            let _ = writeln!(s, "annotation = {a}");
        }
        for i in &o.issues {
            let _ = writeln!(s, "issue = {i}");
        }
    }
    for n in table.notes.iter().chain(&report.notes) {
        let _ = writeln!(s, "note = {n}");
    }
    let p = &report.compare_policy;
    let _ = writeln!(
        s,
        "policy tail_fraction = {}\npolicy window = {}\npolicy slope_threshold = {}\npolicy plateau_tolerance = {}\npolicy min_points = {}",
        p.tail_fraction, p.window, p.slope_threshold, p.plateau_tolerance, p.min_points
    );
    let c = &report.policy;
    let _ = writeln!(
        s,
        "policy zero_tol = {}\npolicy stokes_tol = {}\npolicy min_rows = {}",
        c.zero_tol, c.stokes_tol, c.min_rows
    );
    s
}

pub fn write_case_report(report: &CaseReport, table: &SigmaTable, order: Option<&OrderReport>, path: &Path) -> Result<()> {
    fs::write(path, format_case_report(report, table, order))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{ComparePolicy, SigmaSequence};

    #[test]
    fn csv_columns_follow_labels() {
        let a: Vec<f64> = (1..=10).map(|n| n as f64).collect();
        let seqs = vec![
            SigmaSequence {
                label: SigmaLabel::Sigma(1),
                values: a.iter().map(|x| 1.0 / x).collect(),
            },
            SigmaSequence {
                label: SigmaLabel::AlphaGamma(1),
                values: vec![1.0; 10],
            },
        ];
        let t = SigmaTable::new((0..10).collect(), a, seqs, ComparePolicy::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_sigma_csv(&t, &dir.path().join("s.csv")).unwrap();
        write_ratios_csv(&t, &default_ratio_pairs(), &dir.path().join("r.csv")).unwrap();
        let mut r = csv::Reader::from_path(dir.path().join("r.csv")).unwrap();
        let h: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
        assert_eq!(h, ["n", "alpha", "sigma_1/sigma_0_1"]);
        let row = r.records().nth(3).unwrap().unwrap();
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.25);
        let s = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
        assert!(s.starts_with("n,alpha,sigma_1,sigma_0_1"));
    }
}
