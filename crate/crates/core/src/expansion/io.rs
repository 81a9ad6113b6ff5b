//! Expansion directories: `limit.sf`, `w_<k>.sf`, `gamma.csv` and
//! `expansion.txt`.

use std::fs;
use std::path::Path;

use super::{ExpansionKind, ExpansionLevel, UnitaryExpansion};
use crate::error::{Error, Result};
use crate::spectral::io::{load_field, save_field};
use crate::spectral::SpectralField;
use crate::Scalar;

pub fn direction_file_name(k: usize) -> String {
    format!("w_{k}.sf")
}

/// Writes the expansion. `alphas[n]` labels sequence position `n` in
/// `gamma.csv`; the table is the padded [`UnitaryExpansion::gamma_table`].
pub fn write_expansion<T: Scalar>(
    exp: &UnitaryExpansion<T>,
    seq: &[SpectralField<T>],
    alphas: &[f64],
    dir: &Path,
) -> Result<()> {
    if alphas.len() != seq.len() {
        return Err(Error::InvalidInput(format!("{} labels for {} elements", alphas.len(), seq.len())));
    }
    fs::create_dir_all(dir)?;
    save_field(&exp.limit, &dir.join("limit.sf"))?;
    for (k, level) in exp.levels.iter().enumerate() {
        save_field(&level.direction, &dir.join(direction_file_name(k + 1)))?;
    }
    let mut w = csv::Writer::from_path(dir.join("gamma.csv"))?;
    let mut header = vec!["n".to_string(), "alpha".to_string()];
    header.extend((1..=exp.depth()).map(|k| format!("gamma{k}")));
    w.write_record(&header)?;
    let (rows, table) = exp.gamma_table(seq);
    for (n, row) in rows.iter().zip(&table) {
        let mut rec = vec![n.to_string(), alphas[*n].to_string()];
        rec.extend(row.iter().map(|g| g.as_f64().to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut s = format!("kind = {}\nstrict = {}\ndepth = {}\n", exp.kind, exp.strict, exp.depth());
    if let Some(i) = exp.limit_index {
        s.push_str(&format!("limit_index = {i}\n"));
    }
    for (k, level) in exp.levels.iter().enumerate() {
        if let Some(p) = level.proxy {
            s.push_str(&format!("level_{}_proxy = {p}\n", k + 1));
        }
        let idx: Vec<String> = level.indices.iter().map(usize::to_string).collect();
        s.push_str(&format!("level_{}_indices = {}\n", k + 1, idx.join(" ")));
        let g: Vec<String> = level.gamma.iter().map(|x| x.as_f64().to_string()).collect();
        s.push_str(&format!("level_{}_gamma = {}\n", k + 1, g.join(" ")));
    }
    for d in &exp.diagnostics {
        s.push_str(&format!("diagnostic = {d}\n"));
    }
    fs::write(dir.join("expansion.txt"), s)?;
    Ok(())
}

fn parse_kind(s: &str, line: usize) -> Result<ExpansionKind> {
    let bad = || Error::Parse {
        line,
        msg: format!("unknown kind {s:?}"),
    };
    if s == "trivial" {
        return Ok(ExpansionKind::Trivial);
    }
    let (name, rest) = s.split_once('(').ok_or_else(bad)?;
    let k: usize = rest.strip_suffix(')').and_then(|x| x.parse().ok()).ok_or_else(bad)?;
    match name {
        "finite" => Ok(ExpansionKind::Finite(k)),
        "truncated" => Ok(ExpansionKind::Truncated(k)),
        _ => Err(bad()),
    }
}

/// Reads an expansion back. Remainders and distances are not stored and
/// come back empty; ratios are recomputed from the coefficients.
pub fn read_expansion<T: Scalar>(dir: &Path) -> Result<UnitaryExpansion<T>> {
    let limit = load_field::<T>(&dir.join("limit.sf"))?;
    let text = fs::read_to_string(dir.join("expansion.txt"))?;
    let mut kind = None;
    let mut strict = false;
    let mut depth = 0usize;
    let mut limit_index = None;
    let mut diagnostics = Vec::new();
    let mut proxies: Vec<(usize, usize)> = Vec::new();
    let mut indices: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut gammas: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let Some((key, val)) = line.split_once('=') else {
            continue;
        };
        let (key, val) = (key.trim(), val.trim());
        let perr = |msg: String| Error::Parse { line: ln, msg };
        let num = |v: &str| v.parse::<usize>().map_err(|_| perr(format!("bad integer {v:?}")));
        match key {
            "kind" => kind = Some(parse_kind(val, ln)?),
            "strict" => strict = val == "true",
            "depth" => depth = num(val)?,
            "limit_index" => limit_index = Some(num(val)?),
            "diagnostic" => diagnostics.push(val.to_string()),
            _ => {
                let Some(rest) = key.strip_prefix("level_") else {
                    return Err(perr(format!("unknown key {key:?}")));
                };
                let (k, field) = rest.split_once('_').ok_or_else(|| perr(format!("bad key {key:?}")))?;
                let k = num(k)?;
                let words = val.split_whitespace();
                match field {
                    "proxy" => proxies.push((k, num(val)?)),
                    "indices" => indices.push((k, words.map(num).collect::<Result<_>>()?)),
                    "gamma" => gammas.push((
                        k,
                        words
                            .map(|w| w.parse::<f64>().map_err(|_| perr(format!("bad number {w:?}"))))
                            .collect::<Result<_>>()?,
                    )),
                    _ => return Err(perr(format!("unknown key {key:?}"))),
                }
            }
        }
    }
    let kind = kind.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing kind".into(),
    })?;
    let mut levels: Vec<ExpansionLevel<T>> = Vec::with_capacity(depth);
    for k in 1..=depth {
        let direction = load_field::<T>(&dir.join(direction_file_name(k)))?;
        direction.ensure_same_modes(&limit)?;
        let idx = indices.iter().find(|(j, _)| *j == k).map(|(_, v)| v.clone()).unwrap_or_default();
        let gamma: Vec<T> = gammas
            .iter()
            .find(|(j, _)| *j == k)
            .map(|(_, v)| v.iter().map(|&x| T::lit(x)).collect())
            .unwrap_or_default();
        if gamma.len() != idx.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("level {k}: {} coefficients for {} indices", gamma.len(), idx.len()),
            });
        }
        let ratio = idx
            .iter()
            .zip(&gamma)
            .map(|(&n, &g)| match levels.last() {
                None => g,
                Some(prev) => prev.gamma_at(n).map(|p| g / p).unwrap_or(T::nan()),
            })
            .collect();
        levels.push(ExpansionLevel {
            direction,
            indices: idx,
            gamma,
            ratio,
            remainders: Vec::new(),
            distances: Vec::new(),
            proxy: proxies.iter().find(|(j, _)| *j == k).map(|(_, p)| *p),
        });
    }
    Ok(UnitaryExpansion {
        limit,
        limit_index,
        levels,
        kind,
        strict,
        diagnostics,
    })
}
