//! Flat TOML run configuration and the named presets shipped with the binary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

pub const PRESETS: [(&str, &str); 4] = [
    ("shear-branch", include_str!("../presets/shear-branch.toml")),
    ("vanishing-limit", include_str!("../presets/vanishing-limit.toml")),
    ("coupled-plan", include_str!("../presets/coupled-plan.toml")),
    ("decoupled-plan", include_str!("../presets/decoupled-plan.toml")),
];

/// Every key any subcommand reads. Unset keys take the defaults of the
/// accessor methods below.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: Option<usize>,
    pub lambda_cut: Option<f64>,

    // force and starting state
    pub force: Option<String>,
    pub force_file: Option<PathBuf>,
    pub force_coeffs: Option<Vec<Vec<f64>>>,
    pub start: Option<String>,
    pub start_file: Option<PathBuf>,

    // continuation
    pub alpha_start: Option<f64>,
    pub alpha_end: Option<f64>,
    pub spacing: Option<String>,
    pub ratio: Option<f64>,
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
    pub min_step: Option<f64>,
    pub max_states: Option<usize>,
    pub newton_tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub predictor: Option<String>,
    pub snapshots: Option<bool>,

    // expansion
    pub depth: Option<usize>,
    pub trivial_threshold: Option<f64>,
    pub stagnation_tol: Option<f64>,

    // classification
    pub k_max: Option<usize>,
    pub tail_fraction: Option<f64>,
    pub window: Option<f64>,
    pub slope_threshold: Option<f64>,
    pub plateau_tolerance: Option<f64>,
    pub min_points: Option<usize>,
    pub zero_tol: Option<f64>,
    pub stokes_tol: Option<f64>,
    pub min_rows: Option<usize>,
    pub totalize_floor: Option<usize>,

    // force construction
    pub construction: Option<String>,
    pub w0_coeffs: Option<Vec<Vec<f64>>>,
    pub w0_file: Option<PathBuf>,
    pub u_coeffs: Option<Vec<Vec<f64>>>,
    pub u_file: Option<PathBuf>,
    pub subspace_k: Option<Vec<i32>>,
    pub subspace_k3: Option<Vec<Vec<i32>>>,
    pub m_bound: Option<f64>,
    pub d0: Option<f64>,
    pub order: Option<usize>,
    pub seed: Option<u64>,
    pub alpha_first: Option<f64>,
    pub alpha_ratio: Option<f64>,
    pub alpha_count: Option<usize>,
    pub m_trunc: Option<usize>,
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table, Failure> {
    text.parse::<toml::Table>()
        .map_err(|e| Failure::Config(format!("{origin}: {e}")))
}

/// Preset values overlaid by the config file. Relative paths in the file
/// resolve against its directory.
pub fn load(preset: Option<&str>, config: Option<&Path>) -> Result<RunConfig, Failure> {
    let mut table = toml::Table::new();
    if let Some(name) = preset {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Failure::Config(format!("unknown preset `{name}`; available: {}", names.join(", ")))
        })?;
        table = parse_table(text, name)?;
    }
    let mut base = None;
    if let Some(path) = config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        table.extend(parse_table(&text, &path.display().to_string())?);
        base = path.parent().map(Path::to_path_buf);
    }
    let mut cfg: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Failure::Config(e.to_string()))?;
    if let Some(dir) = base {
        for p in [&mut cfg.force_file, &mut cfg.start_file, &mut cfg.w0_file, &mut cfg.u_file].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn positive(name: &str, v: Option<f64>) -> Result<(), Failure> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Failure::Config(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), Failure> {
        for (name, v) in [
            ("lambda_cut", self.lambda_cut),
            ("alpha_start", self.alpha_start),
            ("alpha_end", self.alpha_end),
            ("newton_tol", self.newton_tol),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
            ("min_step", self.min_step),
            ("trivial_threshold", self.trivial_threshold),
            ("stagnation_tol", self.stagnation_tol),
            ("slope_threshold", self.slope_threshold),
            ("plateau_tolerance", self.plateau_tolerance),
            ("zero_tol", self.zero_tol),
            ("stokes_tol", self.stokes_tol),
            ("m_bound", self.m_bound),
            ("d0", self.d0),
            ("alpha_first", self.alpha_first),
            ("alpha_ratio", self.alpha_ratio),
        ] {
            positive(name, v)?;
        }
        if let (Some(a), Some(b)) = (self.alpha_start, self.alpha_end) {
            if a >= b {
                return Err(Failure::Config(format!("empty schedule: alpha_start {a} >= alpha_end {b}")));
            }
        }
        if self.alpha_count == Some(0) {
            return Err(Failure::Config("alpha_count must be at least 1".into()));
        }
        if let Some(d) = self.dimension {
            if d != 2 && d != 3 {
                return Err(Failure::Config(format!("dimension must be 2 or 3, got {d}")));
            }
        }
        let sources = [self.force.is_some(), self.force_file.is_some(), self.force_coeffs.is_some()];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return Err(Failure::Config("give at most one of force, force_file, force_coeffs".into()));
        }
        for p in [&self.force_file, &self.start_file, &self.w0_file, &self.u_file].into_iter().flatten() {
            if !p.is_file() {
                return Err(Failure::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension.unwrap_or(3)
    }

    pub fn lambda_cut(&self) -> f64 {
        self.lambda_cut.unwrap_or(9.0)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// `alpha_first * alpha_ratio^i` for `i < alpha_count`.
    pub fn alpha_list(&self) -> Vec<f64> {
        let (a, r) = (self.alpha_first.unwrap_or(10.0), self.alpha_ratio.unwrap_or(2.0));
        (0..self.alpha_count.unwrap_or(21)).map(|i| a * r.powi(i as i32)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for (name, _) in PRESETS {
            load(Some(name), None).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn config_overrides_preset() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        fs::write(&p, "alpha_end = 2.0\n").unwrap();
        let c = load(Some("shear-branch"), Some(&p)).unwrap();
        assert_eq!(c.alpha_end, Some(2.0));
        assert_eq!(c.depth, Some(2));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        for text in ["colour = 1\n", "newton_tol = -1.0\n", "alpha_start = 3.0\nalpha_end = 2.0\n", "force_file = \"nope.sf\"\n"] {
            fs::write(&p, text).unwrap();
            assert!(matches!(load(None, Some(&p)), Err(Failure::Config(_))), "{text}");
        }
    }
}
