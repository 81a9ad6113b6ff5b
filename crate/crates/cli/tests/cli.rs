use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nsgalerkin::solver::io::read_branch_table;
use nsgalerkin::spectral::io::load_field;
use nsgalerkin::Field;

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsgalerkin"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let h = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (h, rows)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for e in walk(dir) {
        out.push((e.strip_prefix(dir).unwrap().display().to_string(), fs::read(&e).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            v.extend(walk(&p));
        } else {
            v.push(p);
        }
    }
    v
}

#[test]
fn two_point_schedule_gives_two_rows() {
    let t = tempfile::tempdir().unwrap();
    write(t.path(), "c.toml", "spacing = \"geometric\"\nratio = 2.0\nalpha_end = 2.0\n");
    let o = run(&["continue", "--preset", "shear-branch", "--config", "c.toml", "--out", "br"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    let rows = read_branch_table(&t.path().join("br/branch.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].alpha, rows[1].alpha), (1.0, 2.0));
    assert!(rows.iter().all(|r| r.residual <= 1e-9));
}

#[test]
fn missing_force_file_is_a_config_error() {
    let t = tempfile::tempdir().unwrap();
    write(t.path(), "c.toml", "force_file = \"absent.sf\"\nalpha_end = 2.0\n");
    let o = run(&["continue", "--config", "c.toml", "--out", "br"], t.path());
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("absent.sf"));
}

#[test]
fn malformed_force_file_is_a_config_error() {
    let t = tempfile::tempdir().unwrap();
    write(t.path(), "g.sf", "not a field\n");
    write(t.path(), "c.toml", "force_file = \"g.sf\"\nalpha_end = 2.0\n");
    let o = run(&["continue", "--config", "c.toml", "--out", "br"], t.path());
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
}

#[test]
fn unknown_preset_and_key_exit_two() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["construct", "--preset", "nonesuch", "--out", "x"], t.path());
    assert_eq!(o.status.code(), Some(2));
    write(t.path(), "c.toml", "alpha_sart = 1.0\n");
    let o = run(&["continue", "--config", "c.toml", "--out", "x"], t.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stokes_eigenfield_branch_has_trivial_expansion() {
    // Single mode: B(v, v) = 0, so A v = g holds for every alpha.
    let t = tempfile::tempdir().unwrap();
    write(
        t.path(),
        "c.toml",
        "force_coeffs = [[1, 0, 0, 0.0, 0.0, 0.5, -0.25, 0.0, 0.0]]\nalpha_end = 2.0\nlambda_cut = 4.0\n",
    );
    let o = run(&["continue", "--config", "c.toml", "--out", "br"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    let o = run(&["expand", "--branch", "br", "--depth", "2", "--out", "ex"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("trivial expansion"), "{}", text(&o));
    let rep = fs::read_to_string(t.path().join("ex/expansion.txt")).unwrap();
    assert!(rep.contains("kind = trivial"));
}

#[test]
fn depth_zero_writes_only_the_limit() {
    let t = tempfile::tempdir().unwrap();
    write(t.path(), "c.toml", "alpha_end = 1.5\n");
    let o = run(&["continue", "--preset", "shear-branch", "--config", "c.toml", "--out", "br"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    let o = run(&["expand", "--branch", "br", "--depth", "0", "--out", "ex"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(t.path().join("ex/limit.sf").is_file());
    assert!(!t.path().join("ex/w_1.sf").exists());
    let (h, _) = read_csv(&t.path().join("ex/gamma.csv"));
    assert_eq!(h, ["n", "alpha"]);
}

#[test]
fn missing_expansion_dir_exits_two() {
    let t = tempfile::tempdir().unwrap();
    write(t.path(), "c.toml", "alpha_end = 1.2\n");
    let o = run(&["continue", "--preset", "shear-branch", "--config", "c.toml", "--out", "br"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    let o = run(&["classify", "--branch", "br", "--expansion", "nowhere", "--out", "cl"], t.path());
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
}

#[test]
fn shear_pipeline_reports_the_ratio_columns_and_scenario() {
    let t = tempfile::tempdir().unwrap();
    let p = ["--preset", "shear-branch"];
    let o = run(&[&["continue"][..], &p, &["--out", "br"]].concat(), t.path());
    assert!(o.status.success(), "{}", text(&o));
    let o = run(&[&["expand"][..], &p, &["--branch", "br", "--out", "ex"]].concat(), t.path());
    assert!(o.status.success(), "{}", text(&o));
    let (h, rows) = read_csv(&t.path().join("ex/gamma.csv"));
    assert_eq!(h, ["n", "alpha", "gamma1", "gamma2"]);
    assert!(rows.len() > 300);
    let o = run(&[&["classify"][..], &p, &["--branch", "br", "--expansion", "ex", "--out", "cl"]].concat(), t.path());
    assert!(o.status.success(), "{}", text(&o));
    let (h, rows) = read_csv(&t.path().join("cl/ratios.csv"));
    assert_eq!(
        h,
        [
            "n",
            "alpha",
            "sigma_1/sigma_0_1",
            "sigma_1/sigma_0_2",
            "sigma_1_1/sigma_0_2",
            "sigma_2/sigma_1_1",
            "sigma_1_2/sigma_2"
        ]
    );
    // sigma_1 / sigma_0_1 = 1 / alpha exactly.
    for r in &rows {
        assert!((r[2] * r[1] - 1.0).abs() <= 1e-12);
    }
    let rep = fs::read_to_string(t.path().join("cl/case_report.txt")).unwrap();
    assert!(rep.contains("scenario = nonzero-limit (c)"), "{rep}");
    assert!(rep.contains("policy slope_threshold = 0.1"));
    assert!(!rep.contains("VIOLATED"));
}

#[test]
fn coupled_preset_writes_balanced_plan_and_evaluation() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["construct", "--preset", "coupled-plan", "--out", "pl"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("case = coupled"));
    let (h, rows) = read_csv(&t.path().join("pl/plan/balance.csv"));
    assert_eq!(h, ["m", "residual", "norm_w", "norm_h"]);
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r[1] <= 1e-10));
    // |w_m| <= M D0^m with M = 1, D0 = 2, for the generated terms m >= 1.
    assert!(rows[1..].iter().all(|r| r[2] <= 2f64.powi(r[0] as i32) * (1.0 + 1e-12)));
    let (h, rows) = read_csv(&t.path().join("pl/evaluation.csv"));
    assert_eq!(h, ["n", "alpha", "residual", "tail_bound", "measured_tail"]);
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[4] <= r[3]));
}

#[test]
fn decoupled_preset_detects_its_case() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["construct", "--preset", "decoupled-plan", "--out", "pl"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("case = decoupled"));
    let plan = fs::read_to_string(t.path().join("pl/plan/plan.txt")).unwrap();
    assert!(plan.contains("case = decoupled"));
}

#[test]
fn vanishing_preset_hits_the_requested_norm() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["construct", "--preset", "vanishing-limit", "--out", "vp"], t.path());
    assert!(o.status.success(), "{}", text(&o));
    let g: Field = load_field(&t.path().join("vp/g.sf")).unwrap();
    let target = std::f64::consts::PI * (10.0 * std::f64::consts::PI).sqrt();
    assert!((g.h_norm() - target).abs() <= 1e-12 * target, "{}", g.h_norm());
    let (_, rows) = read_csv(&t.path().join("vp/pair.csv"));
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r[4] <= 1e-11 * (1.0 + r[3])));
    // States shrink like alpha^{-1/2}.
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
}

#[test]
fn nonvanishing_base_nonlinearity_exits_two() {
    let t = tempfile::tempdir().unwrap();
    write(
        t.path(),
        "c.toml",
        "w0_coeffs = [[1, 0, 0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0], [0, 1, 0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0], [0, 0, 1, 0.3, 0.0, 0.0, 0.2, 0.0, 0.0]]\n",
    );
    let o = run(&["construct", "--config", "c.toml", "--out", "pl"], t.path());
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("B(w0, w0) must vanish"), "{}", text(&o));
}

#[test]
fn same_seed_gives_identical_outputs() {
    let t = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = run(&["construct", "--preset", "coupled-plan", "--seed", "9", "--out", out], t.path());
        assert!(o.status.success(), "{}", text(&o));
    }
    assert_eq!(dir_bytes(&t.path().join("a")), dir_bytes(&t.path().join("b")));
    write(t.path(), "c.toml", "alpha_end = 1.3\n");
    for out in ["c", "d"] {
        let o = run(&["continue", "--preset", "shear-branch", "--config", "c.toml", "--out", out], t.path());
        assert!(o.status.success(), "{}", text(&o));
    }
    assert_eq!(dir_bytes(&t.path().join("c")), dir_bytes(&t.path().join("d")));
}

#[test]
fn seed_flag_changes_the_random_field() {
    let t = tempfile::tempdir().unwrap();
    for (seed, out) in [("1", "a"), ("2", "b")] {
        let o = run(&["construct", "--preset", "vanishing-limit", "--seed", seed, "--out", out], t.path());
        assert!(o.status.success(), "{}", text(&o));
    }
    let a = fs::read(t.path().join("a/w1.sf")).unwrap();
    let b = fs::read(t.path().join("b/w1.sf")).unwrap();
    assert_ne!(a, b);
}
