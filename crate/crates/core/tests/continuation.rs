use nsgalerkin::benchmark::ShearBenchmark;
use nsgalerkin::solver::{continue_branch, io, ContinuationOptions, Spacing};
use nsgalerkin::spectral::SpectralField;
use nsgalerkin::{Field, ModeSet, WaveVector};
use num_complex::Complex;

#[test]
fn short_range_gives_two_clean_states() {
    let b = ShearBenchmark::<f64>::standard().unwrap();
    let mut opts = ContinuationOptions::default();
    opts.policy.spacing = Spacing::Geometric { ratio: 2.0 };
    let run = continue_branch(&b.force, 1.0, 1.0 + 1e-3, &b.start, &opts).unwrap();
    assert_eq!(run.states.len(), 2);
    assert!(run.is_complete());
    for s in &run.states {
        assert!(s.residual <= opts.newton.tol);
    }
}

#[test]
fn single_pair_force_keeps_states_below_the_force() {
    let m = ModeSet::ball(3, 4.0).unwrap();
    let g = Field::single(&m, WaveVector::new(1, 1, 0), [Complex::new(1.0, 0.5), Complex::new(-1.0, -0.5), Complex::new(0.0, 2.0)]).unwrap();
    let mut opts = ContinuationOptions::default();
    opts.policy.spacing = Spacing::Geometric { ratio: 1.5 };
    let run = continue_branch(&g, 0.1, 1e3, &SpectralField::zeros(&m), &opts).unwrap();
    assert!(run.is_complete());
    for s in &run.states {
        assert!(s.v.h_norm() <= g.h_norm() * (1.0 + 1e-8));
    }
}

#[test]
fn branch_norm_decreases_after_the_transient() {
    let b = ShearBenchmark::<f64>::standard().unwrap();
    let mut opts = ContinuationOptions::default();
    opts.policy.spacing = Spacing::Geometric { ratio: 1.2 };
    let run = continue_branch(&b.force, 1.0, 2e5, &b.start, &opts).unwrap();
    assert!(run.is_complete());
    let z: Vec<f64> = run.states.iter().map(|s| s.v.z_norm()).collect();
    let tail = &z[z.len() / 2..];
    assert!(tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)), "{tail:?}");
}

#[test]
fn replay_is_byte_identical() {
    let b = ShearBenchmark::<f64>::standard().unwrap();
    let mut opts = ContinuationOptions::default();
    opts.policy.spacing = Spacing::Geometric { ratio: 1.5 };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let run = continue_branch(&b.force, 1.0, 100.0, &b.start, &opts).unwrap();
        io::write_branch(&run, d.path(), true).unwrap();
    }
    for name in ["branch.csv", &io::state_file_name(3)] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let c = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, c, "{name}");
    }
}
