//! Grid-based reference for the nonlinear term: sample on a uniform grid,
//! differentiate mode by mode, multiply pointwise, transform back with a
//! plain DFT, then project.
#![allow(dead_code)]

use nsgalerkin::spectral::{czero, project_vec, CVec};
use nsgalerkin::{Field, ModeSet};
use num_complex::Complex;

fn grid_points(dim: usize, n: usize) -> Vec<[f64; 3]> {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let zn = if dim == 3 { n } else { 1 };
    let mut pts = Vec::with_capacity(n * n * zn);
    for a in 0..n {
        for b in 0..n {
            for c in 0..zn {
                pts.push([a as f64 * h, b as f64 * h, c as f64 * h]);
            }
        }
    }
    pts
}

/// Value and gradient `d_j u_i` at `x`, summing both members of each pair.
fn value_and_gradient(u: &Field, x: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut val = [0.0; 3];
    let mut grad = [[0.0; 3]; 3];
    for (k, c) in u.modes().modes().iter().zip(u.coeffs()) {
        let kk = k.0.map(|v| v as f64);
        let ph = kk[0] * x[0] + kk[1] * x[1] + kk[2] * x[2];
        let e = Complex::new(ph.cos(), ph.sin());
        for i in 0..3 {
            let t = c[i] * e;
            val[i] += 2.0 * t.re;
            for j in 0..3 {
                // 2 Re(i k_j c e^{ikx})
                grad[i][j] += -2.0 * kk[j] * t.im;
            }
        }
    }
    (val, grad)
}

/// `P((u . grad) v)` restricted to the mode set of `u`.
pub fn physical_bilinear(u: &Field, v: &Field, n: usize) -> Field {
    let modes: &ModeSet = u.modes();
    let dim = modes.dim();
    let pts = grid_points(dim, n);
    let prod: Vec<[f64; 3]> = pts
        .iter()
        .map(|x| {
            let (uu, _) = value_and_gradient(u, x);
            let (_, gv) = value_and_gradient(v, x);
            let mut p = [0.0; 3];
            for i in 0..3 {
                p[i] = (0..3).map(|j| uu[j] * gv[i][j]).sum();
            }
            p
        })
        .collect();
    let npts = pts.len() as f64;
    Field::from_fn(modes, |k| {
        let kk = k.0.map(|v| v as f64);
        let mut c: CVec<f64> = czero();
        for (x, p) in pts.iter().zip(&prod) {
            let ph = kk[0] * x[0] + kk[1] * x[1] + kk[2] * x[2];
            let e = Complex::new(ph.cos(), -ph.sin());
            for i in 0..3 {
                c[i] += e * p[i];
            }
        }
        let c = c.map(|z| z / npts);
        project_vec(&kk, &c)
    })
}

/// Grid size resolving products of fields with `|k|^2 <= lambda` exactly.
pub fn oracle_grid(lambda: f64) -> usize {
    let kmax = lambda.sqrt().floor() as usize;
    (3 * kmax + 1).next_power_of_two().max(8)
}
