use super::UnitaryExpansion;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::Scalar;

/// Checks for one level `k`.
#[derive(Clone, Debug)]
pub struct LevelCheck {
    pub level: usize,
    /// Largest `||v_n - v - sum_{j<k} Gamma_j w_j - Gamma_k w_n^{(k)}||_Z`
    /// relative to `max(1, ||v_n||_Z)`; `NaN` without stored remainders.
    pub reconstruction_error: f64,
    /// Largest deviation of `||w_k||_Z` and `||w_n^{(k)}||_Z` from one.
    pub unit_error: f64,
    /// Largest `|Gamma_{k,n} - Gamma'_{k,n}|` where `Gamma'` is recomputed
    /// from `||v_n - v - sum_{j<k} Gamma'_j w_j||_Z`.
    pub gamma_mismatch: f64,
    /// Whether the recomputed coefficients and unit norms agree.
    pub unique: bool,
    /// Mean of `||w_n^{(k)} - w_k||` over the first and last thirds.
    pub direction_trend: (f64, f64),
    /// Mean of `gamma_n^{(k)}` (for `k = 1` of `Gamma_1`) over the first and
    /// last thirds.
    pub gamma_trend: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub levels: Vec<LevelCheck>,
    /// First level failing the uniqueness check.
    pub first_failure: Option<usize>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn thirds<T: Scalar>(x: &[T]) -> (f64, f64) {
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let t = x.len().div_ceil(3);
    let mean = |s: &[T]| s.iter().map(|v| v.as_f64()).sum::<f64>() / s.len() as f64;
    (mean(&x[..t]), mean(&x[x.len() - t..]))
}

/// Re-derives every coefficient from the sequence by the uniqueness
/// recursion and compares with the stored expansion.
pub fn verify_expansion<T: Scalar>(exp: &UnitaryExpansion<T>, seq: &[SpectralField<T>]) -> Result<VerifyReport> {
    let eps = T::epsilon().as_f64();
    let mut report = VerifyReport {
        levels: Vec::new(),
        first_failure: None,
    };
    for (k0, level) in exp.levels.iter().enumerate() {
        let k = k0 + 1;
        let mut recon = 0.0f64;
        let mut unit = (level.direction.z_norm().as_f64() - 1.0).abs();
        let mut mismatch = 0.0f64;
        let mut unique = true;
        for (i, &n) in level.indices.iter().enumerate() {
            let vn = seq
                .get(n)
                .ok_or_else(|| Error::InvalidInput(format!("sequence has no element {n}")))?;
            let scale = vn.z_norm().as_f64().max(exp.limit.z_norm().as_f64()).max(1.0);
            let mut z = vn - &exp.limit;
            let mut stored = vn - &exp.limit;
            for prev in &exp.levels[..k0] {
                let g_re = z.z_norm();
                z.axpy(-g_re, &prev.direction);
                let g_st = prev.gamma_at(n).unwrap_or(T::zero());
                stored.axpy(-g_st, &prev.direction);
            }
            let g_re = z.z_norm().as_f64();
            let g = level.gamma[i].as_f64();
            let diff = (g - g_re).abs();
            mismatch = mismatch.max(diff);
            if diff > 1e-10 * g + 1e3 * eps * scale {
                unique = false;
            }
            if let Some(r) = level.remainders.get(i) {
                if exp.strict {
                    unit = unit.max((r.z_norm().as_f64() - 1.0).abs());
                }
                stored.axpy(-level.gamma[i], r);
                recon = recon.max(stored.z_norm().as_f64() / scale);
            } else {
                recon = f64::NAN;
            }
        }
        if unit > 1e-12 {
            unique = false;
        }
        if !unique && report.first_failure.is_none() {
            report.first_failure = Some(k);
        }
        let gamma_trend = if k == 1 { thirds(&level.gamma) } else { thirds(&level.ratio) };
        report.levels.push(LevelCheck {
            level: k,
            reconstruction_error: recon,
            unit_error: unit,
            gamma_mismatch: mismatch,
            unique,
            direction_trend: thirds(&level.distances),
            gamma_trend,
        });
    }
    Ok(report)
}
