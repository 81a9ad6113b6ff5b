use super::{ExpansionKind, ExpansionLevel, UnitaryExpansion};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::Scalar;

fn check_decay<T: Scalar>(coeffs: &[&[T]]) -> Result<()> {
    let n = match coeffs.first() {
        Some(c) => c.len(),
        None => return Ok(()),
    };
    if n < 2 {
        return Ok(());
    }
    let first = coeffs[0];
    if first[n - 1].abs() >= first[0].abs() {
        return Err(Error::InvalidInput("leading coefficients do not decay".into()));
    }
    for (k, pair) in coeffs.windows(2).enumerate() {
        let r0 = (pair[1][0] / pair[0][0]).abs();
        let r1 = (pair[1][n - 1] / pair[0][n - 1]).abs();
        if !(r1 < r0) {
            return Err(Error::InvalidInput(format!(
                "coefficient ratio of levels {} and {} does not decay",
                k + 2,
                k + 1
            )));
        }
    }
    Ok(())
}

/// `v_n = v + sum_k c_{k,n} u_k` for `n < len`. Coefficients may be signed;
/// their magnitudes must decay and so must the ratios of consecutive levels.
pub fn synthesize_sequence<T: Scalar>(
    v: &SpectralField<T>,
    terms: &[(Vec<T>, SpectralField<T>)],
    len: usize,
) -> Result<Vec<SpectralField<T>>> {
    for (c, u) in terms {
        if c.len() != len {
            return Err(Error::InvalidInput(format!("coefficient array of length {} for {len} elements", c.len())));
        }
        u.ensure_same_modes(v)?;
        if c.iter().any(|x| *x == T::zero()) {
            return Err(Error::InvalidInput("zero coefficient".into()));
        }
    }
    let arrays: Vec<&[T]> = terms.iter().map(|(c, _)| c.as_slice()).collect();
    check_decay(&arrays)?;
    Ok((0..len)
        .map(|n| {
            let mut x = v.clone();
            for (c, u) in terms {
                x.axpy(c[n], u);
            }
            x
        })
        .collect())
}

/// Rescales a pre-unitary expansion `v + sum_k Gamma_{k,n} w_k` (nonzero,
/// not necessarily unit `w_k`) to unit directions:
/// `w_k / ||w_k||_Z` with coefficients `||w_k||_Z Gamma_{k,n}`.
pub fn convert_pre_unitary<T: Scalar>(
    v: &SpectralField<T>,
    terms: &[(Vec<T>, SpectralField<T>)],
    indices: &[usize],
) -> Result<UnitaryExpansion<T>> {
    let mut levels = Vec::with_capacity(terms.len());
    let mut hats: Vec<(Vec<T>, SpectralField<T>)> = Vec::with_capacity(terms.len());
    for (k, (gamma, w)) in terms.iter().enumerate() {
        w.ensure_same_modes(v)?;
        if gamma.len() != indices.len() {
            return Err(Error::InvalidInput(format!("level {}: {} coefficients for {} indices", k + 1, gamma.len(), indices.len())));
        }
        if gamma.iter().any(|g| !(*g > T::zero())) {
            return Err(Error::InvalidInput(format!("level {}: coefficients must be positive", k + 1)));
        }
        let c = w.z_norm();
        if c == T::zero() {
            return Err(Error::InvalidInput(format!("level {}: zero direction", k + 1)));
        }
        hats.push((gamma.iter().map(|&g| g * c).collect(), w.scaled(T::one() / c)));
    }
    let arrays: Vec<&[T]> = hats.iter().map(|(g, _)| g.as_slice()).collect();
    check_decay(&arrays)?;
    for k in 0..hats.len() {
        let (gamma, dir) = &hats[k];
        let remainders: Vec<SpectralField<T>> = (0..indices.len())
            .map(|i| {
                let mut r = dir.clone();
                for (g, w) in &hats[k + 1..] {
                    r.axpy(g[i] / gamma[i], w);
                }
                r
            })
            .collect();
        let ratio = (0..indices.len())
            .map(|i| if k == 0 { gamma[i] } else { gamma[i] / hats[k - 1].0[i] })
            .collect();
        let distances = remainders.iter().map(|r| (r - dir).z_norm()).collect();
        levels.push(ExpansionLevel {
            direction: dir.clone(),
            indices: indices.to_vec(),
            gamma: gamma.clone(),
            ratio,
            remainders,
            distances,
            proxy: None,
        });
    }
    let kind = if levels.is_empty() {
        ExpansionKind::Trivial
    } else {
        ExpansionKind::Finite(levels.len())
    };
    Ok(UnitaryExpansion {
        limit: v.clone(),
        limit_index: None,
        levels,
        kind,
        strict: false,
        diagnostics: Vec::new(),
    })
}
