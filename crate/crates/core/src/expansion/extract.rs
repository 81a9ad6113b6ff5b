use super::{ExpansionKind, ExpansionLevel, UnitaryExpansion};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::Scalar;

/// Where the limit `v` and the directions `w_k` come from.
#[derive(Clone, Debug)]
pub enum LimitPolicy<T> {
    /// Final element as the limit; at each level the last carried remainder
    /// is the direction and is then dropped.
    LastElement,
    /// Known limit; directions still taken from the last remainder.
    Given(SpectralField<T>),
    /// Known limit and known directions.
    Exact {
        limit: SpectralField<T>,
        directions: Vec<SpectralField<T>>,
    },
}

#[derive(Clone, Debug)]
pub struct ExpansionOptions<T> {
    pub depth_max: usize,
    pub limit: LimitPolicy<T>,
    /// Below this `||v_n - v||_Z` for every `n` the expansion is trivial.
    pub trivial_threshold: T,
    /// Distances `||w_n^{(k)} - w_k||_Z` below this over the last quarter
    /// of the level count as stagnation.
    pub stagnation_tol: T,
    /// Fraction of trailing indices ignored by the trend test.
    pub tail_fraction: f64,
    /// Largest distance over the later half of the trend window must fall
    /// below this multiple of the largest over the earlier half.
    pub trend_factor: f64,
    /// Explicit subsequence of positions to use.
    pub subset: Option<Vec<usize>>,
}

impl<T: Scalar> ExpansionOptions<T> {
    pub fn new(depth_max: usize) -> Self {
        ExpansionOptions {
            depth_max,
            limit: LimitPolicy::LastElement,
            trivial_threshold: T::lit(1e-13),
            stagnation_tol: T::lit(1e-12),
            tail_fraction: 0.05,
            trend_factor: 0.9,
            subset: None,
        }
    }

    pub fn with_limit(mut self, limit: LimitPolicy<T>) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_subset(mut self, subset: Vec<usize>) -> Self {
        self.subset = Some(subset);
        self
    }
}

fn has_trend<T: Scalar>(d: &[T], opts: &ExpansionOptions<T>) -> bool {
    let keep = d.len() - ((d.len() as f64) * opts.tail_fraction).floor() as usize;
    let w = &d[..keep];
    if w.len() < 4 {
        return true;
    }
    let (a, b) = w.split_at(w.len() / 2);
    let max = |s: &[T]| s.iter().copied().fold(T::zero(), T::max);
    let (ma, mb) = (max(a), max(b));
    mb <= opts.stagnation_tol || mb <= T::lit(opts.trend_factor) * ma
}

fn stagnates<T: Scalar>(d: &[T], tol: T) -> bool {
    let q = d.len().div_ceil(4).max(1);
    !d.is_empty() && d[d.len() - q..].iter().all(|&x| x < tol)
}

/// Level-by-level extraction following the constructive proof of the
/// expansion lemma: `gamma_n^{(k)} = ||w_n^{(k-1)} - w_{k-1}||`,
/// `w_n^{(k)} = (w_n^{(k-1)} - w_{k-1}) / gamma_n^{(k)}`.
pub fn extract_expansion<T: Scalar>(
    seq: &[SpectralField<T>],
    opts: &ExpansionOptions<T>,
) -> Result<UnitaryExpansion<T>> {
    if seq.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    if seq.len() < 3 * opts.depth_max {
        return Err(Error::InvalidInput(format!(
            "need at least {} elements for depth {}, got {}",
            3 * opts.depth_max,
            opts.depth_max,
            seq.len()
        )));
    }
    for s in seq {
        s.ensure_same_modes(&seq[0])?;
    }
    let positions: Vec<usize> = match &opts.subset {
        Some(s) => {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&i| i >= seq.len()) {
                return Err(Error::InvalidInput("subset must be increasing positions inside the sequence".into()));
            }
            s.clone()
        }
        None => (0..seq.len()).collect(),
    };
    let (limit, limit_index, mut carried, exact_dirs) = match &opts.limit {
        LimitPolicy::LastElement => {
            let last = *positions.last().expect("nonempty");
            (seq[last].clone(), Some(last), positions[..positions.len() - 1].to_vec(), None)
        }
        LimitPolicy::Given(v) => (v.clone(), None, positions, None),
        LimitPolicy::Exact { limit, directions } => (limit.clone(), None, positions, Some(directions)),
    };
    limit.ensure_same_modes(&seq[0])?;
    let mut exp = UnitaryExpansion {
        limit,
        limit_index,
        levels: Vec::new(),
        kind: ExpansionKind::Trivial,
        strict: true,
        diagnostics: Vec::new(),
    };
    let diffs: Vec<SpectralField<T>> = carried.iter().map(|&n| &seq[n] - &exp.limit).collect();
    if diffs.iter().all(|z| z.z_norm() < opts.trivial_threshold) {
        return Ok(exp);
    }
    exp.kind = ExpansionKind::Truncated(0);

    // Level 0 state: w_n^{(0)} = v_n - v with Gamma_{0,n} = 1 and w_0 = 0.
    let mut rem = diffs;
    let mut gam: Vec<T> = vec![T::one(); carried.len()];
    let mut prev_dir = SpectralField::zeros(exp.limit.modes());

    for k in 1..=opts.depth_max {
        let mut indices = Vec::new();
        let mut gamma = Vec::new();
        let mut ratio = Vec::new();
        let mut remainders = Vec::new();
        for ((&n, r), &g_prev) in carried.iter().zip(&rem).zip(&gam) {
            let z = r - &prev_dir;
            let g = z.z_norm();
            if g > T::zero() {
                indices.push(n);
                ratio.push(g);
                gamma.push(g_prev * g);
                remainders.push(z.scaled(T::one() / g));
            } else {
                exp.diagnostics.push(format!("level {k}: remainder vanished at n = {n}, index dropped"));
            }
        }
        let (direction, proxy) = match exact_dirs.and_then(|d| d.get(k - 1)) {
            Some(w) => (w.clone(), None),
            None => {
                if indices.len() < 2 {
                    exp.diagnostics.push(format!("level {k}: too few indices left"));
                    break;
                }
                let w = remainders.pop().expect("nonempty");
                gamma.pop();
                ratio.pop();
                (w, indices.pop())
            }
        };
        direction.ensure_same_modes(&exp.limit)?;
        let distances: Vec<T> = remainders.iter().map(|r| (r - &direction).z_norm()).collect();
        if stagnates(&distances, opts.stagnation_tol) {
            exp.kind = ExpansionKind::Finite(k);
        } else if !has_trend(&distances, opts) {
            exp.diagnostics.push(format!(
                "level {k}: no convergent subsequence at this depth, subsequence selection required"
            ));
            break;
        } else {
            exp.kind = ExpansionKind::Truncated(k);
        }
        carried = indices.clone();
        rem = remainders.clone();
        gam = gamma.clone();
        prev_dir = direction.clone();
        exp.levels.push(ExpansionLevel {
            direction,
            indices,
            gamma,
            ratio,
            remainders,
            distances,
            proxy,
        });
        if matches!(exp.kind, ExpansionKind::Finite(_)) {
            break;
        }
    }
    Ok(exp)
}
