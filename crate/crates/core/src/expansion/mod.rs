//! Strict unitary expansions `v_n = v + sum_j Gamma_{j,n} w_j` of a finite
//! sequence of fields, extracted level by level from normalised remainders.

mod build;
mod extract;
pub mod io;
mod verify;

pub use build::{convert_pre_unitary, synthesize_sequence};
pub use extract::{extract_expansion, ExpansionOptions, LimitPolicy};
pub use verify::{verify_expansion, LevelCheck, VerifyReport};

use crate::spectral::SpectralField;
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionKind {
    /// The sequence equals its limit.
    Trivial,
    /// Directions stagnate exactly at the given depth.
    Finite(usize),
    /// Extraction stopped at the given depth without stagnation.
    Truncated(usize),
}

impl ExpansionKind {
    pub fn depth(&self) -> usize {
        match *self {
            ExpansionKind::Trivial => 0,
            ExpansionKind::Finite(k) | ExpansionKind::Truncated(k) => k,
        }
    }
}

impl std::fmt::Display for ExpansionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExpansionKind::Trivial => write!(f, "trivial"),
            ExpansionKind::Finite(k) => write!(f, "finite({k})"),
            ExpansionKind::Truncated(k) => write!(f, "truncated({k})"),
        }
    }
}

/// One level `k` of an expansion.
#[derive(Clone, Debug)]
pub struct ExpansionLevel<T> {
    /// `w_k`.
    pub direction: SpectralField<T>,
    /// Sequence positions `n` carried at this level, increasing.
    pub indices: Vec<usize>,
    /// `Gamma_{k,n}` aligned with `indices`.
    pub gamma: Vec<T>,
    /// `gamma_n^{(k)} = Gamma_{k,n} / Gamma_{k-1,n}`.
    pub ratio: Vec<T>,
    /// `w_n^{(k)}`; empty when the expansion was read back from disk.
    pub remainders: Vec<SpectralField<T>>,
    /// `||w_n^{(k)} - w_k||_Z`; empty when unknown.
    pub distances: Vec<T>,
    /// Position whose remainder was taken as `w_k`, if any.
    pub proxy: Option<usize>,
}

impl<T: Scalar> ExpansionLevel<T> {
    pub fn gamma_at(&self, n: usize) -> Option<T> {
        self.indices.binary_search(&n).ok().map(|i| self.gamma[i])
    }
}

#[derive(Clone, Debug)]
pub struct UnitaryExpansion<T> {
    pub limit: SpectralField<T>,
    /// Position of the sequence element used as the limit, if any.
    pub limit_index: Option<usize>,
    pub levels: Vec<ExpansionLevel<T>>,
    pub kind: ExpansionKind,
    /// Whether every remainder `w_n^{(k)}` has unit norm.
    pub strict: bool,
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> UnitaryExpansion<T> {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.kind == ExpansionKind::Trivial
    }

    /// `w_k` for `k >= 1`.
    pub fn direction(&self, k: usize) -> Option<&SpectralField<T>> {
        k.checked_sub(1).and_then(|i| self.levels.get(i)).map(|l| &l.direction)
    }

    /// Positions carried by every level up to `k` (the level-`k` indices).
    pub fn indices_through(&self, k: usize) -> Vec<usize> {
        match k {
            0 => self.levels.first().map(|l| l.indices.clone()).unwrap_or_default(),
            _ => self.levels[k.min(self.levels.len()) - 1].indices.clone(),
        }
    }

    /// Rectangular `Gamma` table over the level-1 positions (plus the level-1
    /// proxy). Entries missing at deeper levels are filled from the remainder
    /// `v_n - v - sum_{j<k} Gamma_{j,n} w_j` when it is nonzero and by the
    /// padding `Gamma_{k,n} = 2^{-(n+1) k} Gamma_{k-1,n}` otherwise.
    pub fn gamma_table(&self, seq: &[SpectralField<T>]) -> (Vec<usize>, Vec<Vec<T>>) {
        let Some(first) = self.levels.first() else {
            return (Vec::new(), Vec::new());
        };
        let mut rows: Vec<usize> = first.indices.clone();
        rows.extend(first.proxy);
        rows.sort_unstable();
        let mut table = Vec::with_capacity(rows.len());
        for &n in &rows {
            let mut row: Vec<T> = Vec::with_capacity(self.levels.len());
            let mut z = &seq[n] - &self.limit;
            let mut padded = false;
            for (k, level) in self.levels.iter().enumerate() {
                // A proxy's remainder vanishes at the next level by construction.
                padded |= k > 0 && self.levels[k - 1].proxy == Some(n);
                let g = match level.gamma_at(n) {
                    Some(g) if !padded => g,
                    _ if !padded && z.z_norm() > T::zero() => z.z_norm(),
                    _ => {
                        padded = true;
                        let pad = T::lit(2.0).powi(-(((n + 1) * (k + 1)) as i32));
                        (pad * row[k - 1]).max(T::min_positive_value())
                    }
                };
                z.axpy(-g, &level.direction);
                row.push(g);
            }
            table.push(row);
        }
        (rows, table)
    }
}
