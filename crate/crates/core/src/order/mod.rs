//! Asymptotic ordering of the coefficient sequences of an expansion and the
//! algebraic limit relations each ordering implies.

mod cases;
mod compare;
pub mod io;
mod ordinal;
mod table;

pub use cases::{classify_case, classify_perturbed_case, CasePolicy, CaseReport, Scenario};
pub use compare::{compare, fit_line, trend_window, ComparePolicy, Verdict};
pub use ordinal::{ordinal_assign, BoundCheck, OrderReport};
pub use table::{build_sigma_table, totalize, totalize_signed, SignClass, SigmaTable, Totalized};

use std::fmt;

/// Name of a sequence in the coefficient array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SigmaLabel {
    /// The constant sequence `1`.
    Sigma0,
    /// `Gamma_{k,n}`.
    Sigma(usize),
    /// `alpha_n`.
    Alpha,
    /// `alpha_n Gamma_{k,n}`.
    AlphaGamma(usize),
    /// `alpha_n Gamma_{j,n} Gamma_{k,n}` with `j <= k`.
    Pair(usize, usize),
    /// Force coefficients `H_{k,n}`.
    Beta(usize),
    /// `|chi_n|` after a sign split.
    Chi,
    Custom(String),
}

impl SigmaLabel {
    /// Member of the coefficient array proper (not a force level, `chi`
    /// or custom sequence).
    pub fn in_array(&self) -> bool {
        matches!(
            self,
            SigmaLabel::Sigma0 | SigmaLabel::Sigma(_) | SigmaLabel::Alpha | SigmaLabel::AlphaGamma(_) | SigmaLabel::Pair(..)
        )
    }

    pub fn parse(s: &str) -> Option<SigmaLabel> {
        let parts: Vec<&str> = s.split('_').collect();
        let num = |i: usize| parts.get(i).and_then(|p| p.parse::<usize>().ok());
        match (parts.first().copied(), parts.len()) {
            (Some("chi"), 1) => Some(SigmaLabel::Chi),
            (Some("beta"), 2) => num(1).map(SigmaLabel::Beta),
            (Some("sigma"), 2) => match num(1)? {
                0 => Some(SigmaLabel::Sigma0),
                k => Some(SigmaLabel::Sigma(k)),
            },
            (Some("sigma"), 3) => match (num(1)?, num(2)?) {
                (0, 0) => Some(SigmaLabel::Alpha),
                (0, k) => Some(SigmaLabel::AlphaGamma(k)),
                (j, k) if j <= k => Some(SigmaLabel::Pair(j, k)),
                _ => None,
            },
            _ => Some(SigmaLabel::Custom(s.to_string())),
        }
    }
}

impl fmt::Display for SigmaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaLabel::Sigma0 => write!(f, "sigma_0"),
            SigmaLabel::Sigma(k) => write!(f, "sigma_{k}"),
            SigmaLabel::Alpha => write!(f, "sigma_0_0"),
            SigmaLabel::AlphaGamma(k) => write!(f, "sigma_0_{k}"),
            SigmaLabel::Pair(j, k) => write!(f, "sigma_{j}_{k}"),
            SigmaLabel::Beta(k) => write!(f, "beta_{k}"),
            SigmaLabel::Chi => write!(f, "chi"),
            SigmaLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// A positive sequence over the retained positions of a table.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSequence {
    pub label: SigmaLabel,
    pub values: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip_through_names() {
        let all = [
            SigmaLabel::Sigma0,
            SigmaLabel::Sigma(2),
            SigmaLabel::Alpha,
            SigmaLabel::AlphaGamma(1),
            SigmaLabel::Pair(1, 2),
            SigmaLabel::Beta(1),
            SigmaLabel::Chi,
        ];
        for l in all {
            assert_eq!(SigmaLabel::parse(&l.to_string()), Some(l));
        }
    }
}
