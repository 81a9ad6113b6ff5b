use super::compare::{compare, ComparePolicy, Verdict};
use super::{SigmaLabel, SigmaSequence};
use crate::error::{Error, Result};
use crate::expansion::UnitaryExpansion;
use crate::Scalar;

/// Sequences over common retained positions with all pairwise verdicts.
#[derive(Clone, Debug)]
pub struct SigmaTable {
    /// Sequence positions `n`, increasing.
    pub indices: Vec<usize>,
    pub alphas: Vec<f64>,
    pub sequences: Vec<SigmaSequence>,
    /// `verdicts[i][j]` relates sequence `i` to sequence `j`.
    pub verdicts: Vec<Vec<Verdict>>,
    pub policy: ComparePolicy,
    pub notes: Vec<String>,
}

impl SigmaTable {
    pub fn new(indices: Vec<usize>, alphas: Vec<f64>, sequences: Vec<SigmaSequence>, policy: ComparePolicy) -> Result<Self> {
        if alphas.len() != indices.len() || sequences.iter().any(|s| s.values.len() != indices.len()) {
            return Err(Error::InvalidInput("sequences not aligned with indices".into()));
        }
        if let Some(s) = sequences.iter().find(|s| s.values.iter().any(|v| !(*v > 0.0))) {
            return Err(Error::InvalidInput(format!("{} has nonpositive entries", s.label)));
        }
        let mut t = SigmaTable {
            indices,
            alphas,
            sequences,
            verdicts: Vec::new(),
            policy,
            notes: Vec::new(),
        };
        t.recompute();
        Ok(t)
    }

    fn recompute(&mut self) {
        let m = self.sequences.len();
        let mut v = vec![vec![Verdict::Equiv(1.0); m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let r = compare(&self.sequences[i].values, &self.sequences[j].values, &self.alphas, &self.policy);
                v[i][j] = r;
                v[j][i] = r.flip();
            }
        }
        self.verdicts = v;
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, label: &SigmaLabel) -> Option<usize> {
        self.sequences.iter().position(|s| &s.label == label)
    }

    pub fn values(&self, label: &SigmaLabel) -> Option<&[f64]> {
        self.position(label).map(|i| self.sequences[i].values.as_slice())
    }

    /// Verdict of `a` against `b`, `None` if either is absent.
    pub fn verdict(&self, a: &SigmaLabel, b: &SigmaLabel) -> Option<Verdict> {
        Some(self.verdicts[self.position(a)?][self.position(b)?])
    }

    pub fn undecided_pairs(&self) -> Vec<(SigmaLabel, SigmaLabel)> {
        let m = self.sequences.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if !self.verdicts[i][j].is_decided() {
                    out.push((self.sequences[i].label.clone(), self.sequences[j].label.clone()));
                }
            }
        }
        out
    }

    pub fn is_decided(&self) -> bool {
        self.undecided_pairs().is_empty()
    }

    /// Table restricted to the rows where `keep` holds.
    pub fn restrict(&self, keep: &[bool]) -> SigmaTable {
        let pick = |v: &[f64]| v.iter().zip(keep).filter(|(_, k)| **k).map(|(x, _)| *x).collect::<Vec<_>>();
        let mut t = SigmaTable {
            indices: self.indices.iter().zip(keep).filter(|(_, k)| **k).map(|(x, _)| *x).collect(),
            alphas: pick(&self.alphas),
            sequences: self
                .sequences
                .iter()
                .map(|s| SigmaSequence {
                    label: s.label.clone(),
                    values: pick(&s.values),
                })
                .collect(),
            verdicts: Vec::new(),
            policy: self.policy,
            notes: self.notes.clone(),
        };
        t.recompute();
        t
    }

    pub fn with_sequence(mut self, seq: SigmaSequence) -> Result<SigmaTable> {
        if seq.values.len() != self.len() || seq.values.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidInput(format!("{} is not a positive aligned sequence", seq.label)));
        }
        self.sequences.retain(|s| s.label != seq.label);
        self.sequences.push(seq);
        self.recompute();
        Ok(self)
    }
}

/// Coefficient array up to level `k_max`, with force levels `beta_k` when a
/// force expansion is given. `alphas[n]` belongs to sequence position `n`.
pub fn build_sigma_table<T: Scalar>(
    exp: &UnitaryExpansion<T>,
    alphas: &[f64],
    k_max: usize,
    force_exp: Option<&UnitaryExpansion<T>>,
    policy: &ComparePolicy,
) -> Result<SigmaTable> {
    let mut notes = Vec::new();
    let k = k_max.min(exp.depth());
    if k < k_max {
        notes.push(format!("requested depth {k_max} exceeds expansion depth {}, truncated to {k}", exp.depth()));
    }
    let kb = force_exp.map(|f| k_max.min(f.depth())).unwrap_or(0);
    let mut indices: Vec<usize> = if k == 0 {
        (0..alphas.len()).filter(|&n| Some(n) != exp.limit_index).collect()
    } else {
        exp.levels[k - 1].indices.clone()
    };
    if let Some(f) = force_exp.filter(|_| kb > 0) {
        indices.retain(|&n| f.levels[kb - 1].gamma_at(n).is_some());
    }
    if indices.iter().any(|&n| n >= alphas.len()) {
        return Err(Error::InvalidInput("alphas shorter than the expanded sequence".into()));
    }
    let a: Vec<f64> = indices.iter().map(|&n| alphas[n]).collect();
    let gamma: Vec<Vec<f64>> = (1..=k)
        .map(|j| {
            let level = &exp.levels[j - 1];
            indices.iter().map(|&n| level.gamma_at(n).expect("nested indices").as_f64()).collect()
        })
        .collect();
    let mut seqs = vec![
        SigmaSequence {
            label: SigmaLabel::Alpha,
            values: a.clone(),
        },
        SigmaSequence {
            label: SigmaLabel::Sigma0,
            values: vec![1.0; a.len()],
        },
    ];
    for j in 1..=k {
        let g = &gamma[j - 1];
        seqs.push(SigmaSequence {
            label: SigmaLabel::Sigma(j),
            values: g.clone(),
        });
        seqs.push(SigmaSequence {
            label: SigmaLabel::AlphaGamma(j),
            values: a.iter().zip(g).map(|(x, y)| x * y).collect(),
        });
    }
    for j in 1..=k {
        for l in j..=k {
            seqs.push(SigmaSequence {
                label: SigmaLabel::Pair(j, l),
                values: (0..a.len()).map(|i| a[i] * gamma[j - 1][i] * gamma[l - 1][i]).collect(),
            });
        }
    }
    if let Some(f) = force_exp {
        for j in 1..=kb {
            let level = &f.levels[j - 1];
            seqs.push(SigmaSequence {
                label: SigmaLabel::Beta(j),
                values: indices.iter().map(|&n| level.gamma_at(n).expect("filtered").as_f64()).collect(),
            });
        }
    }
    let mut t = SigmaTable::new(indices, a, seqs, *policy)?;
    t.notes = notes;
    Ok(t)
}

/// Outcome of dropping head indices until every pair is decided.
#[derive(Clone, Debug)]
pub struct Totalized {
    pub table: SigmaTable,
    pub dropped: usize,
    pub diagnostics: Vec<String>,
}

impl Totalized {
    pub fn complete(&self) -> bool {
        self.table.is_decided()
    }
}

/// Drops leading indices in chunks of one twentieth of the length until all
/// verdicts are decided or fewer than `floor` rows would remain.
pub fn totalize(table: &SigmaTable, floor: usize) -> Result<Totalized> {
    if table.sequences.len() < 2 {
        return Err(Error::InvalidInput("need at least two sequences".into()));
    }
    let chunk = (table.len() / 20).max(1);
    let mut cur = table.clone();
    let mut dropped = 0;
    while !cur.is_decided() && cur.len() >= floor + chunk {
        let keep: Vec<bool> = (0..cur.len()).map(|i| i >= chunk).collect();
        cur = cur.restrict(&keep);
        dropped += chunk;
    }
    let mut diagnostics = Vec::new();
    for (a, b) in cur.undecided_pairs() {
        diagnostics.push(format!("{a} vs {b} undecided with {} rows left", cur.len()));
    }
    Ok(Totalized {
        table: cur,
        dropped,
        diagnostics,
    })
}

/// Sign class of a signed sequence after splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClass {
    /// Identically zero.
    Zero,
    Positive,
    Negative,
}

impl SignClass {
    pub fn sign(self) -> f64 {
        match self {
            SignClass::Negative => -1.0,
            _ => 1.0,
        }
    }
}

/// Splits rows by the sign of `chi` (aligned with the table rows), keeps the
/// largest class (ties favour positive), appends `|chi|` as a sequence unless
/// the kept class is zero, and totalizes.
pub fn totalize_signed(table: &SigmaTable, chi: &[f64], floor: usize) -> Result<(Totalized, SignClass)> {
    if chi.len() != table.len() {
        return Err(Error::InvalidInput("signed sequence not aligned with the table".into()));
    }
    let class = |x: f64| {
        if x.abs() <= 1e-12 {
            SignClass::Zero
        } else if x > 0.0 {
            SignClass::Positive
        } else {
            SignClass::Negative
        }
    };
    let count = |c: SignClass| chi.iter().filter(|&&x| class(x) == c).count();
    let (z, p, n) = (count(SignClass::Zero), count(SignClass::Positive), count(SignClass::Negative));
    let kept = if z > p && z > n {
        SignClass::Zero
    } else if p >= n {
        SignClass::Positive
    } else {
        SignClass::Negative
    };
    let keep: Vec<bool> = chi.iter().map(|&x| class(x) == kept).collect();
    let mut t = table.restrict(&keep);
    t.notes.push(format!("sign split kept {kept:?} rows: {} of {}", t.len(), table.len()));
    if kept != SignClass::Zero {
        let values: Vec<f64> = chi.iter().zip(&keep).filter(|(_, k)| **k).map(|(x, _)| x.abs()).collect();
        t = t.with_sequence(SigmaSequence {
            label: SigmaLabel::Chi,
            values,
        })?;
    }
    Ok((totalize(&t, floor)?, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::convert_pre_unitary;
    use crate::spectral::{ModeSet, SpectralField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Expansion with `Gamma_{k,n} = alpha_n^{-p_k}` on orthonormal directions.
    fn power_expansion(powers: &[f64], alphas: &[f64]) -> UnitaryExpansion<f64> {
        let m = ModeSet::ball(3, 2.0).unwrap();
        let basis = SpectralField::<f64>::solenoidal_basis(&m);
        let idx: Vec<usize> = (0..alphas.len()).collect();
        let terms: Vec<_> = powers
            .iter()
            .enumerate()
            .map(|(k, p)| (alphas.iter().map(|a| a.powf(-p)).collect(), basis[k].clone()))
            .collect();
        let v = SpectralField::random_solenoidal(&m, &mut ChaCha8Rng::seed_from_u64(5));
        convert_pre_unitary(&v, &terms, &idx).unwrap()
    }

    fn alphas(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.1f64.powi(i as i32 + 1)).collect()
    }

    #[test]
    fn inverse_alpha_gamma_makes_first_scaled_level_constant() {
        let a = alphas(80);
        let e = power_expansion(&[1.0], &a);
        let t = build_sigma_table(&e, &a, 1, None, &ComparePolicy::default()).unwrap();
        for v in t.values(&SigmaLabel::AlphaGamma(1)).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        match t.verdict(&SigmaLabel::Sigma0, &SigmaLabel::AlphaGamma(1)).unwrap() {
            Verdict::Equiv(l) => assert!((l - 1.0).abs() < 1e-12),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn inverse_root_alpha_gamma_balances_the_square() {
        let a = alphas(80);
        let e = power_expansion(&[0.5], &a);
        let t = build_sigma_table(&e, &a, 1, None, &ComparePolicy::default()).unwrap();
        let v = t.values(&SigmaLabel::Pair(1, 1)).unwrap();
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12));
        assert!(matches!(t.verdict(&SigmaLabel::Pair(1, 1), &SigmaLabel::Sigma0), Some(Verdict::Equiv(_))));
    }

    #[test]
    fn depth_beyond_expansion_is_noted() {
        let a = alphas(40);
        let e = power_expansion(&[1.0], &a);
        let t = build_sigma_table(&e, &a, 3, None, &ComparePolicy::default()).unwrap();
        assert_eq!(t.notes.len(), 1);
        assert!(t.position(&SigmaLabel::Sigma(2)).is_none());
    }

    #[test]
    fn ordered_pair_needs_no_drops() {
        let a: Vec<f64> = (1..=60).map(|n| n as f64).collect();
        let s = |p: i32| SigmaSequence {
            label: SigmaLabel::Custom(format!("p{p}")),
            values: a.iter().map(|x| x.powi(-p)).collect(),
        };
        let t = SigmaTable::new((0..60).collect(), a.clone(), vec![s(1), s(2)], ComparePolicy::default()).unwrap();
        let r = totalize(&t, 10).unwrap();
        assert_eq!(r.dropped, 0);
        assert_eq!(r.table.verdicts[0][1], Verdict::Greater);
    }

    #[test]
    fn oscillating_pair_hits_the_floor() {
        let a: Vec<f64> = (1..=60).map(|n| n as f64).collect();
        let osc = SigmaSequence {
            label: SigmaLabel::Custom("osc".into()),
            values: (0..60).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect(),
        };
        let one = SigmaSequence {
            label: SigmaLabel::Custom("one".into()),
            values: vec![1.0; 60],
        };
        let t = SigmaTable::new((0..60).collect(), a, vec![osc, one], ComparePolicy::default()).unwrap();
        let r = totalize(&t, 20).unwrap();
        assert!(!r.complete());
        assert!(r.table.len() >= 20);
        assert_eq!(r.diagnostics.len(), 1);
    }

    #[test]
    fn alternating_signed_sequence_keeps_one_half() {
        let a = alphas(120);
        let e = power_expansion(&[1.0, 2.0], &a);
        let t = build_sigma_table(&e, &a, 2, None, &ComparePolicy::default()).unwrap();
        let chi: Vec<f64> = t.indices.iter().map(|&n| if n % 2 == 0 { 1.0 } else { -1.0 } / (n + 1) as f64).collect();
        let (r, class) = totalize_signed(&t, &chi, 16).unwrap();
        assert!(class != SignClass::Zero);
        assert_eq!(r.table.len() + r.dropped, 60);
        assert!(r.complete(), "{:?}", r.diagnostics);
        assert!(r.table.position(&SigmaLabel::Chi).is_some());
    }
}
