use super::compare::Verdict;
use super::table::SigmaTable;
use super::SigmaLabel;
use crate::error::{Error, Result};

/// One finite bound on an ordinal label.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub label: SigmaLabel,
    pub description: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct OrderReport {
    /// Equivalence classes of array members, sorted by ordinal.
    pub classes: Vec<Vec<SigmaLabel>>,
    /// Ordinal of every array member.
    pub ordinals: Vec<(SigmaLabel, usize)>,
    /// Ordinal of the array class each extra sequence (force level, `chi`,
    /// custom) is equivalent to, if any.
    pub extras: Vec<(SigmaLabel, Option<usize>)>,
    pub checks: Vec<BoundCheck>,
    /// Verdicts contradicting each other or the built-in ordering of the array.
    pub issues: Vec<String>,
    /// Infinite upper bounds, recorded symbolically.
    pub annotations: Vec<String>,
}

impl OrderReport {
    pub fn ordinal(&self, label: &SigmaLabel) -> Option<usize> {
        self.ordinals.iter().find(|(l, _)| l == label).map(|(_, o)| *o)
    }

    pub fn bounds_hold(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `a > b ~ c > ...` over the array classes.
    pub fn chain(&self) -> String {
        self.classes
            .iter()
            .map(|c| c.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ~ "))
            .collect::<Vec<_>>()
            .join(" > ")
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Pairs the array itself orders: `sigma_0_0` above everything,
/// `sigma_k > sigma_{k+1}`, `sigma_0_k > sigma_0_{k+1}` and
/// `sigma_{j,k} > sigma_{j,k+1}`.
fn structural(a: &SigmaLabel, b: &SigmaLabel) -> bool {
    use SigmaLabel::*;
    match (a, b) {
        (Alpha, b) => *b != Alpha,
        (Sigma0, Sigma(1)) => true,
        (Sigma(j), Sigma(k)) => k == &(j + 1),
        (AlphaGamma(j), AlphaGamma(k)) => k == &(j + 1),
        (Pair(i, j), Pair(i2, k)) => i == i2 && k == &(j + 1),
        _ => false,
    }
}

/// Equivalence classes and finite ordinal labels of a fully decided table,
/// with the finite bounds every array must satisfy.
pub fn ordinal_assign(table: &SigmaTable) -> Result<OrderReport> {
    let undecided = table.undecided_pairs();
    if let Some((a, b)) = undecided.first() {
        return Err(Error::InvalidInput(format!("{a} vs {b} undecided: totalize first")));
    }
    let m = table.sequences.len();
    let labels: Vec<&SigmaLabel> = table.sequences.iter().map(|s| &s.label).collect();
    let mut parent: Vec<usize> = (0..m).collect();
    for i in 0..m {
        for j in i + 1..m {
            if matches!(table.verdicts[i][j], Verdict::Equiv(_)) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
    let mut issues = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let v = table.verdicts[i][j];
            if roots[i] == roots[j] && !matches!(v, Verdict::Equiv(_)) {
                issues.push(format!("{} and {} share a class but compare {}", labels[i], labels[j], v.symbol()));
            }
            if structural(labels[i], labels[j]) && v != Verdict::Greater {
                issues.push(format!("{} should dominate {} but compares {}", labels[i], labels[j], v.symbol()));
            }
            for k in 0..m {
                if v == Verdict::Greater && table.verdicts[j][k] == Verdict::Greater && table.verdicts[i][k] != Verdict::Greater {
                    issues.push(format!("{} > {} > {} but not {0} > {2}", labels[i], labels[j], labels[k]));
                }
            }
        }
    }
    issues.sort();
    issues.dedup();

    // Ordinals over array members: one more than the number of classes above.
    let members: Vec<usize> = (0..m).filter(|&i| labels[i].in_array()).collect();
    let mut class_roots: Vec<usize> = members.iter().map(|&i| roots[i]).collect();
    class_roots.sort_unstable();
    class_roots.dedup();
    let above = |r: usize| {
        class_roots
            .iter()
            .filter(|&&s| {
                s != r
                    && members
                        .iter()
                        .filter(|&&a| roots[a] == s)
                        .any(|&a| members.iter().filter(|&&b| roots[b] == r).any(|&b| table.verdicts[a][b] == Verdict::Greater))
            })
            .count()
    };
    let class_ord: Vec<(usize, usize)> = class_roots.iter().map(|&r| (r, above(r) + 1)).collect();
    let ord_of = |i: usize| class_ord.iter().find(|(r, _)| *r == roots[i]).map(|(_, o)| *o);
    let mut ordinals: Vec<(SigmaLabel, usize)> = members.iter().map(|&i| (labels[i].clone(), ord_of(i).expect("member"))).collect();
    ordinals.sort_by_key(|(_, o)| *o);
    let mut sorted = class_ord.clone();
    sorted.sort_by_key(|(_, o)| *o);
    let classes: Vec<Vec<SigmaLabel>> = sorted
        .iter()
        .map(|(r, _)| members.iter().filter(|&&i| roots[i] == *r).map(|&i| labels[i].clone()).collect())
        .collect();
    let extras = (0..m)
        .filter(|&i| !labels[i].in_array())
        .map(|i| (labels[i].clone(), if class_roots.contains(&roots[i]) { ord_of(i) } else { None }))
        .collect();

    let mut checks = Vec::new();
    let mut annotations = Vec::new();
    for (label, o) in &ordinals {
        let o = *o;
        let (ok, description) = match *label {
            SigmaLabel::Alpha => (o == 1, "ord = 1".to_string()),
            SigmaLabel::AlphaGamma(k) => (k < o && o <= k * (k + 3) / 2 + 1, format!("{k} < ord <= {}", k * (k + 3) / 2 + 1)),
            SigmaLabel::Pair(j, k) => {
                annotations.push(format!("ord({label}) <= omega*{} + {}", 2 * j, (k - j) * (k - j + 1) / 2));
                (o > j + k, format!("ord > {}", j + k))
            }
            SigmaLabel::Sigma(k) => {
                annotations.push(format!("ord({label}) <= omega^2 + {k}"));
                (o > k + 1, format!("ord > {}", k + 1))
            }
            SigmaLabel::Sigma0 => {
                annotations.push(format!("ord({label}) <= omega^2"));
                (o > 1, "ord > 1".to_string())
            }
            _ => continue,
        };
        checks.push(BoundCheck {
            label: label.clone(),
            description: format!("{description} (ord = {o})"),
            passed: ok,
        });
    }
    annotations.push("every equivalence class is finite: holds on any finite table".into());
    Ok(OrderReport {
        classes,
        ordinals,
        extras,
        checks,
        issues,
        annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{ComparePolicy, SigmaSequence};

    fn table(powers: &[(SigmaLabel, f64)]) -> SigmaTable {
        let a: Vec<f64> = (1..=80).map(|i| 1.1f64.powi(i)).collect();
        let seqs = powers
            .iter()
            .map(|(l, p)| SigmaSequence {
                label: l.clone(),
                values: a.iter().map(|x| x.powf(*p)).collect(),
            })
            .collect();
        SigmaTable::new((0..80).collect(), a, seqs, ComparePolicy::default()).unwrap()
    }

    #[test]
    fn single_sequence_has_ordinal_one() {
        let t = table(&[(SigmaLabel::Sigma0, 0.0)]);
        let r = ordinal_assign(&t).unwrap();
        assert_eq!(r.ordinal(&SigmaLabel::Sigma0), Some(1));
    }

    #[test]
    fn geometric_family_ordinals() {
        // Gamma_{k,n} = alpha_n^{-k}.
        use SigmaLabel::*;
        let t = table(&[
            (Alpha, 1.0),
            (Sigma0, 0.0),
            (Sigma(1), -1.0),
            (AlphaGamma(1), 0.0),
            (Sigma(2), -2.0),
            (AlphaGamma(2), -1.0),
            (Pair(1, 1), -1.0),
            (Pair(1, 2), -2.0),
            (Pair(2, 2), -3.0),
        ]);
        let r = ordinal_assign(&t).unwrap();
        assert_eq!(r.ordinal(&AlphaGamma(1)), Some(2));
        assert_eq!(r.ordinal(&Sigma0), Some(2));
        assert_eq!(r.ordinal(&Pair(1, 1)), Some(3));
        assert_eq!(r.ordinal(&Pair(2, 2)), Some(5));
        assert!(r.bounds_hold(), "{:?}", r.checks);
        assert!(r.issues.is_empty(), "{:?}", r.issues);
        assert_eq!(r.classes.len(), 5);
    }

    #[test]
    fn undecided_table_is_rejected() {
        let a: Vec<f64> = (1..=60).map(|n| n as f64).collect();
        let osc = SigmaSequence {
            label: SigmaLabel::Sigma0,
            values: (0..60).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect(),
        };
        let one = SigmaSequence {
            label: SigmaLabel::Sigma(1),
            values: vec![1.0; 60],
        };
        let t = SigmaTable::new((0..60).collect(), a, vec![osc, one], ComparePolicy::default()).unwrap();
        let e = ordinal_assign(&t).unwrap_err();
        assert!(e.to_string().contains("totalize first"));
    }

    #[test]
    fn broken_structure_is_reported() {
        let t = table(&[(SigmaLabel::Sigma(1), -2.0), (SigmaLabel::Sigma(2), -1.0)]);
        let r = ordinal_assign(&t).unwrap();
        assert!(!r.issues.is_empty());
    }
}
