//! Wave vectors and the truncated mode sets of the Galerkin space.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Integer wave vector. Two-dimensional vectors keep the third entry at zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct WaveVector(pub [i32; 3]);

impl WaveVector {
    pub const fn new(k1: i32, k2: i32, k3: i32) -> Self {
        WaveVector([k1, k2, k3])
    }

    pub const fn planar(k1: i32, k2: i32) -> Self {
        WaveVector([k1, k2, 0])
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn dot(&self, other: &WaveVector) -> i64 {
        (0..3).map(|i| self.0[i] as i64 * other.0[i] as i64).sum()
    }

    /// First nonzero component is positive.
    pub fn is_canonical(&self) -> bool {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) => c > 0,
            None => false,
        }
    }

    /// Canonical representative of `{k, -k}` and whether `-k` was taken.
    pub fn canonical(&self) -> (WaveVector, bool) {
        if self.is_canonical() {
            (*self, false)
        } else {
            (-*self, true)
        }
    }

    /// Components as floating point numbers.
    pub fn to_array<T: crate::Scalar>(&self) -> [T; 3] {
        [
            T::lit(self.0[0] as f64),
            T::lit(self.0[1] as f64),
            T::lit(self.0[2] as f64),
        ]
    }

    pub fn is_parallel(&self, other: &WaveVector) -> bool {
        let [a1, a2, a3] = self.0.map(|c| c as i64);
        let [b1, b2, b3] = other.0.map(|c| c as i64);
        a2 * b3 - a3 * b2 == 0 && a3 * b1 - a1 * b3 == 0 && a1 * b2 - a2 * b1 == 0
    }
}

impl Neg for WaveVector {
    type Output = WaveVector;
    fn neg(self) -> WaveVector {
        WaveVector(self.0.map(|c| -c))
    }
}

impl Add for WaveVector {
    type Output = WaveVector;
    fn add(self, o: WaveVector) -> WaveVector {
        WaveVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for WaveVector {
    type Output = WaveVector;
    fn sub(self, o: WaveVector) -> WaveVector {
        self + (-o)
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Reference to a full-lattice mode through its canonical index.
/// `conj` marks the negated vector, whose coefficient is the conjugate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FullRef {
    pub index: usize,
    pub conj: bool,
}

/// Pair of full-lattice modes `(j, m)` with `j + m` equal to a target mode.
#[derive(Clone, Copy, Debug)]
pub struct Triad {
    pub left: FullRef,
    pub right: FullRef,
}

struct Inner {
    dim: usize,
    cutoff: Option<f64>,
    modes: Vec<WaveVector>,
    index: HashMap<WaveVector, usize>,
    triads: Vec<Vec<Triad>>,
    touching: Vec<Vec<(usize, usize)>>,
}

/// Canonical half of a symmetric, finite set of nonzero wave vectors,
/// sorted lexicographically, together with its convolution tables.
#[derive(Clone)]
pub struct ModeSet(Arc<Inner>);

impl ModeSet {
    /// All nonzero `k` in `Z^dim` with `|k|^2 <= cutoff`.
    pub fn ball(dim: usize, cutoff: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(cutoff >= 1.0) {
            return Err(Error::InvalidModes(format!("empty Galerkin space for cutoff {cutoff}")));
        }
        let r = cutoff.sqrt().floor() as i32;
        let mut modes = Vec::new();
        let r3 = if dim == 3 { r } else { 0 };
        for k1 in -r..=r {
            for k2 in -r..=r {
                for k3 in -r3..=r3 {
                    let k = WaveVector::new(k1, k2, k3);
                    if k.is_canonical() && k.norm_sq() as f64 <= cutoff {
                        modes.push(k);
                    }
                }
            }
        }
        Ok(Self::build(dim, Some(cutoff), modes))
    }

    /// Arbitrary symmetric set given by any of its members; each vector may be
    /// listed with either sign.
    pub fn custom<I: IntoIterator<Item = WaveVector>>(dim: usize, vectors: I) -> Result<Self> {
        check_dim(dim)?;
        let mut modes = Vec::new();
        for k in vectors {
            if k.is_zero() {
                return Err(Error::InvalidModes("zero wave vector".into()));
            }
            if dim == 2 && k.0[2] != 0 {
                return Err(Error::InvalidModes(format!("{k} is not planar")));
            }
            modes.push(k.canonical().0);
        }
        modes.sort();
        modes.dedup();
        if modes.is_empty() {
            return Err(Error::InvalidModes("empty mode set".into()));
        }
        Ok(Self::build(dim, None, modes))
    }

    fn build(dim: usize, cutoff: Option<f64>, mut modes: Vec<WaveVector>) -> Self {
        modes.sort();
        let index: HashMap<WaveVector, usize> =
            modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let lookup = |k: WaveVector| -> Option<FullRef> {
            let (c, conj) = k.canonical();
            index.get(&c).map(|&i| FullRef { index: i, conj })
        };
        let mut triads = Vec::with_capacity(modes.len());
        let mut touching = vec![Vec::new(); modes.len()];
        for (t, &k) in modes.iter().enumerate() {
            let mut list = Vec::new();
            for (jdx, &jc) in modes.iter().enumerate() {
                for (j, conj) in [(jc, false), (-jc, true)] {
                    let m = k - j;
                    if m.is_zero() {
                        continue;
                    }
                    if let Some(right) = lookup(m) {
                        let left = FullRef { index: jdx, conj };
                        let ti = list.len();
                        list.push(Triad { left, right });
                        touching[left.index].push((t, ti));
                        if right.index != left.index {
                            touching[right.index].push((t, ti));
                        }
                    }
                }
            }
            triads.push(list);
        }
        ModeSet(Arc::new(Inner {
            dim,
            cutoff,
            modes,
            index,
            triads,
            touching,
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// The `|k|^2` cutoff when the set is a full ball.
    pub fn cutoff(&self) -> Option<f64> {
        self.0.cutoff
    }

    pub fn len(&self) -> usize {
        self.0.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.modes.is_empty()
    }

    pub fn modes(&self) -> &[WaveVector] {
        &self.0.modes
    }

    pub fn mode(&self, i: usize) -> WaveVector {
        self.0.modes[i]
    }

    /// Number of real unknowns of a vector field on this set.
    pub fn real_len(&self) -> usize {
        2 * self.0.dim * self.0.modes.len()
    }

    pub fn max_norm_sq(&self) -> i64 {
        self.0.modes.iter().map(|k| k.norm_sq()).max().unwrap_or(0)
    }

    /// Locates `k` (either sign) in the set.
    pub fn find(&self, k: WaveVector) -> Option<FullRef> {
        let (c, conj) = k.canonical();
        self.0.index.get(&c).map(|&i| FullRef { index: i, conj })
    }

    pub fn contains(&self, k: WaveVector) -> bool {
        !k.is_zero() && self.find(k).is_some()
    }

    /// Triads `(j, m)` with `j + m = modes[target]`, both in the set.
    pub fn triads(&self, target: usize) -> &[Triad] {
        &self.0.triads[target]
    }

    /// `(target, triad index)` pairs whose triad involves canonical mode `c`.
    pub(crate) fn touching(&self, c: usize) -> &[(usize, usize)] {
        &self.0.touching[c]
    }

    pub fn same_as(&self, other: &ModeSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.dim() == other.dim() && self.modes() == other.modes())
    }
}

impl PartialEq for ModeSet {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModeSet")
            .field("dim", &self.dim())
            .field("cutoff", &self.cutoff())
            .field("modes", &self.len())
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::InvalidModes(format!("dimension {dim} not in {{2, 3}}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counts() {
        assert_eq!(ModeSet::ball(3, 9.0).unwrap().len(), 61);
        assert_eq!(ModeSet::ball(3, 9.0).unwrap().real_len(), 366);
        assert_eq!(ModeSet::ball(3, 1.0).unwrap().len(), 3);
        assert_eq!(ModeSet::ball(2, 1.0).unwrap().len(), 2);
        assert_eq!(ModeSet::ball(2, 2.0).unwrap().len(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ModeSet::ball(3, 0.5).is_err());
        assert!(ModeSet::ball(4, 9.0).is_err());
        assert!(ModeSet::custom(3, [WaveVector::default()]).is_err());
    }

    #[test]
    fn canonical_and_sorted() {
        let s = ModeSet::ball(3, 9.0).unwrap();
        assert!(s.modes().iter().all(|k| k.is_canonical()));
        assert!(s.modes().windows(2).all(|w| w[0] < w[1]));
        let r = s.find(WaveVector::new(-1, 0, 1)).unwrap();
        assert!(r.conj);
        assert_eq!(s.mode(r.index), WaveVector::new(1, 0, -1));
    }

    #[test]
    fn triads_sum_to_target() {
        let s = ModeSet::ball(2, 5.0).unwrap();
        let full = |r: FullRef| {
            let k = s.mode(r.index);
            if r.conj {
                -k
            } else {
                k
            }
        };
        for t in 0..s.len() {
            for tr in s.triads(t) {
                assert_eq!(full(tr.left) + full(tr.right), s.mode(t));
            }
        }
    }

    #[test]
    fn custom_symmetrizes() {
        let s = ModeSet::custom(3, [WaveVector::new(-3, 0, 0), WaveVector::new(3, 0, 0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.cutoff(), None);
    }
}
