//! Permutation algebra and minimal partitions into increasing subsequences.
//!
//! The number of strictly increasing subsequences needed to cover a
//! permutation equals the length of its longest strictly decreasing
//! subsequence (Dilworth duality). Supowit's greedy rule attains that
//! minimum in `O(n lg rho)` comparisons and is what the relative encoders
//! build on: fewer subsequences means fewer label bits per element.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("values do not form a permutation of 0..{n}")]
    NotAPermutation { n: usize },
}

/// A bijection on `[0, n)`, stored as the value at each position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    /// Validates that `values` hits every element of `[0, n)` exactly once.
    pub fn new(values: Vec<usize>) -> Result<Self, PermError> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v >= n || seen[v] {
                return Err(PermError::NotAPermutation { n });
            }
            seen[v] = true;
        }
        Ok(Self { values })
    }

    /// Skips validation; caller guarantees `values` is a bijection on `[0, n)`.
    pub(crate) fn from_trusted(values: Vec<usize>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            values: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.values
    }

    /// The inverse bijection: `inv[self[k]] = k`.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.len()];
        for (k, &v) in self.values.iter().enumerate() {
            inv[v] = k;
        }
        Self { values: inv }
    }

    /// Functional composition: `result[i] = p[q[i]]`.
    pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation, PermError> {
        if p.len() != q.len() {
            return Err(PermError::LengthMismatch {
                left: p.len(),
                right: q.len(),
            });
        }
        Ok(Self {
            values: q.values.iter().map(|&i| p.values[i]).collect(),
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

/// A partition of a permutation into `rho` strictly increasing subsequences,
/// with `rho` minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncreasingPartition {
    rho: usize,
    label_of_position: Vec<usize>,
}

impl IncreasingPartition {
    pub fn rho(&self) -> usize {
        self.rho
    }

    /// Subsequence id of the element at position `i`.
    pub fn label(&self, i: usize) -> usize {
        self.label_of_position[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.label_of_position
    }

    /// Positions of each subsequence, ascending within each id.
    pub fn subsequences(&self) -> Vec<Vec<usize>> {
        let mut subs = vec![Vec::new(); self.rho];
        for (i, &j) in self.label_of_position.iter().enumerate() {
            subs[j].push(i);
        }
        subs
    }
}

/// Supowit's greedy partition into the minimum number of strictly increasing
/// subsequences.
///
/// Scanning left to right, each element goes to the subsequence whose current
/// tail is the largest value not exceeding it; if none qualifies, a new
/// subsequence opens. Tails stay sorted, so the lookup is a binary search.
/// Subsequence ids are renumbered by first appearance so that label 0 is the
/// subsequence containing position 0.
pub fn partition_increasing(p: &Permutation) -> IncreasingPartition {
    // tails[t] = current last value of the subsequence with internal id ids[t],
    // kept sorted ascending. Values are distinct, so "largest tail <= x" and
    // "largest tail < x" coincide.
    let mut tails: Vec<usize> = Vec::new();
    let mut ids: Vec<usize> = Vec::new();
    let mut labels = vec![0usize; p.len()];
    let mut next_id = 0usize;

    for (i, &x) in p.as_slice().iter().enumerate() {
        let t = tails.partition_point(|&tail| tail <= x);
        if t == 0 {
            // No tail fits below x: open a new subsequence. Its tail x is the
            // smallest so far, so it slots in at the front.
            tails.insert(0, x);
            ids.insert(0, next_id);
            labels[i] = next_id;
            next_id += 1;
        } else {
            tails[t - 1] = x;
            labels[i] = ids[t - 1];
        }
    }

    // Renumber so ids appear in first-use order along the permutation.
    let rho = next_id;
    let mut remap = vec![usize::MAX; rho];
    let mut next = 0usize;
    for l in labels.iter_mut() {
        if remap[*l] == usize::MAX {
            remap[*l] = next;
            next += 1;
        }
        *l = remap[*l];
    }

    IncreasingPartition {
        rho,
        label_of_position: labels,
    }
}

/// Length of the longest strictly decreasing subsequence, by quadratic
/// dynamic programming. Serves as the minimality certificate for
/// [`partition_increasing`].
pub fn lds_length(p: &Permutation) -> usize {
    let v = p.as_slice();
    let mut best = vec![0usize; v.len()];
    let mut overall = 0;
    for i in 0..v.len() {
        let mut b = 1;
        for j in 0..i {
            if v[j] > v[i] && best[j] + 1 > b {
                b = best[j] + 1;
            }
        }
        best[i] = b;
        overall = overall.max(b);
    }
    overall
}
