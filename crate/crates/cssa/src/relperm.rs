//! Storing a permutation relative to a partition into subsequences.
//!
//! Partition `pi` into subsequences `tau_0..tau_{rho-1}`. Two labeled
//! sequences record the partition: `R[i]` is the label of the subsequence
//! holding `pi[i]` (by position), and `R'[v]` the label of the subsequence
//! holding the value `v`. Each subsequence contributes its local
//! sub-permutation `pi_j`, where `pi_j[k]` is the rank of `tau_j[k]` among
//! the values of `tau_j`. Then
//!
//! ```text
//! pi[i] = R'.select_{R[i]}( pi_{R[i]}[ R.prank(i) - 1 ] + 1 )
//! ```
//!
//! with prank inclusive and select 1-indexed. A strictly increasing
//! subsequence has the identity sub-permutation and stores nothing; others
//! are stored packed, or resolved from an already stored permutation whose
//! designated subsequence has the same relative order:
//!
//! ```text
//! pi_j[k] = R'.prank( pi[ R.select_j(k + 1) ] ) - 1
//! ```
//!
//! applied to the reference's own `R`/`R'` pair.

use std::sync::Arc;

use thiserror::Error;

use crate::perm::Permutation;
use crate::succinct::{bits_for, LabeledSequence, PackedIntVec, QueryError, SizeBits};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelPermError {
    #[error("partition does not cover all positions (labels len {labels} vs n {n}, bad label {bad:?}, empty id {empty:?})")]
    IncompleteCover {
        labels: usize,
        n: usize,
        bad: Option<usize>,
        empty: Option<usize>,
    },
    #[error("subsequence {0} is not strictly increasing; identity mode is invalid")]
    NotIncreasing(usize),
    #[error("reference sub-permutation for label {0} differs from the target's")]
    ReferenceMismatch(usize),
    #[error("index {i} out of range for permutation of length {n}")]
    IndexOutOfRange { i: usize, n: usize },
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// A stored permutation together with its partition labels, usable as the
/// reference side of [`SubPerm::Reference`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceBundle {
    name: String,
    perm: Permutation,
    by_position: LabeledSequence,
    by_value: LabeledSequence,
}

impl ReferenceBundle {
    /// Stores `perm` with partition `labels` over `rho` subsequence ids.
    pub fn new(
        name: impl Into<String>,
        perm: Permutation,
        labels: &[usize],
        rho: usize,
    ) -> Result<Self, RelPermError> {
        check_cover(perm.len(), labels, rho)?;
        let by_value = labels_by_value(&perm, labels);
        Ok(Self {
            name: name.into(),
            by_position: LabeledSequence::build(labels, rho)?,
            by_value: LabeledSequence::build(&by_value, rho)?,
            perm,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    /// `R`: subsequence label of `perm[i]`, by position.
    pub fn by_position(&self) -> &LabeledSequence {
        &self.by_position
    }

    /// `R'`: subsequence label of the value `v`, by value.
    pub fn by_value(&self) -> &LabeledSequence {
        &self.by_value
    }

    /// Length of the subsequence labeled `j`.
    pub fn subseq_len(&self, j: usize) -> Result<usize, RelPermError> {
        Ok(self.by_position.occurrences(j)?)
    }

    pub(crate) fn from_parts(
        name: String,
        perm: Permutation,
        by_position: LabeledSequence,
        by_value: LabeledSequence,
    ) -> Self {
        Self {
            name,
            perm,
            by_position,
            by_value,
        }
    }

    /// Extra bits this bundle stores beyond the permutation itself.
    pub fn size_bits(&self) -> SizeBits {
        let a = self.by_position.size_bits();
        let b = self.by_value.size_bits();
        SizeBits {
            payload: a.payload + b.payload,
            overhead: a.overhead + b.overhead,
        }
    }
}

/// `pi_j[i]` resolved from a stored reference: select the i-th position of
/// subsequence `j`, read the stored permutation there, and partial-rank that
/// value among its subsequence.
pub fn subperm_via_reference(
    bundle: &ReferenceBundle,
    j: usize,
    i: usize,
) -> Result<usize, RelPermError> {
    let p = match bundle.by_position.select(j, i + 1) {
        Ok(p) => p,
        Err(QueryError::SelectOverflow { occ, .. }) => {
            return Err(RelPermError::IndexOutOfRange { i, n: occ })
        }
        Err(e) => return Err(e.into()),
    };
    let v = bundle.perm.get(p);
    Ok(bundle.by_value.prank(v)? - 1)
}

/// Storage mode for one subsequence, chosen at encode time.
#[derive(Debug, Clone)]
pub enum SubPermMode {
    /// Strictly increasing subsequence; the sub-permutation is the identity.
    Identity,
    /// Store the sub-permutation packed at `ceil(lg |tau_j|)` bits per entry.
    Explicit,
    /// Resolve the sub-permutation from subsequence `label` of a stored
    /// reference; verified equal at encode time.
    Reference {
        bundle: Arc<ReferenceBundle>,
        label: usize,
    },
}

/// One encoded subsequence.
#[derive(Debug, Clone)]
pub enum SubPerm {
    Identity,
    Explicit(PackedIntVec),
    Reference {
        bundle: Arc<ReferenceBundle>,
        label: usize,
    },
}

impl SubPerm {
    fn get(&self, k: usize) -> Result<usize, RelPermError> {
        match self {
            SubPerm::Identity => Ok(k),
            SubPerm::Explicit(p) => {
                if k >= p.len() {
                    return Err(RelPermError::IndexOutOfRange { i: k, n: p.len() });
                }
                Ok(p.get(k))
            }
            SubPerm::Reference { bundle, label } => subperm_via_reference(bundle, *label, k),
        }
    }

    pub fn explicit_values(&self) -> Option<Vec<usize>> {
        match self {
            SubPerm::Explicit(p) => Some(p.to_vec()),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, SubPerm::Identity)
    }
}

/// A permutation stored relative to a partition: the two label sequences
/// plus one sub-permutation per subsequence.
#[derive(Debug, Clone)]
pub struct RelativePermutation {
    n: usize,
    rho: usize,
    by_position: LabeledSequence,
    by_value: LabeledSequence,
    subperms: Vec<SubPerm>,
}

/// Itemized footprint of a relative permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SizeReport {
    /// Label sequence payloads (`R` and `R'`).
    pub payload_bits: usize,
    /// Rank/select directory bits.
    pub overhead_bits: usize,
    /// Packed explicit sub-permutations.
    pub explicit_bits: usize,
    /// Sequence length the bits are amortized over.
    pub n: usize,
}

impl SizeReport {
    pub fn total_bits(&self) -> usize {
        self.payload_bits + self.overhead_bits + self.explicit_bits
    }

    /// Bits per character of the underlying text.
    pub fn bpc(&self) -> f64 {
        self.total_bits() as f64 / self.n as f64
    }
}

impl RelativePermutation {
    /// Encodes `pi` against the partition `labels` (subsequence id per
    /// position), storing subsequence `j` in `modes[j]`.
    pub fn encode(
        pi: &Permutation,
        labels: &[usize],
        modes: &[SubPermMode],
    ) -> Result<Self, RelPermError> {
        let n = pi.len();
        let rho = modes.len();
        check_cover(n, labels, rho)?;

        // tau_j values in position order, and each value's rank within its
        // subsequence (the local sub-permutation).
        let mut taus: Vec<Vec<usize>> = vec![Vec::new(); rho];
        for (i, &j) in labels.iter().enumerate() {
            taus[j].push(pi.get(i));
        }

        let mut subperms = Vec::with_capacity(rho);
        for (j, mode) in modes.iter().enumerate() {
            let tau = &taus[j];
            match mode {
                SubPermMode::Identity => {
                    if tau.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(RelPermError::NotIncreasing(j));
                    }
                    subperms.push(SubPerm::Identity);
                }
                SubPermMode::Explicit => {
                    let local = local_ranks(tau);
                    subperms.push(SubPerm::Explicit(PackedIntVec::from_values(
                        local,
                        bits_for(tau.len()),
                    )));
                }
                SubPermMode::Reference { bundle, label } => {
                    let local = local_ranks(tau);
                    if bundle.subseq_len(*label)? != tau.len() {
                        return Err(RelPermError::ReferenceMismatch(j));
                    }
                    for (k, &want) in local.iter().enumerate() {
                        if subperm_via_reference(bundle, *label, k)? != want {
                            return Err(RelPermError::ReferenceMismatch(j));
                        }
                    }
                    subperms.push(SubPerm::Reference {
                        bundle: Arc::clone(bundle),
                        label: *label,
                    });
                }
            }
        }

        let by_value = labels_by_value(pi, labels);
        Ok(Self {
            n,
            rho,
            by_position: LabeledSequence::build(labels, rho)?,
            by_value: LabeledSequence::build(&by_value, rho)?,
            subperms,
        })
    }

    /// Convenience: encode with every subsequence in identity mode, as the
    /// increasing partitions of suffix-array compositions allow.
    pub fn encode_increasing(pi: &Permutation, labels: &[usize], rho: usize) -> Result<Self, RelPermError> {
        Self::encode(pi, labels, &vec![SubPermMode::Identity; rho])
    }

    /// `pi[i]`, reconstructed from the labels and the sub-permutation.
    pub fn access(&self, i: usize) -> Result<usize, RelPermError> {
        if i >= self.n {
            return Err(RelPermError::IndexOutOfRange { i, n: self.n });
        }
        let j = self.by_position.access(i)?;
        let k = self.by_position.prank(i)?;
        let local = self.subperms[j].get(k - 1)?;
        Ok(self.by_value.select(j, local + 1)?)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    /// `R`: label of `pi[i]`'s subsequence, by position.
    pub fn by_position(&self) -> &LabeledSequence {
        &self.by_position
    }

    /// `R'`: label of value `v`'s subsequence, by value.
    pub fn by_value(&self) -> &LabeledSequence {
        &self.by_value
    }

    pub fn subperm(&self, j: usize) -> &SubPerm {
        &self.subperms[j]
    }

    pub fn subperms(&self) -> &[SubPerm] {
        &self.subperms
    }

    /// Total explicit entries across sub-permutations.
    pub fn explicit_entries(&self) -> usize {
        self.subperms
            .iter()
            .map(|s| match s {
                SubPerm::Explicit(p) => p.len(),
                _ => 0,
            })
            .sum()
    }

    pub(crate) fn from_parts(
        n: usize,
        rho: usize,
        by_position: LabeledSequence,
        by_value: LabeledSequence,
        subperms: Vec<SubPerm>,
    ) -> Self {
        debug_assert_eq!(subperms.len(), rho);
        Self {
            n,
            rho,
            by_position,
            by_value,
            subperms,
        }
    }

    pub fn size_report(&self) -> SizeReport {
        let a = self.by_position.size_bits();
        let b = self.by_value.size_bits();
        SizeReport {
            payload_bits: a.payload + b.payload,
            overhead_bits: a.overhead + b.overhead,
            explicit_bits: self
                .subperms
                .iter()
                .map(|s| match s {
                    SubPerm::Explicit(p) => p.payload_bits(),
                    _ => 0,
                })
                .sum(),
            n: self.n,
        }
    }
}

/// Rank of each value within its subsequence: the local sub-permutation.
fn local_ranks(tau: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..tau.len()).collect();
    idx.sort_unstable_by_key(|&k| tau[k]);
    let mut ranks = vec![0usize; tau.len()];
    for (rank, &k) in idx.iter().enumerate() {
        ranks[k] = rank;
    }
    ranks
}

/// `R'` labels: label of the subsequence containing each value.
fn labels_by_value(pi: &Permutation, labels: &[usize]) -> Vec<usize> {
    let mut by_value = vec![0usize; pi.len()];
    for (i, &j) in labels.iter().enumerate() {
        by_value[pi.get(i)] = j;
    }
    by_value
}

fn check_cover(n: usize, labels: &[usize], rho: usize) -> Result<(), RelPermError> {
    let mut seen = vec![false; rho];
    let mut bad = None;
    for &l in labels {
        if l >= rho {
            bad = Some(l);
            break;
        }
        seen[l] = true;
    }
    let empty = seen.iter().position(|&s| !s);
    if labels.len() != n || bad.is_some() || empty.is_some() {
        return Err(RelPermError::IncompleteCover {
            labels: labels.len(),
            n,
            bad,
            empty,
        });
    }
    Ok(())
}
