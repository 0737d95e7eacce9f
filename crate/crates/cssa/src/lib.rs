//! Compressed spaced suffix arrays.
//!
//! A spaced suffix array (SSA) lists the starting positions of a text sorted
//! by the subsequence a spaced seed selects from each suffix. An SSA costs as
//! much as the suffix array (SA) itself when stored plainly, but it is close
//! to the SA as a permutation: the composition `SA⁻¹ ∘ SSA` decomposes into
//! few increasing subsequences. This crate stores that composition as two
//! labeled sequences with partial-rank/select support, giving random access
//! to the SSA at a fraction of the packed-array size.
//!
//! The same machinery stores any permutation relative to a partition into
//! subsequences, and in particular stores the SA of an edited document
//! relative to the SA of the original.
//!
//! Modules:
//! - [`text`]: texts, alphabets, spaced/subset seeds, seed-masked keys.
//! - [`suffix`]: suffix arrays and spaced suffix arrays.
//! - [`perm`]: permutation algebra and minimal increasing partitions.
//! - [`succinct`]: rank/select bitvectors and labeled sequences.
//! - [`relperm`]: the relative permutation codec.
//! - [`index`]: compressed SSA collections, reference trees, document deltas.
//! - [`container`]: the on-disk container format.

pub mod container;
pub mod index;
pub mod par;
pub mod perm;
pub mod relperm;
pub mod succinct;
pub mod suffix;
pub mod text;

pub use index::{CompressedSsa, RelativeDocumentSa, SeedCollection};
pub use perm::{IncreasingPartition, Permutation};
pub use relperm::RelativePermutation;
pub use succinct::LabeledSequence;
pub use suffix::{SpacedSuffixArray, SuffixArray};
pub use text::{SpacedSeed, Text};
