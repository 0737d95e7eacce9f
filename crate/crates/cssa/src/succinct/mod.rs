//! Rank/select bitvectors and labeled sequences.
//!
//! [`RsBitvector`] answers rank in constant time from a two-level sampled
//! directory (absolute counts per superblock, relative counts per 512-bit
//! block, popcount inside) and select by binary search over those samples.
//! [`LabeledSequence`] stacks one bitvector per label bit, wavelet-matrix
//! style, for access, partial rank, and select over an alphabet `[0, rho)`.

mod bitvec;
mod labeled;
mod packed;

pub use bitvec::RsBitvector;
pub use labeled::{LabeledSequence, QueryError, SizeBits};
pub use packed::{bits_for, PackedIntVec};
