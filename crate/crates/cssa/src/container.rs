//! On-disk formats.
//!
//! Everything is little-endian and padded to 64-bit word boundaries.
//! A labeled sequence serializes as a versioned `CSSA\x01` block: header
//! `(n, rho, levels)`, then the raw bit payload of every level, then the
//! rank directories. A seed collection serializes as a `CSSAColl\x01`
//! container: the suffix array packed at `ceil(lg n)` bits per entry, a
//! table of named compressed SSAs (base name, seed spec, relative
//! permutation), and the reference tree as parent indices. A document delta
//! serializes as a `CSSADoc\x01` container holding the reference SA, its two
//! label sequences, and the target's relative permutation.
//!
//! Loading recomputes rank directories from the payload and rejects files
//! whose stored directories disagree, so corruption surfaces at read time.

use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::index::{CompressedSsa, IndexError, RelativeDocumentSa, SeedCollection, SA_NAME};
use crate::perm::{PermError, Permutation};
use crate::relperm::{ReferenceBundle, RelativePermutation, SubPerm};
use crate::succinct::{bits_for, LabeledSequence, PackedIntVec, RsBitvector};
use crate::suffix::SuffixArray;

const MAGIC_SEQUENCE: &[u8; 8] = b"CSSA\x01\0\0\0";
const MAGIC_COLLECTION: &[u8; 16] = b"CSSAColl\x01\0\0\0\0\0\0\0";
const MAGIC_DOCUMENT: &[u8; 16] = b"CSSADoc\x01\0\0\0\0\0\0\0\0";
/// Parent index marking the SA root in the tree section.
const PARENT_SA: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("unrecognized magic or version")]
    BadMagic,
    #[error("truncated input at byte {0}")]
    Truncated(usize),
    #[error("malformed container: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

fn malformed(msg: impl Into<String>) -> ContainerError {
    ContainerError::Malformed(msg.into())
}

struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    fn new() -> Self {
        Self { buf: Vec::new() }
    }

    fn raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    fn pad(&mut self) {
        while !self.buf.len().is_multiple_of(8) {
            self.buf.push(0);
        }
    }

    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    fn u64s(&mut self, xs: &[u64]) {
        for &x in xs {
            self.u64(x);
        }
    }

    fn u16s(&mut self, xs: &[u16]) {
        for &x in xs {
            self.buf.extend_from_slice(&x.to_le_bytes());
        }
        self.pad();
    }

    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.raw(s.as_bytes());
        self.pad();
    }

    fn finish(self) -> Vec<u8> {
        self.buf
    }
}

struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn raw(&mut self, len: usize) -> Result<&'a [u8], ContainerError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.data.len())
            .ok_or(ContainerError::Truncated(self.pos))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn skip_pad(&mut self) -> Result<(), ContainerError> {
        while !self.pos.is_multiple_of(8) {
            self.raw(1)?;
        }
        Ok(())
    }

    fn u64(&mut self) -> Result<u64, ContainerError> {
        let b = self.raw(8)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, ContainerError> {
        usize::try_from(self.u64()?).map_err(|_| malformed("count exceeds address space"))
    }

    fn u64s(&mut self, count: usize) -> Result<Vec<u64>, ContainerError> {
        (0..count).map(|_| self.u64()).collect()
    }

    fn u16s(&mut self, count: usize) -> Result<Vec<u16>, ContainerError> {
        let out = self
            .raw(count * 2)?
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes(b.try_into().unwrap()))
            .collect();
        self.skip_pad()?;
        Ok(out)
    }

    fn str(&mut self) -> Result<String, ContainerError> {
        let len = self.usize()?;
        let bytes = self.raw(len)?.to_vec();
        self.skip_pad()?;
        String::from_utf8(bytes).map_err(|_| malformed("string is not UTF-8"))
    }

    fn magic(&mut self, expect: &[u8]) -> Result<(), ContainerError> {
        if self.raw(expect.len())? != expect {
            return Err(ContainerError::BadMagic);
        }
        Ok(())
    }

    fn done(&self) -> Result<(), ContainerError> {
        if self.pos != self.data.len() {
            return Err(malformed(format!(
                "{} trailing bytes",
                self.data.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn write_labeled(w: &mut ByteWriter, s: &LabeledSequence) {
    w.raw(MAGIC_SEQUENCE);
    w.u64(s.len() as u64);
    w.u64(s.rho() as u64);
    w.u64(s.num_levels() as u64);
    for level in s.levels() {
        w.u64s(level.words());
    }
    for level in s.levels() {
        w.u64s(level.supers());
        w.u16s(level.blocks());
    }
}

fn read_labeled(r: &mut ByteReader) -> Result<LabeledSequence, ContainerError> {
    r.magic(MAGIC_SEQUENCE)?;
    let n = r.usize()?;
    let rho = r.usize()?;
    let levels = r.usize()?;
    if rho == 0 {
        return Err(malformed("labeled sequence with empty alphabet"));
    }
    if levels != crate::succinct::bits_for(rho) {
        return Err(malformed("level count does not match alphabet size"));
    }
    let words_per_level = n.div_ceil(64);
    let mut bitvecs = Vec::with_capacity(levels);
    for _ in 0..levels {
        let words = r.u64s(words_per_level)?;
        bitvecs.push(RsBitvector::from_words(words, n));
    }
    for bv in &bitvecs {
        let supers = r.u64s(n.div_ceil(1 << 16))?;
        let blocks = r.u16s(n.div_ceil(512))?;
        if supers != bv.supers() || blocks != bv.blocks() {
            return Err(malformed("rank directory mismatch"));
        }
    }
    let zeros = bitvecs.iter().map(RsBitvector::num_zeros).collect();
    Ok(LabeledSequence::from_parts(n, rho, bitvecs, zeros))
}

const MODE_IDENTITY: u64 = 0;
const MODE_EXPLICIT: u64 = 1;
const MODE_REFERENCE: u64 = 2;

fn write_relperm(w: &mut ByteWriter, rp: &RelativePermutation) {
    w.u64(rp.len() as u64);
    w.u64(rp.rho() as u64);
    write_labeled(w, rp.by_position());
    write_labeled(w, rp.by_value());
    for sub in rp.subperms() {
        match sub {
            SubPerm::Identity => w.u64(MODE_IDENTITY),
            SubPerm::Explicit(p) => {
                w.u64(MODE_EXPLICIT);
                w.u64(p.len() as u64);
                w.u64s(p.words());
            }
            SubPerm::Reference { bundle, label } => {
                w.u64(MODE_REFERENCE);
                w.str(bundle.name());
                w.u64(*label as u64);
            }
        }
    }
}

fn read_relperm(
    r: &mut ByteReader,
    resolver: &dyn Fn(&str) -> Result<Arc<ReferenceBundle>, ContainerError>,
) -> Result<RelativePermutation, ContainerError> {
    let n = r.usize()?;
    let rho = r.usize()?;
    let by_position = read_labeled(r)?;
    let by_value = read_labeled(r)?;
    if by_position.len() != n || by_value.len() != n {
        return Err(malformed("label sequence length mismatch"));
    }
    if by_position.rho() != rho || by_value.rho() != rho {
        return Err(malformed("label alphabet mismatch"));
    }
    let mut subperms = Vec::with_capacity(rho);
    for j in 0..rho {
        match r.u64()? {
            MODE_IDENTITY => subperms.push(SubPerm::Identity),
            MODE_EXPLICIT => {
                let m = r.usize()?;
                let width = bits_for(m);
                let words = r.u64s((m * width).div_ceil(64))?;
                let packed = PackedIntVec::from_raw(words, m, width);
                if by_position
                    .occurrences(j)
                    .map_err(|e| malformed(e.to_string()))?
                    != m
                {
                    return Err(malformed("explicit sub-permutation length mismatch"));
                }
                subperms.push(SubPerm::Explicit(packed));
            }
            MODE_REFERENCE => {
                let name = r.str()?;
                let label = r.usize()?;
                let bundle = resolver(&name)?;
                subperms.push(SubPerm::Reference { bundle, label });
            }
            other => return Err(malformed(format!("unknown sub-permutation mode {other}"))),
        }
    }
    Ok(RelativePermutation::from_parts(
        n,
        rho,
        by_position,
        by_value,
        subperms,
    ))
}

fn write_packed_perm(w: &mut ByteWriter, p: &Permutation) {
    let width = bits_for(p.len());
    let packed = PackedIntVec::from_values(p.as_slice().iter().copied(), width);
    w.u64(p.len() as u64);
    w.u64(width as u64);
    w.u64s(packed.words());
}

fn read_packed_perm(r: &mut ByteReader) -> Result<Permutation, ContainerError> {
    let n = r.usize()?;
    let width = r.usize()?;
    if width != bits_for(n) {
        return Err(malformed("packed permutation width mismatch"));
    }
    let words = r.u64s((n * width).div_ceil(64))?;
    let packed = PackedIntVec::from_raw(words, n, width);
    Ok(Permutation::new(packed.to_vec())?)
}

impl SeedCollection {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.raw(MAGIC_COLLECTION);
        w.u64(self.text_len() as u64);
        w.u64(u64::from(self.sigma()));
        w.u64(self.len() as u64);
        w.str(self.sa().text_ref());
        write_packed_perm(&mut w, self.sa().order());
        for (name, entry) in self.entries() {
            w.str(name);
            w.str(entry.base());
            w.str(entry.seed_spec());
            w.u64(entry.rho() as u64);
            write_relperm(&mut w, entry.rel());
        }
        // Reference tree: parent index per entry, SA as the sentinel.
        let names: Vec<&str> = self.entries().map(|(n, _)| n).collect();
        for (_, entry) in self.entries() {
            let parent = if entry.base() == SA_NAME {
                PARENT_SA
            } else {
                names
                    .iter()
                    .position(|&n| n == entry.base())
                    .map(|p| p as u64)
                    .unwrap_or(PARENT_SA)
            };
            w.u64(parent);
        }
        w.finish()
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, ContainerError> {
        let mut r = ByteReader::new(data);
        r.magic(MAGIC_COLLECTION)?;
        let n = r.usize()?;
        let sigma = u16::try_from(r.u64()?).map_err(|_| malformed("alphabet too large"))?;
        let count = r.usize()?;
        let text_ref = r.str()?;
        let order = read_packed_perm(&mut r)?;
        if order.len() != n {
            return Err(malformed("suffix array length mismatch"));
        }
        let sa = SuffixArray::from_parts(order, text_ref);
        let mut coll = SeedCollection::new(sa, sigma);
        let no_refs = |name: &str| -> Result<Arc<ReferenceBundle>, ContainerError> {
            Err(malformed(format!(
                "collection entries cannot hold reference sub-permutations (saw {name:?})"
            )))
        };
        let mut names = Vec::with_capacity(count);
        let mut bases = Vec::with_capacity(count);
        for _ in 0..count {
            let name = r.str()?;
            let base = r.str()?;
            let seed_spec = r.str()?;
            let rho = r.usize()?;
            let rel = read_relperm(&mut r, &no_refs)?;
            if rel.rho() != rho {
                return Err(malformed("entry rho mismatch"));
            }
            if rel.len() != n {
                return Err(malformed("entry length mismatch"));
            }
            names.push(name.clone());
            bases.push(base.clone());
            coll.insert(name, CompressedSsa::from_parts(base, rel, seed_spec))?;
        }
        for (k, base) in bases.iter().enumerate() {
            let parent = r.u64()?;
            let expect = if base == SA_NAME {
                PARENT_SA
            } else {
                names
                    .iter()
                    .position(|n| n == base)
                    .map(|p| p as u64)
                    .ok_or_else(|| {
                        malformed(format!("entry {:?} has unresolvable base {base:?}", names[k]))
                    })?
            };
            if parent != expect {
                return Err(malformed("reference tree disagrees with entry bases"));
            }
        }
        r.done()?;
        Ok(coll)
    }

    pub fn write_to_file(&self, path: &Path) -> Result<(), ContainerError> {
        Ok(fs::write(path, self.to_bytes())?)
    }

    pub fn read_from_file(path: &Path) -> Result<Self, ContainerError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

impl RelativeDocumentSa {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.raw(MAGIC_DOCUMENT);
        let bundle = self.reference();
        w.str(bundle.name());
        write_packed_perm(&mut w, bundle.perm());
        write_labeled(&mut w, bundle.by_position());
        write_labeled(&mut w, bundle.by_value());
        write_relperm(&mut w, self.target());
        w.finish()
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, ContainerError> {
        let mut r = ByteReader::new(data);
        r.magic(MAGIC_DOCUMENT)?;
        let name = r.str()?;
        let perm = read_packed_perm(&mut r)?;
        let by_position = read_labeled(&mut r)?;
        let by_value = read_labeled(&mut r)?;
        if by_position.len() != perm.len() || by_value.len() != perm.len() {
            return Err(malformed("reference label sequence length mismatch"));
        }
        let bundle = Arc::new(ReferenceBundle::from_parts(
            name.clone(),
            perm,
            by_position,
            by_value,
        ));
        let resolver = |want: &str| -> Result<Arc<ReferenceBundle>, ContainerError> {
            if want == name {
                Ok(Arc::clone(&bundle))
            } else {
                Err(malformed(format!("unknown reference {want:?}")))
            }
        };
        let target = read_relperm(&mut r, &resolver)?;
        r.done()?;
        Ok(RelativeDocumentSa::from_parts(bundle, target))
    }

    pub fn write_to_file(&self, path: &Path) -> Result<(), ContainerError> {
        Ok(fs::write(path, self.to_bytes())?)
    }

    pub fn read_from_file(path: &Path) -> Result<Self, ContainerError> {
        Self::from_bytes(&fs::read(path)?)
    }
}
