//! Versioned binary corpus snapshot.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "AVERSNAP" | version u32 | kind u8
//! term labels: count u64, then (len u32, utf-8 bytes)*
//! doc labels:  count u64, then (len u32, utf-8 bytes)*
//! doc rows:    per doc: len u64, then (term u32, count u64)*
//! term totals u64*, doc totals u64*, N u64, e f64 bits
//! ```

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, CorpusKind, LabelMap, TermId};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"AVERSNAP";
pub const VERSION: u32 = 1;

pub fn encode(corpus: &Corpus) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + corpus.nnz() * 12);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(match corpus.kind() {
        CorpusKind::Documents => 0,
        CorpusKind::Graph => 1,
    });
    for labels in [corpus.term_labels(), corpus.doc_labels()] {
        out.extend_from_slice(&(labels.len() as u64).to_le_bytes());
        for label in labels.iter() {
            out.extend_from_slice(&(label.len() as u32).to_le_bytes());
            out.extend_from_slice(label.as_bytes());
        }
    }
    for d in corpus.doc_ids() {
        let row = corpus.doc(d);
        out.extend_from_slice(&(row.len() as u64).to_le_bytes());
        for (t, c) in row.iter() {
            out.extend_from_slice(&t.0.to_le_bytes());
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    for &t in corpus.term_totals() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    for &d in corpus.doc_totals() {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out.extend_from_slice(&corpus.total().to_le_bytes());
    out.extend_from_slice(&corpus.e().to_bits().to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.buf.len())
            .ok_or_else(|| Error::Snapshot(format!("truncated at byte {}", self.pos)))?;
        let bytes = &self.buf[self.pos..end];
        self.pos = end;
        Ok(bytes)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize> {
        let n = self.u64()?;
        // Every counted element occupies at least four bytes.
        if n > (self.buf.len() - self.pos) as u64 / 4 + 1 {
            return Err(Error::Snapshot(format!("implausible length {n} at byte {}", self.pos - 8)));
        }
        Ok(n as usize)
    }

    fn labels(&mut self) -> Result<LabelMap> {
        let n = self.len()?;
        let mut map = LabelMap::new();
        for _ in 0..n {
            let len = self.u32()? as usize;
            let label = std::str::from_utf8(self.take(len)?)
                .map_err(|_| Error::Snapshot("label is not utf-8".into()))?;
            map.push_new(label.to_owned())
                .ok_or_else(|| Error::Snapshot(format!("duplicate label {label:?}")))?;
        }
        Ok(map)
    }
}

/// Whether `bytes` start like a snapshot, as opposed to a text corpus.
pub fn is_snapshot(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC)
}

pub fn decode(bytes: &[u8]) -> Result<Corpus> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(Error::Snapshot("not a corpus snapshot".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let kind = match r.u8()? {
        0 => CorpusKind::Documents,
        1 => CorpusKind::Graph,
        k => return Err(Error::Snapshot(format!("unknown corpus kind {k}"))),
    };
    let terms = r.labels()?;
    let docs = r.labels()?;
    let mut rows = Vec::with_capacity(docs.len());
    for _ in 0..docs.len() {
        let n = r.len()?;
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            let t = r.u32()?;
            let c = r.u64()?;
            if t as usize >= terms.len() || c == 0 {
                return Err(Error::Snapshot(format!("bad entry (term {t}, count {c})")));
            }
            if row.last().is_some_and(|&(prev, _): &(TermId, u64)| prev.0 >= t) {
                return Err(Error::Snapshot("row not sorted by term".into()));
            }
            row.push((TermId(t), c));
        }
        rows.push(row);
    }
    let n_terms = terms.len();
    let n_docs = docs.len();
    let corpus = Corpus::from_rows(kind, terms, docs, rows);

    let check = |what: &str, stored: u64, actual: u64| {
        if stored == actual {
            Ok(())
        } else {
            Err(Error::Snapshot(format!("{what} mismatch: stored {stored}, recomputed {actual}")))
        }
    };
    for i in 0..n_terms {
        check("term total", r.u64()?, corpus.term_totals()[i])?;
    }
    for i in 0..n_docs {
        check("doc total", r.u64()?, corpus.doc_totals()[i])?;
    }
    check("grand total", r.u64()?, corpus.total())?;
    check("cached e", r.u64()?, corpus.e().to_bits())?;
    if r.pos != bytes.len() {
        return Err(Error::Snapshot(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(corpus)
}

pub fn save(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(corpus)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Hex SHA-256 of the encoded snapshot.
pub fn checksum(corpus: &Corpus) -> String {
    let digest = Sha256::digest(encode(corpus));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
