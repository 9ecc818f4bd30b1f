//! Versioned binary model container.
//!
//! ```text
//! magic       8 bytes  "TSETLINM"
//! version     u32
//! metadata    u32 length + hyperparameters, class labels, tokenizer config
//! vocabulary  u32 count + (u32 length + UTF-8) per term
//! states      endianness tag, cell width, then per class, per clause:
//!             polarity byte + 2k state cells
//! checksum    u64 CRC-64/XZ over every preceding byte
//! ```
//!
//! All integers are little-endian.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use crc::{Crc, CRC_64_XZ};

use crate::clause::{Clause, Polarity};
use crate::error::{Error, Result};
use crate::learner::{HyperParams, MultiClassTm, TsetlinMachine};
use crate::scalar::Scalar;
use crate::text::{TokenizerConfig, Vocabulary};

pub const MAGIC: [u8; 8] = *b"TSETLINM";
pub const VERSION: u32 = 1;
const LITTLE_ENDIAN_TAG: u8 = b'L';
const CHECKSUM: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

/// Everything needed to classify raw text with a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle<F = f64> {
    pub model: MultiClassTm<F>,
    pub vocabulary: Vocabulary,
    pub tokenizer: TokenizerConfig,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn count(&mut self, v: usize) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::Malformed(format!("{v} does not fit a u32 field")))?;
        self.u32(v);
        Ok(())
    }
    fn str(&mut self, s: &str) -> Result<()> {
        self.count(s.len())?;
        self.0.extend_from_slice(s.as_bytes());
        Ok(())
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::Truncated)?;
        let slice = self.buf.get(self.pos..end).ok_or(Error::Truncated)?;
        self.pos = end;
        Ok(slice)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn count(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }
    fn str(&mut self) -> Result<String> {
        let n = self.count()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Malformed("invalid UTF-8 string".into()))
    }
    fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(Error::Malformed(format!("invalid boolean byte {b}"))),
        }
    }
}

pub fn encode<F: Scalar>(bundle: &ModelBundle<F>) -> Result<Vec<u8>> {
    let ModelBundle { model, vocabulary, tokenizer } = bundle;
    if vocabulary.len() != model.n_features() {
        return Err(Error::DimensionMismatch { expected: model.n_features(), found: vocabulary.len() });
    }
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(&MAGIC);
    w.u32(VERSION);

    let mut meta = Writer(Vec::new());
    let p = model.params();
    meta.count(p.clauses)?;
    meta.count(p.states_per_action)?;
    meta.f64(p.specificity.to_f64_lossy());
    meta.u32(p.threshold);
    meta.count(p.epochs)?;
    meta.u64(p.seed);
    meta.u64(model.epochs_trained());
    meta.count(model.n_features())?;
    meta.count(model.n_classes())?;
    for label in model.class_labels() {
        meta.str(label)?;
    }
    meta.u8(tokenizer.lowercase as u8);
    meta.u8(tokenizer.strip_punctuation as u8);
    meta.count(tokenizer.ngram_sizes.len())?;
    for &n in &tokenizer.ngram_sizes {
        meta.count(n)?;
    }
    meta.count(tokenizer.min_document_frequency)?;
    w.count(meta.0.len())?;
    w.0.extend_from_slice(&meta.0);

    w.count(vocabulary.len())?;
    for term in vocabulary.terms() {
        w.str(term)?;
    }

    w.u8(LITTLE_ENDIAN_TAG);
    w.u8(2);
    for machine in model.machines() {
        for clause in machine.clauses() {
            w.u8(match clause.polarity() {
                Polarity::Positive => 0,
                Polarity::Negative => 1,
            });
            for &s in clause.states() {
                w.0.extend_from_slice(&s.to_le_bytes());
            }
        }
    }
    let checksum = CHECKSUM.checksum(&w.0);
    w.u64(checksum);
    Ok(w.0)
}

pub fn decode<F: Scalar>(bytes: &[u8]) -> Result<ModelBundle<F>> {
    if bytes.len() < MAGIC.len() {
        return Err(if MAGIC.starts_with(bytes) { Error::Truncated } else { Error::BadMagic });
    }
    if bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < MAGIC.len() + 4 + 8 {
        return Err(Error::Truncated);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::UnsupportedVersion { found: version, supported: VERSION });
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(trailer.try_into().unwrap());
    let computed = CHECKSUM.checksum(body);
    if stored != computed {
        return Err(Error::ChecksumMismatch { stored, computed });
    }

    let mut r = Reader { buf: body, pos: 12 };
    let meta_len = r.count()?;
    let meta_end = r.pos + meta_len;
    let clauses = r.count()?;
    let states_per_action = r.count()?;
    let specificity = F::from_f64_lossy(r.f64()?);
    let threshold = r.u32()?;
    let epochs = r.count()?;
    let seed = r.u64()?;
    let epochs_trained = r.u64()?;
    let n_features = r.count()?;
    let n_classes = r.count()?;
    let class_labels = (0..n_classes).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    let lowercase = r.bool()?;
    let strip_punctuation = r.bool()?;
    let n_sizes = r.count()?;
    let ngram_sizes = (0..n_sizes).map(|_| r.count()).collect::<Result<BTreeSet<_>>>()?;
    let min_document_frequency = r.count()?;
    if r.pos != meta_end {
        return Err(Error::Malformed("metadata block length mismatch".into()));
    }
    let tokenizer = TokenizerConfig { lowercase, strip_punctuation, ngram_sizes, min_document_frequency };
    tokenizer.validate()?;
    let params = HyperParams { clauses, states_per_action, specificity, threshold, epochs, seed };

    let n_terms = r.count()?;
    if n_terms != n_features {
        return Err(Error::DimensionMismatch { expected: n_features, found: n_terms });
    }
    let terms = (0..n_terms).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    let vocabulary = Vocabulary::from_terms(terms)?;

    if r.u8()? != LITTLE_ENDIAN_TAG {
        return Err(Error::Malformed("unknown endianness tag".into()));
    }
    let width = r.u8()?;
    let mut machines = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let mut pool = Vec::with_capacity(clauses);
        for _ in 0..clauses {
            let polarity = match r.u8()? {
                0 => Polarity::Positive,
                1 => Polarity::Negative,
                b => return Err(Error::Malformed(format!("invalid polarity byte {b}"))),
            };
            let mut states = Vec::with_capacity(2 * n_features);
            for _ in 0..2 * n_features {
                let s = match width {
                    2 => r.u16()?,
                    4 => u16::try_from(r.u32()?).map_err(|_| Error::Malformed("state exceeds u16".into()))?,
                    w => return Err(Error::Malformed(format!("unsupported state width {w}"))),
                };
                states.push(s);
            }
            pool.push(Clause::from_states(n_features, states_per_action, polarity, states)?);
        }
        machines.push(TsetlinMachine::from_clauses(n_features, params.clone(), pool)?);
    }
    if r.pos != body.len() {
        return Err(Error::Malformed("trailing bytes after state block".into()));
    }
    let model = MultiClassTm::from_parts(class_labels, machines, epochs_trained)?;
    Ok(ModelBundle { model, vocabulary, tokenizer })
}

/// Writes atomically: a temporary file in the target directory is renamed
/// over `path`.
pub fn save_model<F: Scalar>(bundle: &ModelBundle<F>, path: &Path) -> Result<()> {
    let bytes = encode(bundle)?;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(&bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load_model<F: Scalar>(path: &Path) -> Result<ModelBundle<F>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
