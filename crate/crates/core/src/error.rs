use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("number of states per action must be at least 1")]
    ZeroStates,
    #[error("{0} states per action exceeds the supported maximum of {max}", max = crate::automata::MAX_STATES_PER_ACTION)]
    TooManyStates(usize),
    #[error("clause count must be a positive even number, got {0}")]
    InvalidClauseCount(usize),
    #[error("specificity s must be a finite real >= 1, got {0}")]
    InvalidSpecificity(f64),
    #[error("threshold T must be at least 1")]
    ZeroThreshold,
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("unknown class label {0}")]
    UnknownLabel(String),
    #[error("document has no label")]
    MissingLabel,
    #[error("model needs at least one class")]
    NoClasses,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid tokenizer configuration: {0}")]
    InvalidTokenizer(String),
    #[error("need at least {needed} samples, got {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("invalid split plan: {0}")]
    InvalidSplit(String),
    #[error("class {class} has {count} documents, fewer than {folds} folds")]
    ClassTooSmall { class: usize, count: usize, folds: usize },
    #[error("missing path {}", .0.display())]
    MissingPath(PathBuf),
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("model file is truncated")]
    Truncated,
    #[error("model file checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    ChecksumMismatch { stored: u64, computed: u64 },
    #[error("malformed model file: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
