//! Error types, one enum per subsystem.

use std::io;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    /// Nothing left after normalization (or tag stripping).
    #[error("document `{0}` is empty after normalization")]
    EmptyDocument(String),
    #[error("offset {offset} out of range for text of length {len}")]
    OffsetOutOfRange { offset: usize, len: usize },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum ProviderError {
    /// Transient failure; the caller may retry the whole run.
    #[error("search provider unavailable: {0}")]
    Unavailable(String),
    #[error("query rejected by provider: {0}")]
    QueryRejected(String),
    #[error("provider has no source `{0}`")]
    UnknownSource(String),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage failure at {path}: {source}")]
    StorageFailure { path: PathBuf, source: io::Error },
    #[error("sampled-source manifest corrupt: {0}")]
    ManifestCorrupt(String),
    #[error("no stored source with id `{0}`")]
    UnknownId(String),
}

#[derive(Debug, Error)]
pub enum DetectError {
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Store(#[from] StoreError),
    /// A match area references a source that neither the store nor the
    /// corpus can resolve; this signals store corruption.
    #[error("source `{0}` referenced by a match area cannot be resolved")]
    MissingSource(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("source pool exhausted: need {needed} sentences, pool has {available}")]
    InsufficientSourcePool { needed: usize, available: usize },
    #[error("sentence has fewer than {min} words: {sentence:?}")]
    SentenceTooShort { sentence: String, min: usize },
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Workspace(#[from] WorkspaceError),
    #[error("io failure at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("bad corpus spec: {0}")]
    BadSpec(String),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io failure at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("source `{0}` does not resolve to a manifest or corpus entry")]
    UnresolvedSource(String),
    #[error("malformed report bundle: {0}")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("io failure at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("duplicate document id `{0}` in workspace")]
    DuplicateDocumentId(String),
    #[error(transparent)]
    Text(#[from] TextError),
}
