//! Sampling-based plagiarism detection.
//!
//! The engine samples fixed-width word windows from a suspect document,
//! sends them as exact-phrase queries to a search provider, copies the
//! sources that answer repeatedly into a local store, then grows each
//! query hit into the longest matching span using edit-distance search.
//! Overlapping spans are merged, coincidental one-off matches are
//! filtered, and the covered fraction of the document is scored against
//! an alert threshold.
//!
//! Modules follow the pipeline order:
//!
//! - [`textmodel`]: ingestion and tokenization with offset maps
//! - [`sampler`]: window/step query generation and edit budgets
//! - [`searchindex`]: exact-phrase providers and the sampled-source store
//! - [`matcher`]: edit distance, approximate search, span extension
//! - [`detector`]: the sampling → expansion → merge → filter → score pipeline
//! - [`evalharness`]: generated test corpora and accuracy tables
//! - [`report`]: JSON and static-HTML result reports
//! - [`workspace`]: on-disk layout shared by the CLI and the harness

pub mod detector;
pub mod error;
pub mod evalharness;
pub mod matcher;
pub mod report;
pub mod sampler;
pub mod searchindex;
pub mod span;
pub mod textmodel;
pub mod workspace;

pub use detector::{detect, DetectionResult, MatchArea};
pub use error::{DetectError, EvalError, ProviderError, ReportError, StoreError, TextError};
pub use matcher::SpanMatch;
pub use sampler::{EngineConfig, MatchMode, SampleQuery};
pub use searchindex::{PhraseIndex, SampledSourceStore, SearchHit, SearchProvider};
pub use span::Span;
pub use textmodel::{Document, DocumentOrigin, Token};

/// Engine version stamped into report bundles.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
