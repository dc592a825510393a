//! Sampling-query generation.
//!
//! Queries are W-word windows taken every S words from the suspect
//! document. W controls how specific each exact-phrase query is; S
//! controls how densely the document is sampled.

use crate::error::ConfigError;
use crate::span::Span;
use crate::textmodel::Document;
use serde::{Deserialize, Serialize};

/// How the hermetic search compares spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Exact,
    EditDistance,
}

/// All tunables of the engine, with the evaluated defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// W: words per sampling query.
    pub window_size: usize,
    /// S: words between consecutive query starts.
    pub step_size: usize,
    /// Allowed edit operations as a fraction of the span length.
    pub edit_ratio: f64,
    /// A source must be hit by at least this many distinct match areas
    /// before it is downloaded.
    pub min_sample_hits: usize,
    /// Final filter: a source appearing in only one area shorter than
    /// this many characters is considered coincidental.
    pub min_area_chars: usize,
    /// Fraction of covered text at or above which a document alerts.
    pub alert_threshold: f64,
    pub match_mode: MatchMode,
    /// Cap on provider results consumed per query.
    pub max_hits: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            window_size: 5,
            step_size: 6,
            edit_ratio: 0.05,
            min_sample_hits: 2,
            min_area_chars: 50,
            alert_threshold: 0.25,
            match_mode: MatchMode::EditDistance,
            max_hits: 10,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.window_size < 1 {
            return Err(ConfigError::Invalid("window size must be >= 1".into()));
        }
        if self.step_size < 1 {
            return Err(ConfigError::Invalid("step size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.edit_ratio) {
            return Err(ConfigError::Invalid("edit ratio must be in [0, 1]".into()));
        }
        if !(self.alert_threshold > 0.0 && self.alert_threshold <= 1.0) {
            return Err(ConfigError::Invalid(
                "alert threshold must be in (0, 1]".into(),
            ));
        }
        if self.min_sample_hits < 1 {
            return Err(ConfigError::Invalid("min sample hits must be >= 1".into()));
        }
        if self.min_area_chars < 1 {
            return Err(ConfigError::Invalid("min area chars must be >= 1".into()));
        }
        if self.max_hits < 1 {
            return Err(ConfigError::Invalid("max hits must be >= 1".into()));
        }
        Ok(())
    }

    /// Edit ratio actually applied by the hermetic search.
    pub fn effective_edit_ratio(&self) -> f64 {
        match self.match_mode {
            MatchMode::Exact => 0.0,
            MatchMode::EditDistance => self.edit_ratio,
        }
    }

    /// Growth step for match-area expansion: roughly one query phrase
    /// (W words of average length).
    pub fn step_chars(&self) -> usize {
        (self.window_size * 6).max(1)
    }
}

/// One sampling query: the n-th W-word window of the suspect document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleQuery {
    pub ordinal: usize,
    pub token_start: usize,
    /// Exclusive; `token_end - token_start == W`.
    pub token_end: usize,
    /// Character span in the suspect document.
    pub char_span: Span,
    /// Token surfaces joined by single spaces.
    pub phrase: String,
}

/// Generate the queries q_1..q_n: starts at token 0, S, 2S, …, emitting
/// a query only when W tokens remain. Count is floor((T-W)/S)+1 for
/// T >= W, else zero.
pub fn generate_queries(doc: &Document, config: &EngineConfig) -> Vec<SampleQuery> {
    let tokens = doc.tokens();
    let total = tokens.len();
    let w = config.window_size;
    let s = config.step_size;
    let mut queries = Vec::new();
    if total < w {
        return queries;
    }
    let mut start = 0;
    let mut ordinal = 0;
    while start + w <= total {
        let window = &tokens[start..start + w];
        let phrase = window
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        queries.push(SampleQuery {
            ordinal,
            token_start: start,
            token_end: start + w,
            char_span: Span::new(window[0].start, window[w - 1].end),
            phrase,
        });
        ordinal += 1;
        start += s;
    }
    queries
}

/// Allowed edit operations for one query: floor(ratio × phrase length).
/// Zero in exact mode. With the default 5% ratio a 40-character phrase
/// allows 2 edits and anything shorter allows at most 2.
pub fn query_edit_budget(query: &SampleQuery, config: &EngineConfig) -> usize {
    span_edit_budget(query.phrase.chars().count(), config)
}

/// Budget for an arbitrary span length under the configured ratio.
pub fn span_edit_budget(span_chars: usize, config: &EngineConfig) -> usize {
    (config.effective_edit_ratio() * span_chars as f64).floor() as usize
}
