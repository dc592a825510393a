//! The detection pipeline: sampling, match-area expansion, overlap
//! merging, coincidental-match filtering, and scoring.
//!
//! Sampling sends every query to the provider and creates one match
//! area per query with hits. Sources answering at least
//! `min_sample_hits` distinct areas are fetched (and persisted when a
//! store is given); the rest are dropped as coincidental. Expansion
//! grows each area's span per source — both directions first, then left
//! or right — until the edit budget stops it. Overlapping or touching
//! areas merge, sources seen only in a single short area are filtered,
//! and the covered fraction of the document decides the alert.
//!
//! Hermetic-only detection is the same pipeline run with a
//! `LocalProvider` over the local corpus index and no store.

use crate::error::DetectError;
use crate::matcher::{extend_match, Direction, SpanMatch};
use crate::sampler::{generate_queries, query_edit_budget, span_edit_budget, EngineConfig, SampleQuery};
use crate::searchindex::{provider_search, SampledSourceStore, SearchProvider};
use crate::span::Span;
use crate::textmodel::Document;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A span of the suspect document linked to the sources matching it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchArea {
    pub suspect_span: Span,
    /// Per-source aligned span; every value's suspect side lies within
    /// `suspect_span`.
    pub sources: BTreeMap<String, SpanMatch>,
    /// Ordinals of the sampling queries that seeded this area.
    pub origin_queries: BTreeSet<usize>,
}

/// Final per-document verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub suspect_id: String,
    /// Pairwise disjoint, ordered by start.
    pub areas: Vec<MatchArea>,
    /// Covered fraction of the normalized text, in [0, 1].
    pub percent_plagiarized: f64,
    pub alert: bool,
    /// Characters of the suspect covered per source.
    pub per_source_coverage: BTreeMap<String, usize>,
    pub config_snapshot: EngineConfig,
}

/// What sampling produced: query-level areas plus the fetched sources.
pub struct SamplingOutcome {
    pub areas: Vec<MatchArea>,
    /// Fetched source documents, keyed by source id.
    pub sampled: BTreeMap<String, Document>,
}

impl SamplingOutcome {
    pub fn sampled_ids(&self) -> BTreeSet<String> {
        self.sampled.keys().cloned().collect()
    }
}

/// Sampling phase: one provider query per sampling window, one area per
/// query with hits. Sources hit by at least `min_sample_hits` distinct
/// areas are fetched and, when a store is given, persisted; sources
/// below the threshold are dropped from all areas and sourceless areas
/// are discarded. A provider failure aborts the whole run.
pub fn sampling_phase(
    suspect: &Document,
    config: &EngineConfig,
    provider: &dyn SearchProvider,
    store: Option<&SampledSourceStore>,
) -> Result<SamplingOutcome, DetectError> {
    config.validate()?;
    let queries = generate_queries(suspect, config);
    let mut raw: Vec<(&SampleQuery, Vec<crate::searchindex::SearchHit>)> = Vec::new();
    for query in &queries {
        let hits = provider_search(provider, &query.phrase, config.max_hits)?;
        if !hits.is_empty() {
            raw.push((query, hits));
        }
    }

    // Count distinct areas (= queries) per source.
    let mut area_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, hits) in &raw {
        let distinct: BTreeSet<&str> = hits.iter().map(|h| h.source_id.as_str()).collect();
        for sid in distinct {
            *area_counts.entry(sid).or_default() += 1;
        }
    }
    let keep: BTreeSet<String> = area_counts
        .into_iter()
        .filter(|(_, n)| *n >= config.min_sample_hits)
        .map(|(sid, _)| sid.to_string())
        .collect();

    // Fetch everything first, then persist, so a failed run leaves no
    // partially sampled result behind.
    let mut sampled: BTreeMap<String, Document> = BTreeMap::new();
    for sid in &keep {
        sampled.insert(sid.clone(), provider.fetch(sid)?);
    }
    if let Some(store) = store {
        for doc in sampled.values() {
            store.store(doc)?;
        }
    }

    let mut areas = Vec::new();
    for (query, hits) in raw {
        let mut sources: BTreeMap<String, SpanMatch> = BTreeMap::new();
        for hit in hits {
            if !keep.contains(&hit.source_id) || sources.contains_key(&hit.source_id) {
                continue;
            }
            let seed = match hit.span {
                Some(span) => SpanMatch {
                    suspect: query.char_span,
                    source: span,
                    edit_cost: 0,
                },
                // Opaque provider: locate the phrase in the fetched text.
                None => match locate_phrase(query, &sampled[&hit.source_id], config) {
                    Some(m) => m,
                    None => continue,
                },
            };
            sources.insert(hit.source_id.clone(), seed);
        }
        if !sources.is_empty() {
            areas.push(MatchArea {
                suspect_span: query.char_span,
                sources,
                origin_queries: BTreeSet::from([query.ordinal]),
            });
        }
    }
    Ok(SamplingOutcome { areas, sampled })
}

fn locate_phrase(
    query: &SampleQuery,
    source: &Document,
    config: &EngineConfig,
) -> Option<SpanMatch> {
    let budget = query_edit_budget(query, config);
    let pattern = crate::textmodel::canonical_fold(&query.phrase);
    crate::matcher::approx_find_chars(&pattern, source.canonical(), budget)
        .into_iter()
        .min_by_key(|m| (m.edit_cost, m.source.start))
        .map(|m| SpanMatch {
            suspect: query.char_span,
            source: m.source,
            edit_cost: m.edit_cost,
        })
}

/// Expansion phase: grow every area's span per source to its fixpoint —
/// both directions first, then left, then right — and widen each area
/// to the union of its per-source spans. Deterministic: areas are
/// processed in document order, sources in id order.
pub fn expansion_phase(
    suspect: &Document,
    mut areas: Vec<MatchArea>,
    sources: &BTreeMap<String, Document>,
    config: &EngineConfig,
) -> Result<Vec<MatchArea>, DetectError> {
    let ratio = config.effective_edit_ratio();
    let step = config.step_chars();
    areas.sort_by_key(|a| (a.suspect_span.start, a.suspect_span.end));

    // Spans already grown per source: a seed contained in one of them
    // would grow into (at least) the same region again, so reuse it.
    let mut grown_cache: BTreeMap<String, Vec<SpanMatch>> = BTreeMap::new();

    for area in &mut areas {
        let mut grown_sources: BTreeMap<String, SpanMatch> = BTreeMap::new();
        for (sid, seed) in &area.sources {
            let source = sources
                .get(sid)
                .ok_or_else(|| DetectError::MissingSource(sid.clone()))?;
            let cached = grown_cache.get(sid).and_then(|spans| {
                spans
                    .iter()
                    .find(|g| g.suspect.contains(seed.suspect) && g.source.contains(seed.source))
                    .copied()
            });
            let grown = match cached {
                Some(g) => g,
                None => {
                    let g = grow_to_fixpoint(suspect, source, *seed, step, ratio);
                    grown_cache.entry(sid.clone()).or_default().push(g);
                    g
                }
            };
            grown_sources.insert(sid.clone(), grown);
        }
        let hull = grown_sources
            .values()
            .map(|m| m.suspect)
            .reduce(|a, b| a.hull(b))
            .expect("area has sources");
        area.suspect_span = hull;
        area.sources = grown_sources;
    }
    Ok(areas)
}

fn grow_to_fixpoint(
    suspect: &Document,
    source: &Document,
    mut current: SpanMatch,
    step: usize,
    ratio: f64,
) -> SpanMatch {
    loop {
        if let Some(next) = extend_match(suspect, source, &current, Direction::Both, step, ratio) {
            current = next;
            continue;
        }
        if let Some(next) = extend_match(suspect, source, &current, Direction::Left, step, ratio) {
            current = next;
            continue;
        }
        if let Some(next) = extend_match(suspect, source, &current, Direction::Right, step, ratio) {
            current = next;
            continue;
        }
        return current;
    }
}

/// Merge overlapping or touching areas. Merged sources take the span
/// union per source with the edit cost recomputed; if a union would
/// exceed its edit budget (the source matches two separated passages),
/// the cheaper constituent is kept instead so every reported span stays
/// within budget.
pub fn merge_areas(
    mut areas: Vec<MatchArea>,
    suspect: &Document,
    sources: &BTreeMap<String, Document>,
    config: &EngineConfig,
) -> Vec<MatchArea> {
    areas.sort_by_key(|a| (a.suspect_span.start, a.suspect_span.end));
    let mut merged: Vec<MatchArea> = Vec::new();
    for area in areas {
        match merged.last_mut() {
            Some(last) if last.suspect_span.touches(area.suspect_span) => {
                last.suspect_span = last.suspect_span.hull(area.suspect_span);
                last.origin_queries.extend(area.origin_queries);
                for (sid, incoming) in area.sources {
                    let entry = last.sources.entry(sid.clone());
                    match entry {
                        std::collections::btree_map::Entry::Vacant(v) => {
                            v.insert(incoming);
                        }
                        std::collections::btree_map::Entry::Occupied(mut o) => {
                            let combined = combine_span_matches(
                                *o.get(),
                                incoming,
                                suspect,
                                sources.get(&sid),
                                config,
                            );
                            o.insert(combined);
                        }
                    }
                }
            }
            _ => merged.push(area),
        }
    }
    merged
}

fn combine_span_matches(
    a: SpanMatch,
    b: SpanMatch,
    suspect: &Document,
    source: Option<&Document>,
    config: &EngineConfig,
) -> SpanMatch {
    let sus = a.suspect.hull(b.suspect);
    let src = a.source.hull(b.source);
    // One constituent already covers the union (typical when areas
    // share a cached grown span): its cost is the union's cost.
    if sus == a.suspect && src == a.source {
        return a;
    }
    if sus == b.suspect && src == b.source {
        return b;
    }
    if let Some(source) = source {
        let bound = span_edit_budget(sus.len(), config);
        if let Some(cost) = crate::matcher::edit_distance_bounded_chars(
            suspect.canonical_slice(sus),
            source.canonical_slice(src),
            bound,
        ) {
            return SpanMatch {
                suspect: sus,
                source: src,
                edit_cost: cost,
            };
        }
    }
    // Union not alignable within budget: keep the better half.
    std::cmp::min_by_key(a, b, |m| {
        (m.edit_cost, std::cmp::Reverse(m.suspect.len()), m.suspect.start)
    })
}

/// Final filter: a source appearing in exactly one area whose span is
/// shorter than `min_area_chars` is removed from that area as
/// coincidental; areas left without sources are dropped.
pub fn filter_results(areas: Vec<MatchArea>, config: &EngineConfig) -> Vec<MatchArea> {
    let mut appearances: BTreeMap<&str, usize> = BTreeMap::new();
    for area in &areas {
        for sid in area.sources.keys() {
            *appearances.entry(sid).or_default() += 1;
        }
    }
    let doomed: BTreeSet<String> = appearances
        .into_iter()
        .filter(|(_, n)| *n == 1)
        .map(|(sid, _)| sid.to_string())
        .collect();
    areas
        .into_iter()
        .filter_map(|mut area| {
            if area.suspect_span.len() < config.min_area_chars {
                area.sources.retain(|sid, _| !doomed.contains(sid));
            }
            (!area.sources.is_empty()).then_some(area)
        })
        .collect()
}

/// Score: covered characters over total characters; alert at or above
/// the threshold.
pub fn score(suspect: &Document, areas: Vec<MatchArea>, config: &EngineConfig) -> DetectionResult {
    let total = suspect.char_len();
    let covered: usize = areas.iter().map(|a| a.suspect_span.len()).sum();
    let percent = if total == 0 {
        0.0
    } else {
        covered as f64 / total as f64
    };
    let mut per_source_coverage: BTreeMap<String, usize> = BTreeMap::new();
    for area in &areas {
        for (sid, m) in &area.sources {
            *per_source_coverage.entry(sid.clone()).or_default() += m.suspect.len();
        }
    }
    DetectionResult {
        suspect_id: suspect.id.clone(),
        areas,
        percent_plagiarized: percent,
        alert: percent >= config.alert_threshold,
        per_source_coverage,
        config_snapshot: config.clone(),
    }
}

/// The whole pipeline for one suspect document.
///
/// Web detection passes a provider backed by a search engine stand-in
/// plus a store; hermetic detection passes a `LocalProvider` over the
/// corpus index and no store.
pub fn detect(
    suspect: &Document,
    config: &EngineConfig,
    provider: &dyn SearchProvider,
    store: Option<&SampledSourceStore>,
) -> Result<DetectionResult, DetectError> {
    let outcome = sampling_phase(suspect, config, provider, store)?;
    let expanded = expansion_phase(suspect, outcome.areas, &outcome.sampled, config)?;
    let merged = merge_areas(expanded, suspect, &outcome.sampled, config);
    let filtered = filter_results(merged, config);
    Ok(score(suspect, filtered, config))
}

/// Detect a batch of suspects in parallel. One failed document does not
/// abort the batch; each suspect reports its own outcome.
pub fn detect_batch(
    suspects: &[Document],
    config: &EngineConfig,
    provider: &dyn SearchProvider,
    store: Option<&SampledSourceStore>,
) -> Vec<(String, Result<DetectionResult, DetectError>)> {
    suspects
        .par_iter()
        .map(|doc| (doc.id.clone(), detect(doc, config, provider, store)))
        .collect()
}
