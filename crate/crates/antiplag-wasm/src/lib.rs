//! Browser bindings for the detection engine.
//!
//! Three interactive operations back the demo page: full detection of a
//! pasted suspect against pasted sources, sampling-window
//! visualization, and the raw approximate-search primitive. Everything
//! crosses the boundary as JSON strings; offsets count Unicode code
//! points, so the page slices text with `Array.from`.
//!
//! Errors come back as `{"error": "..."}` rather than exceptions, which
//! keeps the page logic uniform.

use antiplag::detector::detect;
use antiplag::matcher::approx_find;
use antiplag::sampler::{generate_queries, EngineConfig, MatchMode};
use antiplag::searchindex::{build_index, default_gram_width, LocalProvider};
use antiplag::textmodel::{ingest_plain_text_with, Document, DocumentOrigin};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Deserialize)]
struct SourceInput {
    id: String,
    text: String,
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct Options {
    window: Option<usize>,
    step: Option<usize>,
    edit_ratio: Option<f64>,
    alert_threshold: Option<f64>,
    min_area_chars: Option<usize>,
    min_sample_hits: Option<usize>,
    exact: Option<bool>,
}

impl Options {
    fn to_config(&self) -> EngineConfig {
        let defaults = EngineConfig::default();
        EngineConfig {
            window_size: self.window.unwrap_or(defaults.window_size),
            step_size: self.step.unwrap_or(defaults.step_size),
            edit_ratio: self.edit_ratio.unwrap_or(defaults.edit_ratio),
            alert_threshold: self.alert_threshold.unwrap_or(defaults.alert_threshold),
            min_area_chars: self.min_area_chars.unwrap_or(defaults.min_area_chars),
            min_sample_hits: self.min_sample_hits.unwrap_or(defaults.min_sample_hits),
            match_mode: if self.exact.unwrap_or(false) {
                MatchMode::Exact
            } else {
                MatchMode::EditDistance
            },
            max_hits: defaults.max_hits,
        }
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    normalized_text: String,
    percent: f64,
    alert: bool,
    areas: Vec<AreaOutput>,
}

#[derive(Serialize)]
struct AreaOutput {
    start: usize,
    end: usize,
    sources: Vec<SourceSpanOutput>,
}

#[derive(Serialize)]
struct SourceSpanOutput {
    id: String,
    start: usize,
    end: usize,
    cost: usize,
}

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn ingest(text: &str, id: &str, origin: DocumentOrigin) -> Result<Document, String> {
    ingest_plain_text_with(text.as_bytes(), id, origin, id).map_err(|e| e.to_string())
}

/// Run the whole pipeline: the pasted sources play the web corpus, the
/// suspect is sampled against them, hits expand under the edit budget,
/// and the covered fraction decides the alert.
#[wasm_bindgen]
pub fn analyze(suspect_text: &str, sources_json: &str, options_json: &str) -> String {
    let sources: Vec<SourceInput> = match serde_json::from_str(sources_json) {
        Ok(s) => s,
        Err(e) => return err_json(format!("sources: {e}")),
    };
    let options: Options = match serde_json::from_str(options_json) {
        Ok(o) => o,
        Err(e) => return err_json(format!("options: {e}")),
    };
    let config = options.to_config();
    if let Err(e) = config.validate() {
        return err_json(e);
    }

    let suspect = match ingest(suspect_text, "suspect", DocumentOrigin::Suspect) {
        Ok(d) => d,
        Err(e) => return err_json(format!("suspect: {e}")),
    };
    let mut corpus = Vec::new();
    for s in &sources {
        match ingest(&s.text, &s.id, DocumentOrigin::LocalCorpus) {
            Ok(d) => corpus.push(d),
            Err(e) => return err_json(format!("source {}: {e}", s.id)),
        }
    }

    let index = build_index(corpus, default_gram_width(config.window_size));
    let provider = LocalProvider::new(&index);
    match detect(&suspect, &config, &provider, None) {
        Ok(result) => {
            let areas = result
                .areas
                .iter()
                .map(|a| AreaOutput {
                    start: a.suspect_span.start,
                    end: a.suspect_span.end,
                    sources: a
                        .sources
                        .iter()
                        .map(|(id, m)| SourceSpanOutput {
                            id: id.clone(),
                            start: m.source.start,
                            end: m.source.end,
                            cost: m.edit_cost,
                        })
                        .collect(),
                })
                .collect();
            let out = AnalyzeOutput {
                normalized_text: suspect.text.clone(),
                percent: (result.percent_plagiarized * 1000.0).round() / 10.0,
                alert: result.alert,
                areas,
            };
            serde_json::to_string(&out).unwrap_or_else(err_json)
        }
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct QueriesOutput {
    normalized_text: String,
    queries: Vec<QueryOutput>,
}

#[derive(Serialize)]
struct QueryOutput {
    ordinal: usize,
    start: usize,
    end: usize,
    phrase: String,
}

/// Show the sampling windows W and S produce over a text.
#[wasm_bindgen]
pub fn sample_queries(text: &str, window: usize, step: usize) -> String {
    let config = EngineConfig {
        window_size: window,
        step_size: step,
        ..EngineConfig::default()
    };
    if let Err(e) = config.validate() {
        return err_json(e);
    }
    let doc = match ingest(text, "text", DocumentOrigin::Suspect) {
        Ok(d) => d,
        Err(e) => return err_json(e),
    };
    let queries = generate_queries(&doc, &config)
        .into_iter()
        .map(|q| QueryOutput {
            ordinal: q.ordinal,
            start: q.char_span.start,
            end: q.char_span.end,
            phrase: q.phrase,
        })
        .collect();
    serde_json::to_string(&QueriesOutput {
        normalized_text: doc.text,
        queries,
    })
    .unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct MatchesOutput {
    matches: Vec<MatchOutput>,
}

#[derive(Serialize)]
struct MatchOutput {
    start: usize,
    end: usize,
    cost: usize,
}

/// Raw approximate search: all occurrences of the pattern in the text
/// within the edit budget. Offsets index the text as given.
#[wasm_bindgen]
pub fn approx_search(pattern: &str, text: &str, budget: usize) -> String {
    if pattern.is_empty() {
        return err_json("pattern must not be empty");
    }
    let matches = approx_find(pattern, text, budget)
        .into_iter()
        .map(|m| MatchOutput {
            start: m.source.start,
            end: m.source.end,
            cost: m.edit_cost,
        })
        .collect();
    serde_json::to_string(&MatchesOutput { matches }).unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_verbatim_copy_alerts() {
        let text = "the grey lighthouse keeper climbed the spiral stair every evening to \
            trim the lamp before the fog rolled in from the cold northern sea";
        let sources = serde_json::json!([{ "id": "book", "text": text }]).to_string();
        let out = analyze(text, &sources, "{}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["percent"], 100.0);
        assert_eq!(v["alert"], true);
        assert_eq!(v["areas"][0]["sources"][0]["id"], "book");
    }

    #[test]
    fn analyze_unrelated_text_is_clean() {
        let sources = serde_json::json!([{
            "id": "src",
            "text": "completely different material about volcanic rock formations and \
                     the slow crystallization of basalt columns over geological time"
        }])
        .to_string();
        let out = analyze(
            "an original note on sourdough starters and the daily rhythm of feeding \
             flour and water to keep the culture alive through winter",
            &sources,
            "{}",
        );
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["percent"], 0.0);
        assert_eq!(v["alert"], false);
        assert_eq!(v["areas"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn analyze_reports_bad_input() {
        let out = analyze("text", "not json", "{}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["error"].as_str().unwrap().contains("sources"));

        let out = analyze("", "[]", "{}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
    }

    #[test]
    fn sample_queries_match_window_arithmetic() {
        let out = sample_queries("one two three four five six seven", 3, 4);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let queries = v["queries"].as_array().unwrap();
        assert_eq!(queries.len(), 2);
        assert_eq!(queries[0]["phrase"], "one two three");
        assert_eq!(queries[1]["phrase"], "five six seven");
    }

    #[test]
    fn approx_search_finds_fuzzy_occurrences() {
        let out = approx_search("abc", "xxaXcxx", 1);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let matches = v["matches"].as_array().unwrap();
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0]["start"], 2);
        assert_eq!(matches[0]["end"], 5);
        assert_eq!(matches[0]["cost"], 1);
    }
}
