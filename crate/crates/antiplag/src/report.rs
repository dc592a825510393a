//! Machine-readable (JSON) and human-readable (static HTML) reports.
//!
//! Both views are generated from the same bundle: an index page listing
//! every inspected document with its plagiarized percentage and alert
//! badge, plus one page per suspect with the match areas highlighted in
//! document order and, at the end of each highlighted area, links to
//! the stored source files.

use crate::detector::DetectionResult;
use crate::error::ReportError;
use crate::sampler::EngineConfig;
use crate::span::Span;
use crate::textmodel::Document;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

/// Report-facing view of one detection result. Percentages are 0–100,
/// rounded to one decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportResult {
    pub suspect_id: String,
    pub percent_plagiarized: f64,
    pub alert: bool,
    pub areas: Vec<ReportArea>,
    pub config: EngineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportArea {
    pub start: usize,
    pub end: usize,
    pub sources: Vec<ReportSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSource {
    pub source_id: String,
    /// Stored file path for sampled sources, else the original document
    /// location; the HTML links point here.
    pub uri: String,
    pub source_start: usize,
    pub source_end: usize,
    pub edit_cost: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceMeta {
    pub root: String,
    pub suspects: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub results: Vec<ReportResult>,
    pub workspace: WorkspaceMeta,
    pub generated_at: String,
    pub engine_version: String,
}

/// Round a fraction to a 0–100 percentage with one decimal, matching
/// the table formatting used throughout.
pub fn percent_1dp(fraction: f64) -> f64 {
    (fraction * 1000.0).round() / 10.0
}

impl ReportBundle {
    /// Assemble a bundle. `resolve_uri` maps a source id to the path or
    /// URI the report should link to; every referenced source must
    /// resolve.
    pub fn new(
        results: &[DetectionResult],
        workspace: WorkspaceMeta,
        resolve_uri: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, ReportError> {
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            let mut areas = Vec::with_capacity(r.areas.len());
            for area in &r.areas {
                let mut sources = Vec::with_capacity(area.sources.len());
                for (sid, m) in &area.sources {
                    let uri = resolve_uri(sid)
                        .ok_or_else(|| ReportError::UnresolvedSource(sid.clone()))?;
                    sources.push(ReportSource {
                        source_id: sid.clone(),
                        uri,
                        source_start: m.source.start,
                        source_end: m.source.end,
                        edit_cost: m.edit_cost,
                    });
                }
                areas.push(ReportArea {
                    start: area.suspect_span.start,
                    end: area.suspect_span.end,
                    sources,
                });
            }
            out.push(ReportResult {
                suspect_id: r.suspect_id.clone(),
                percent_plagiarized: percent_1dp(r.percent_plagiarized),
                alert: r.alert,
                areas,
                config: r.config_snapshot.clone(),
            });
        }
        Ok(ReportBundle {
            results: out,
            workspace,
            generated_at: chrono::Utc::now().to_rfc3339(),
            engine_version: crate::ENGINE_VERSION.to_string(),
        })
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write the bundle as pretty JSON with stable key order.
pub fn emit_json(bundle: &ReportBundle, path: &Path) -> Result<(), ReportError> {
    let json = serde_json::to_string_pretty(bundle)
        .map_err(|e| ReportError::Malformed(e.to_string()))?;
    fs::write(path, json).map_err(io_err(path))
}

/// Read a bundle back from JSON.
pub fn read_json(path: &Path) -> Result<ReportBundle, ReportError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    serde_json::from_slice(&bytes).map_err(|e| ReportError::Malformed(e.to_string()))
}

/// Escape text for HTML body and attribute positions.
fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn doc_page_name(suspect_id: &str) -> String {
    let safe: String = suspect_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("doc-{safe}.html")
}

const STYLE: &str = "body{font-family:sans-serif;margin:2em auto;max-width:60em;line-height:1.5}\
mark{background:#ffe08a}mark a{font-size:0.8em;margin-left:0.3em}\
table{border-collapse:collapse}td,th{border:1px solid #999;padding:0.3em 0.8em}\
.alert{color:#fff;background:#c0392b;padding:0.1em 0.5em;border-radius:0.3em}\
.clean{color:#fff;background:#27ae60;padding:0.1em 0.5em;border-radius:0.3em}";

/// Write `index.html` plus one `doc-<id>.html` per suspect, with match
/// areas highlighted and source links at the end of each area.
/// `texts` maps suspect id to its normalized text.
pub fn emit_html(
    bundle: &ReportBundle,
    texts: &BTreeMap<String, String>,
    out_dir: &Path,
) -> Result<(), ReportError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let mut index = String::new();
    index.push_str(&format!(
        "<!DOCTYPE html><html><head><meta charset=\"utf-8\">\
         <title>Detection report</title><style>{STYLE}</style></head><body>\
         <h1>Detection report</h1>\
         <p>Workspace: {} &middot; engine {} &middot; generated {}</p>\
         <table><tr><th>Document</th><th>Plagiarized</th><th>Status</th></tr>",
        escape_html(&bundle.workspace.root),
        escape_html(&bundle.engine_version),
        escape_html(&bundle.generated_at),
    ));
    for r in &bundle.results {
        let badge = if r.alert {
            "<span class=\"alert\">alert</span>"
        } else {
            "<span class=\"clean\">ok</span>"
        };
        index.push_str(&format!(
            "<tr><td><a href=\"{}\">{}</a></td><td>{:.1}%</td><td>{badge}</td></tr>",
            doc_page_name(&r.suspect_id),
            escape_html(&r.suspect_id),
            r.percent_plagiarized,
        ));
    }
    index.push_str("</table></body></html>\n");
    let index_path = out_dir.join("index.html");
    fs::write(&index_path, index).map_err(io_err(&index_path))?;

    for r in &bundle.results {
        let text = texts.get(&r.suspect_id).cloned().unwrap_or_default();
        let page = render_doc_page(r, &text);
        let path = out_dir.join(doc_page_name(&r.suspect_id));
        fs::write(&path, page).map_err(io_err(&path))?;
    }
    Ok(())
}

fn render_doc_page(result: &ReportResult, text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let slice = |span: Span| -> String { chars[span.start.min(chars.len())..span.end.min(chars.len())].iter().collect() };

    let mut body = String::new();
    let mut cursor = 0usize;
    for area in &result.areas {
        if area.start > cursor {
            body.push_str(&escape_html(&slice(Span::new(cursor, area.start))));
        }
        body.push_str("<mark>");
        body.push_str(&escape_html(&slice(Span::new(area.start, area.end))));
        for s in &area.sources {
            body.push_str(&format!(
                "<a href=\"{}\" title=\"edit cost {}\">[{}]</a>",
                escape_html(&s.uri),
                s.edit_cost,
                escape_html(&s.source_id),
            ));
        }
        body.push_str("</mark>");
        cursor = area.end;
    }
    if cursor < chars.len() {
        body.push_str(&escape_html(&slice(Span::new(cursor, chars.len()))));
    }

    format!(
        "<!DOCTYPE html><html><head><meta charset=\"utf-8\"><title>{id}</title>\
         <style>{STYLE}</style></head><body>\
         <p><a href=\"index.html\">&larr; report</a></p>\
         <h1>{id}</h1><p>{pct:.1}% plagiarized &middot; {badge}</p>\
         <p>{body}</p></body></html>\n",
        id = escape_html(&result.suspect_id),
        pct = result.percent_plagiarized,
        badge = if result.alert { "alert" } else { "ok" },
        body = body,
    )
}

/// Convenience: emit both views next to each other. `documents` supplies
/// the suspect texts for highlighting.
pub fn emit_all(
    bundle: &ReportBundle,
    documents: &[Document],
    json_path: &Path,
    html_dir: &Path,
) -> Result<(), ReportError> {
    emit_json(bundle, json_path)?;
    let texts: BTreeMap<String, String> = documents
        .iter()
        .map(|d| (d.id.clone(), d.text.clone()))
        .collect();
    emit_html(bundle, &texts, html_dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::MatchArea;
    use crate::matcher::SpanMatch;
    use crate::textmodel::ingest_plain_text;
    use std::collections::BTreeSet;

    fn result_with_area(text_len: usize, areas: Vec<(usize, usize, Vec<&str>)>) -> DetectionResult {
        let covered: usize = areas.iter().map(|(s, e, _)| e - s).sum();
        DetectionResult {
            suspect_id: "essay one".to_string(),
            areas: areas
                .into_iter()
                .map(|(s, e, sids)| MatchArea {
                    suspect_span: Span::new(s, e),
                    sources: sids
                        .into_iter()
                        .map(|sid| {
                            (
                                sid.to_string(),
                                SpanMatch {
                                    suspect: Span::new(s, e),
                                    source: Span::new(s, e),
                                    edit_cost: 0,
                                },
                            )
                        })
                        .collect(),
                    origin_queries: BTreeSet::new(),
                })
                .collect(),
            percent_plagiarized: covered as f64 / text_len as f64,
            alert: covered * 4 >= text_len,
            per_source_coverage: BTreeMap::new(),
            config_snapshot: EngineConfig::default(),
        }
    }

    fn meta() -> WorkspaceMeta {
        WorkspaceMeta {
            root: "ws".to_string(),
            suspects: 1,
        }
    }

    #[test]
    fn empty_results_serialize_and_parse_back() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = ReportBundle::new(&[], meta(), |_| None).unwrap();
        let path = dir.path().join("results.json");
        emit_json(&bundle, &path).unwrap();
        let parsed = read_json(&path).unwrap();
        assert_eq!(parsed, bundle);
        assert!(parsed.results.is_empty());
    }

    #[test]
    fn round_trip_with_areas() {
        let dir = tempfile::tempdir().unwrap();
        let r = result_with_area(200, vec![(0, 50, vec!["src"])]);
        let bundle =
            ReportBundle::new(&[r], meta(), |sid| Some(format!("sampled/local/{sid}.txt")))
                .unwrap();
        let path = dir.path().join("results.json");
        emit_json(&bundle, &path).unwrap();
        let parsed = read_json(&path).unwrap();
        assert_eq!(parsed, bundle);
        assert_eq!(parsed.results[0].percent_plagiarized, 25.0);
    }

    #[test]
    fn unresolved_source_is_an_error() {
        let r = result_with_area(200, vec![(0, 50, vec!["ghost"])]);
        assert!(matches!(
            ReportBundle::new(&[r], meta(), |_| None),
            Err(ReportError::UnresolvedSource(_))
        ));
    }

    #[test]
    fn percent_formats_to_one_decimal() {
        assert_eq!(percent_1dp(0.9583333), 95.8);
        assert_eq!(percent_1dp(0.9166666), 91.7);
        assert_eq!(percent_1dp(1.0), 100.0);
        assert_eq!(percent_1dp(0.0), 0.0);
        // And it survives JSON round-tripping as the same number.
        let s = serde_json::to_string(&percent_1dp(0.9583333)).unwrap();
        assert_eq!(s, "95.8");
    }

    #[test]
    fn html_pages_written_with_highlights_and_links() {
        let dir = tempfile::tempdir().unwrap();
        let doc = ingest_plain_text(
            "words before the copied stretch of text and words after it".as_bytes(),
            "essay one",
        )
        .unwrap();
        let r = DetectionResult {
            suspect_id: doc.id.clone(),
            ..result_with_area(doc.char_len(), vec![(13, 43, vec!["alpha", "beta"])])
        };
        let bundle = ReportBundle::new(&[r], meta(), |sid| Some(format!("{sid}.txt"))).unwrap();
        let texts = BTreeMap::from([(doc.id.clone(), doc.text.clone())]);
        emit_html(&bundle, &texts, dir.path()).unwrap();

        let index = fs::read_to_string(dir.path().join("index.html")).unwrap();
        assert!(index.contains("essay one"));
        let page = fs::read_to_string(dir.path().join("doc-essay_one.html")).unwrap();
        // Two sources: two links at the end of the highlighted area.
        assert!(page.contains("<mark>"));
        assert!(page.contains("href=\"alpha.txt\""));
        assert!(page.contains("href=\"beta.txt\""));
        let marked = page.split("<mark>").nth(1).unwrap().split("</mark>").next().unwrap();
        assert!(marked.contains("the copied stretch"));
    }

    #[test]
    fn html_escapes_markup_in_text() {
        let dir = tempfile::tempdir().unwrap();
        let text = "dangerous <script> & markup";
        let r = DetectionResult {
            suspect_id: "esc".to_string(),
            ..result_with_area(text.chars().count(), vec![])
        };
        let bundle = ReportBundle::new(&[r], meta(), |_| None).unwrap();
        let texts = BTreeMap::from([("esc".to_string(), text.to_string())]);
        emit_html(&bundle, &texts, dir.path()).unwrap();
        let page = fs::read_to_string(dir.path().join("doc-esc.html")).unwrap();
        assert!(page.contains("&lt;script&gt;"));
        assert!(page.contains("&amp; markup"));
        assert!(!page.contains("dangerous <script>"));
    }

    #[test]
    fn zero_area_document_has_no_highlights() {
        let dir = tempfile::tempdir().unwrap();
        let r = DetectionResult {
            suspect_id: "clean".to_string(),
            ..result_with_area(100, vec![])
        };
        let bundle = ReportBundle::new(&[r], meta(), |_| None).unwrap();
        let texts = BTreeMap::from([("clean".to_string(), "spotless text".to_string())]);
        emit_html(&bundle, &texts, dir.path()).unwrap();
        let page = fs::read_to_string(dir.path().join("doc-clean.html")).unwrap();
        assert!(!page.contains("<mark>"));
    }

    #[test]
    fn highlighted_chars_match_percent_within_rounding() {
        let dir = tempfile::tempdir().unwrap();
        let text: String = vec!["word"; 60].join(" "); // 299 chars
        let len = text.chars().count();
        let r = DetectionResult {
            suspect_id: "frac".to_string(),
            ..result_with_area(len, vec![(0, 90, vec!["s"]), (150, 200, vec!["s"])])
        };
        let bundle = ReportBundle::new(&[r], meta(), |sid| Some(format!("{sid}.txt"))).unwrap();
        emit_json(&bundle, &dir.path().join("r.json")).unwrap();
        let parsed = read_json(&dir.path().join("r.json")).unwrap();
        let highlighted: usize = parsed.results[0].areas.iter().map(|a| a.end - a.start).sum();
        let expected = parsed.results[0].percent_plagiarized / 100.0 * len as f64;
        assert!((highlighted as f64 - expected).abs() < 0.05 * len as f64 / 10.0 + 0.5);
    }
}
