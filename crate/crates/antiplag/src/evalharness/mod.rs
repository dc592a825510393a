//! Evaluation harness: generated test corpora and accuracy tables.
//!
//! The harness reproduces the evaluation protocol at desk scale. Test
//! files fall into three categories — Original (no plagiarism, measures
//! false detections), Web, and Mill (both plagiarized, measure
//! detection) — crossed with four edit types: verbatim copies, minor
//! character-level edits, synonym substitutions, and paraphrases. The
//! sources behind Web and Mill files are planted in the provider corpus
//! before transformation; Original files are drawn from pool sentences
//! that exist in no index. A file counts as correct when an Original
//! file does not alert or a Web/Mill file does.

pub mod textpool;

pub use textpool::TextPool;

use crate::detector::detect_batch;
use crate::error::EvalError;
use crate::report::percent_1dp;
use crate::sampler::EngineConfig;
use crate::searchindex::{build_index, default_gram_width, LocalProvider, SampledSourceStore, SearchProvider};
use crate::textmodel::DocumentOrigin;
use crate::workspace::{load_documents, Workspace};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Original,
    Web,
    Mill,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Original => "Original",
            Category::Web => "Web",
            Category::Mill => "Mill",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EditType {
    Verbatim,
    Edited,
    Synonymous,
    Paraphrased,
}

impl fmt::Display for EditType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EditType::Verbatim => "Verbatim",
            EditType::Edited => "Edited",
            EditType::Synonymous => "Synonymous",
            EditType::Paraphrased => "Paraphrased",
        })
    }
}

/// Shape of the generated test corpus. The default mirrors the
/// evaluated data set: 3 categories × 4 edit types × 4 files × 25
/// sentences = 48 files, 1,200 sentences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestCorpusSpec {
    pub categories: Vec<Category>,
    pub edit_types: Vec<EditType>,
    pub files_per_cell: usize,
    pub sentences_per_file: usize,
    pub rng_seed: u64,
    /// Overrides the bundled lexicon when present.
    pub synonym_lexicon: Option<BTreeMap<String, Vec<String>>>,
}

impl Default for TestCorpusSpec {
    fn default() -> Self {
        TestCorpusSpec {
            categories: vec![Category::Original, Category::Web, Category::Mill],
            edit_types: vec![
                EditType::Verbatim,
                EditType::Edited,
                EditType::Synonymous,
                EditType::Paraphrased,
            ],
            files_per_cell: 4,
            sentences_per_file: 25,
            rng_seed: 42,
            synonym_lexicon: None,
        }
    }
}

impl TestCorpusSpec {
    pub fn cells(&self) -> usize {
        self.categories.len() * self.edit_types.len()
    }

    pub fn total_files(&self) -> usize {
        self.cells() * self.files_per_cell
    }

    pub fn total_sentences(&self) -> usize {
        self.total_files() * self.sentences_per_file
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.categories.is_empty() || self.edit_types.is_empty() {
            return Err(EvalError::BadSpec("no categories or edit types".into()));
        }
        if self.files_per_cell == 0 || self.sentences_per_file == 0 {
            return Err(EvalError::BadSpec(
                "files per cell and sentences per file must be positive".into(),
            ));
        }
        let mut seen = HashSet::new();
        if !self.categories.iter().all(|c| seen.insert(*c)) {
            return Err(EvalError::BadSpec("duplicate category".into()));
        }
        Ok(())
    }
}

/// word → synonyms, case-insensitive on the key.
pub type SynonymLexicon = BTreeMap<String, Vec<String>>;

/// The bundled lexicon (see `lexicon.txt`).
pub fn default_lexicon() -> SynonymLexicon {
    parse_lexicon(include_str!("lexicon.txt"))
}

pub fn parse_lexicon(text: &str) -> SynonymLexicon {
    let mut lex = SynonymLexicon::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((word, rest)) = line.split_once(':') {
            let synonyms: Vec<String> = rest
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if !synonyms.is_empty() {
                lex.insert(word.trim().to_lowercase(), synonyms);
            }
        }
    }
    lex
}

/// Minor character-level alterations: an added space, one substituted
/// letter, a toggled comma, a terminal period replaced by an
/// exclamation mark. One to three are applied; each costs exactly one
/// edit, so the result stays within distance 5 of the original.
pub fn transform_edited(sentence: &str, rng: &mut ChaCha8Rng) -> String {
    let mut ops = [0u8, 1, 2, 3];
    ops.shuffle(rng);
    let count = rng.random_range(1..=3usize);
    let mut chars: Vec<char> = sentence.chars().collect();
    for op in ops.into_iter().take(count) {
        apply_edit_op(op, &mut chars, rng);
    }
    chars.into_iter().collect()
}

fn apply_edit_op(op: u8, chars: &mut Vec<char>, rng: &mut ChaCha8Rng) {
    match op {
        // Insert a space somewhere inside.
        0 if chars.len() >= 2 => {
            let pos = rng.random_range(1..chars.len());
            chars.insert(pos, ' ');
        }
        // Substitute one letter with a different one.
        1 => {
            let letters: Vec<usize> = chars
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_ascii_alphabetic())
                .map(|(i, _)| i)
                .collect();
            if let Some(&pos) = letters.choose(rng) {
                let old = chars[pos];
                let replacement = loop {
                    let c = (b'a' + rng.random_range(0..26u8)) as char;
                    if !c.eq_ignore_ascii_case(&old) {
                        break c;
                    }
                };
                chars[pos] = replacement;
            }
        }
        // Toggle a comma: delete one if present, else add one.
        2 => {
            let commas: Vec<usize> = chars
                .iter()
                .enumerate()
                .filter(|(_, c)| **c == ',')
                .map(|(i, _)| i)
                .collect();
            if let Some(&pos) = commas.choose(rng) {
                chars.remove(pos);
            } else {
                let spaces: Vec<usize> = chars
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c == ' ')
                    .map(|(i, _)| i)
                    .collect();
                if let Some(&pos) = spaces.choose(rng) {
                    chars.insert(pos, ',');
                }
            }
        }
        // Replace a terminal period with an exclamation mark.
        3 if chars.last() == Some(&'.') => {
            let last = chars.len() - 1;
            chars[last] = '!';
        }
        // Fallback when the preferred op does not apply.
        _ => apply_edit_op(1, chars, rng),
    }
}

/// Replace one or two lexicon words with synonyms. Returns the new
/// sentence and whether any replacement happened; a sentence without
/// lexicon words passes through unchanged and flagged.
pub fn transform_synonymous(
    sentence: &str,
    lexicon: &SynonymLexicon,
    rng: &mut ChaCha8Rng,
) -> (String, bool) {
    let mut words: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
    let eligible: Vec<usize> = words
        .iter()
        .enumerate()
        .filter(|(_, w)| lexicon.contains_key(&word_core(w).to_lowercase()))
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return (sentence.to_string(), false);
    }
    let count = rng.random_range(1..=2usize).min(eligible.len());
    let picks: Vec<usize> = eligible.choose_multiple(rng, count).copied().collect();
    for idx in picks {
        let (prefix, core, suffix) = split_word(&words[idx]);
        let synonyms = &lexicon[&core.to_lowercase()];
        let replacement = synonyms.choose(rng).expect("non-empty synonym list");
        let styled = if core.chars().next().is_some_and(char::is_uppercase) {
            let mut cs = replacement.chars();
            match cs.next() {
                Some(f) => f.to_uppercase().collect::<String>() + cs.as_str(),
                None => String::new(),
            }
        } else {
            replacement.clone()
        };
        words[idx] = format!("{prefix}{styled}{suffix}");
    }
    (words.join(" "), true)
}

fn word_core(word: &str) -> &str {
    word.trim_matches(|c: char| !c.is_alphanumeric())
}

fn split_word(word: &str) -> (&str, &str, &str) {
    let start = word
        .find(|c: char| c.is_alphanumeric())
        .unwrap_or(word.len());
    let end = word
        .rfind(|c: char| c.is_alphanumeric())
        .map(|i| i + word[i..].chars().next().unwrap().len_utf8())
        .unwrap_or(word.len());
    (&word[..start], &word[start..end], &word[end..])
}

/// Reorder the sentence — the trailing clause of three to five words
/// moves to the front, as in "the cat sat on the mat" → "on the mat
/// the cat sat" — then apply the synonym and character-level
/// alterations on top.
pub fn transform_paraphrased(
    sentence: &str,
    lexicon: &SynonymLexicon,
    rng: &mut ChaCha8Rng,
) -> Result<String, EvalError> {
    let mut words: Vec<String> = sentence.split_whitespace().map(str::to_string).collect();
    let n = words.len();
    if n < 4 {
        return Err(EvalError::SentenceTooShort {
            sentence: sentence.to_string(),
            min: 4,
        });
    }
    // Keep the terminal punctuation at the end of the reordered sentence.
    let last = words.last_mut().expect("non-empty");
    let mut terminal = String::new();
    while last
        .chars()
        .next_back()
        .is_some_and(|c| !c.is_alphanumeric())
    {
        terminal.insert(0, last.pop().expect("non-empty word"));
    }

    let tail = rng.random_range(3..=5usize);
    let cut = n.saturating_sub(tail).clamp(1, n - 1);
    let mut reordered: Vec<String> = words[cut..].to_vec();
    reordered.extend_from_slice(&words[..cut]);
    let mut reordered = reordered.join(" ");
    reordered.push_str(&terminal);

    let (with_synonyms, _) = transform_synonymous(&reordered, lexicon, rng);
    Ok(transform_edited(&with_synonyms, rng))
}

/// Ground truth for one generated suspect file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub id: String,
    pub category: Category,
    pub edit_type: EditType,
}

/// A generated evaluation workspace on disk.
pub struct GeneratedWorkspace {
    pub workspace: Workspace,
    pub truth: Vec<TruthEntry>,
}

/// Build a workspace under `root`: transformed suspect files under
/// `suspects/`, the pre-transformation sources of Web and Mill files
/// under `corpus/`, and `truth.json`. Original files draw sentences
/// that are written to no index. Deterministic for a given spec.
pub fn build_test_corpus(
    spec: &TestCorpusSpec,
    pool: &TextPool,
    root: &Path,
) -> Result<GeneratedWorkspace, EvalError> {
    spec.validate()?;
    let needed = spec.total_sentences();
    if pool.len() < needed {
        return Err(EvalError::InsufficientSourcePool {
            needed,
            available: pool.len(),
        });
    }
    let lexicon = spec.synonym_lexicon.clone().unwrap_or_else(default_lexicon);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed ^ 0x9E37_79B9_7F4A_7C15);
    let ws = Workspace::new(root);
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source: std::io::Error| EvalError::Io { path, source }
    };
    fs::create_dir_all(ws.suspects_dir()).map_err(io(&ws.suspects_dir()))?;
    fs::create_dir_all(ws.corpus_dir()).map_err(io(&ws.corpus_dir()))?;

    let mut cursor = 0usize;
    let mut draw = |n: usize| -> &[String] {
        let s = &pool.sentences()[cursor..cursor + n];
        cursor += n;
        s
    };

    let mut truth = Vec::with_capacity(spec.total_files());
    let mut web_sources: Vec<String> = Vec::new();
    let mut mill_pending: Vec<String> = Vec::new();
    let mut mill_sources: Vec<String> = Vec::new();

    for &category in &spec.categories {
        for &edit_type in &spec.edit_types {
            for k in 0..spec.files_per_cell {
                let originals = draw(spec.sentences_per_file).to_vec();
                let transformed: Vec<String> = originals
                    .iter()
                    .map(|s| match edit_type {
                        EditType::Verbatim => Ok(s.clone()),
                        EditType::Edited => Ok(transform_edited(s, &mut rng)),
                        EditType::Synonymous => {
                            Ok(transform_synonymous(s, &lexicon, &mut rng).0)
                        }
                        EditType::Paraphrased => transform_paraphrased(s, &lexicon, &mut rng),
                    })
                    .collect::<Result<_, _>>()?;

                let id = format!("{category}_{edit_type}_{:02}", k + 1);
                let path = ws.suspects_dir().join(format!("{id}.txt"));
                fs::write(&path, transformed.join(" ")).map_err(io(&path))?;
                truth.push(TruthEntry {
                    id,
                    category,
                    edit_type,
                });

                let source_text = originals.join(" ");
                match category {
                    Category::Original => {}
                    Category::Web => web_sources.push(source_text),
                    Category::Mill => {
                        mill_pending.push(source_text);
                        // Mill sources are longer, essay-like documents:
                        // two files' worth of sentences each.
                        if mill_pending.len() == 2 {
                            mill_sources.push(mill_pending.join(" "));
                            mill_pending.clear();
                        }
                    }
                }
            }
        }
    }
    if !mill_pending.is_empty() {
        mill_sources.push(mill_pending.join(" "));
    }

    for (i, text) in web_sources.iter().enumerate() {
        let path = ws.corpus_dir().join(format!("web_src_{:02}.txt", i + 1));
        fs::write(&path, text).map_err(io(&path))?;
    }
    for (i, text) in mill_sources.iter().enumerate() {
        let path = ws.corpus_dir().join(format!("mill_src_{:02}.txt", i + 1));
        fs::write(&path, text).map_err(io(&path))?;
    }

    let truth_path = root.join("truth.json");
    let json = serde_json::to_string_pretty(&truth).expect("truth serializes");
    fs::write(&truth_path, json).map_err(io(&truth_path))?;

    Ok(GeneratedWorkspace {
        workspace: ws,
        truth,
    })
}

/// Outcome for one evaluated file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileOutcome {
    pub id: String,
    pub category: Category,
    pub edit_type: EditType,
    /// 0–100, one decimal.
    pub percent: f64,
    pub alert: bool,
    pub correct: bool,
    pub error: Option<String>,
}

/// File-level accuracy per cell, per category, and overall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub config: EngineConfig,
    /// "Category/EditType" → percent of files classified correctly.
    pub per_cell: BTreeMap<String, f64>,
    pub per_category: BTreeMap<String, f64>,
    pub grand_avg: f64,
    pub files: Vec<FileOutcome>,
}

impl AccuracyReport {
    pub fn cell(&self, category: Category, edit_type: EditType) -> Option<f64> {
        self.per_cell.get(&format!("{category}/{edit_type}")).copied()
    }
}

/// Run detection over a generated workspace and score it against the
/// truth file. The provider corpus is whatever `corpus/` holds; the
/// sampled-source store fills `sampled/` exactly as a detection run
/// would.
pub fn run_evaluation(
    ws: &Workspace,
    config: &EngineConfig,
) -> Result<AccuracyReport, EvalError> {
    let truth_path = ws.root().join("truth.json");
    let bytes = fs::read(&truth_path).map_err(|source| EvalError::Io {
        path: truth_path.clone(),
        source,
    })?;
    let truth: Vec<TruthEntry> = serde_json::from_slice(&bytes)
        .map_err(|e| EvalError::BadSpec(format!("truth.json: {e}")))?;
    let by_id: BTreeMap<&str, &TruthEntry> =
        truth.iter().map(|t| (t.id.as_str(), t)).collect();

    let corpus = load_documents(&ws.corpus_dir(), DocumentOrigin::LocalCorpus)?;
    let index = build_index(corpus, default_gram_width(config.window_size));
    let provider = LocalProvider::new(&index);
    let store = SampledSourceStore::open(ws.sampled_dir(), SearchProvider::name(&provider))
        .map_err(crate::error::DetectError::from)?;
    let suspects = load_documents(&ws.suspects_dir(), DocumentOrigin::Suspect)?;

    let results = detect_batch(&suspects, config, &provider, Some(&store));

    let mut files = Vec::with_capacity(results.len());
    for (id, outcome) in results {
        let Some(entry) = by_id.get(id.as_str()) else {
            continue; // stray file, not part of the evaluation
        };
        let expected_alert = entry.category != Category::Original;
        let outcome = match outcome {
            Ok(r) => FileOutcome {
                id,
                category: entry.category,
                edit_type: entry.edit_type,
                percent: percent_1dp(r.percent_plagiarized),
                alert: r.alert,
                correct: r.alert == expected_alert,
                error: None,
            },
            // A failed document counts as incorrect.
            Err(e) => FileOutcome {
                id,
                category: entry.category,
                edit_type: entry.edit_type,
                percent: 0.0,
                alert: false,
                correct: false,
                error: Some(e.to_string()),
            },
        };
        files.push(outcome);
    }
    files.sort_by(|a, b| a.id.cmp(&b.id));

    let mut per_cell: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for f in &files {
        let cell = per_cell
            .entry(format!("{}/{}", f.category, f.edit_type))
            .or_default();
        cell.0 += usize::from(f.correct);
        cell.1 += 1;
    }
    let per_cell: BTreeMap<String, f64> = per_cell
        .into_iter()
        .map(|(k, (ok, n))| (k, percent_1dp(ok as f64 / n as f64)))
        .collect();

    let mut per_category: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (cell, pct) in &per_cell {
        let cat = cell.split('/').next().expect("cell key").to_string();
        per_category.entry(cat).or_default().push(*pct);
    }
    let per_category: BTreeMap<String, f64> = per_category
        .into_iter()
        .map(|(k, v)| (k, round1(v.iter().sum::<f64>() / v.len() as f64)))
        .collect();
    let grand_avg = round1(
        per_cell.values().sum::<f64>() / per_cell.len().max(1) as f64,
    );

    Ok(AccuracyReport {
        config: config.clone(),
        per_cell,
        per_category,
        grand_avg,
        files,
    })
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// One labeled evaluation run, for multi-column reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledReport {
    pub label: String,
    pub report: AccuracyReport,
}

/// Render one aligned table with a column per run, rows per cell plus
/// category and overall averages.
pub fn render_accuracy_table(runs: &[LabeledReport]) -> String {
    let categories: Vec<String> = {
        let mut seen = Vec::new();
        for run in runs {
            for key in run.report.per_cell.keys() {
                let cat = key.split('/').next().expect("cell key").to_string();
                if !seen.contains(&cat) {
                    seen.push(cat);
                }
            }
        }
        // Stable presentation order.
        let order = ["Original", "Web", "Mill"];
        let mut ordered: Vec<String> = order
            .iter()
            .map(|s| s.to_string())
            .filter(|c| seen.contains(c))
            .collect();
        for c in seen {
            if !ordered.contains(&c) {
                ordered.push(c);
            }
        }
        ordered
    };
    let types = ["Verbatim", "Edited", "Synonymous", "Paraphrased"];

    let mut out = String::new();
    out.push_str(&format!("{:<12}{:<14}", "Category", "Type"));
    for run in runs {
        out.push_str(&format!("{:>14}", run.label));
    }
    out.push('\n');
    let fmt_cell = |v: Option<f64>| -> String {
        match v {
            Some(v) => format!("{v:.1}"),
            None => "-".to_string(),
        }
    };
    for cat in &categories {
        let mut first = true;
        for ty in types {
            let key = format!("{cat}/{ty}");
            if !runs.iter().any(|r| r.report.per_cell.contains_key(&key)) {
                continue;
            }
            out.push_str(&format!(
                "{:<12}{:<14}",
                if first { cat.as_str() } else { "" },
                ty
            ));
            for run in runs {
                out.push_str(&format!(
                    "{:>14}",
                    fmt_cell(run.report.per_cell.get(&key).copied())
                ));
            }
            out.push('\n');
            first = false;
        }
        out.push_str(&format!("{:<12}{:<14}", "", "AVERAGE"));
        for run in runs {
            out.push_str(&format!(
                "{:>14}",
                fmt_cell(run.report.per_category.get(cat).copied())
            ));
        }
        out.push('\n');
    }
    out.push_str(&format!("{:<12}{:<14}", "AVERAGE", ""));
    for run in runs {
        out.push_str(&format!("{:>14}", format!("{:.1}", run.report.grand_avg)));
    }
    out.push('\n');
    out
}

/// Render the overall comparison block: one line per run with its
/// average accuracy.
pub fn render_comparison(runs: &[LabeledReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<28}{:>14}\n", "System", "Avg. accuracy"));
    for run in runs {
        out.push_str(&format!(
            "{:<28}{:>14}\n",
            run.label,
            format!("{:.1}", run.report.grand_avg)
        ));
    }
    out
}

/// End-to-end: generate the corpus for `spec` under `root` (a fresh
/// pool is derived from the spec seed) and evaluate it under `config`.
pub fn generate_and_evaluate(
    spec: &TestCorpusSpec,
    root: &Path,
    config: &EngineConfig,
) -> Result<AccuracyReport, EvalError> {
    let pool = TextPool::generate(spec.rng_seed, spec.total_sentences());
    build_test_corpus(spec, &pool, root)?;
    run_evaluation(&Workspace::new(root), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::edit_distance;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn edited_stays_within_distance_five() {
        let mut r = rng(1);
        let pool = TextPool::generate(2, 200);
        let mut distances = Vec::new();
        for s in pool.sentences().iter().cycle().take(1000) {
            let edited = transform_edited(s, &mut r);
            let d = edit_distance(s, &edited);
            assert!(d >= 1, "no edit applied: {edited}");
            assert!(d <= 5, "distance {d} too large: {edited}");
            distances.push(d);
        }
        assert!(distances.iter().any(|&d| d >= 2));
    }

    #[test]
    fn edited_example_shapes() {
        let mut r = rng(7);
        // Over many draws the period swap must appear.
        let mut saw_bang = false;
        for _ in 0..50 {
            let out = transform_edited("Hello there.", &mut r);
            if out.ends_with('!') {
                saw_bang = true;
            }
        }
        assert!(saw_bang);
    }

    #[test]
    fn synonymous_replaces_lexicon_words() {
        let mut r = rng(3);
        let lex: SynonymLexicon =
            BTreeMap::from([("big".to_string(), vec!["large".to_string()])]);
        let (out, replaced) = transform_synonymous("a big dog", &lex, &mut r);
        assert!(replaced);
        assert_eq!(out, "a large dog");
    }

    #[test]
    fn synonymous_without_eligible_words_is_flagged() {
        let mut r = rng(4);
        let lex = default_lexicon();
        let (out, replaced) = transform_synonymous("zzz yyy xxx", &lex, &mut r);
        assert!(!replaced);
        assert_eq!(out, "zzz yyy xxx");
    }

    #[test]
    fn synonymous_word_hamming_is_one_or_two() {
        let mut r = rng(5);
        let lex = default_lexicon();
        let pool = TextPool::generate(6, 300);
        let mut eligible_seen = 0;
        for s in pool.sentences() {
            let (out, replaced) = transform_synonymous(s, &lex, &mut r);
            if !replaced {
                continue;
            }
            eligible_seen += 1;
            let a: Vec<&str> = s.split_whitespace().collect();
            let b: Vec<&str> = out.split_whitespace().collect();
            assert_eq!(a.len(), b.len());
            let diff = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            assert!((1..=2).contains(&diff), "{s} -> {out}");
        }
        assert!(eligible_seen > 200, "lexicon coverage too thin");
    }

    #[test]
    fn synonymous_preserves_capitalization_and_punctuation() {
        let mut r = rng(6);
        let lex: SynonymLexicon =
            BTreeMap::from([("quick".to_string(), vec!["rapid".to_string()])]);
        let (out, _) = transform_synonymous("Quick, march", &lex, &mut r);
        assert_eq!(out, "Rapid, march");
    }

    #[test]
    fn paraphrase_rotates_trailing_clause_to_front() {
        let lex = SynonymLexicon::new();
        let mut saw_canonical = false;
        for seed in 0..50 {
            let mut r = rng(seed);
            let out = transform_paraphrased("the cat sat on the mat", &lex, &mut r).unwrap();
            assert_ne!(out, "the cat sat on the mat");
            // With a tail draw of 3 and gentle edits the canonical
            // rotation appears verbatim up to the edits.
            if out.starts_with("on the mat") || out.starts_with("on  the mat") {
                saw_canonical = true;
            }
        }
        assert!(saw_canonical);
    }

    #[test]
    fn paraphrase_rejects_short_sentences() {
        let lex = SynonymLexicon::new();
        let mut r = rng(1);
        assert!(matches!(
            transform_paraphrased("too short here", &lex, &mut r),
            Err(EvalError::SentenceTooShort { .. })
        ));
    }

    #[test]
    fn paraphrase_always_changes_word_order() {
        let cores = |text: &str| -> Vec<String> {
            text.split_whitespace()
                .map(|w| word_core(w).to_lowercase())
                .collect()
        };
        let lex = default_lexicon();
        let pool = TextPool::generate(8, 200);
        let mut r = rng(9);
        for s in pool.sentences() {
            let out = transform_paraphrased(s, &lex, &mut r).unwrap();
            // Rotation moves a clause: the core sequence is reordered,
            // not merely edited in place.
            assert_ne!(cores(s), cores(&out), "{s} -> {out}");
            assert_ne!(out, *s);
        }
    }

    #[test]
    fn paraphrase_keeps_most_tokens() {
        // Multiset intersection over punctuation-stripped lowercase
        // cores: reordering preserves everything, synonym swaps and
        // character edits lose a handful.
        let cores = |text: &str| -> Vec<String> {
            text.split_whitespace()
                .map(|w| word_core(w).to_lowercase())
                .collect()
        };
        let lex = default_lexicon();
        let pool = TextPool::generate(10, 200);
        let mut r = rng(11);
        for s in pool.sentences() {
            let out = transform_paraphrased(s, &lex, &mut r).unwrap();
            let mut orig = cores(s);
            let out_cores = cores(&out);
            let total = out_cores.len();
            let mut kept = 0usize;
            for w in out_cores {
                if let Some(i) = orig.iter().position(|o| *o == w) {
                    orig.remove(i);
                    kept += 1;
                }
            }
            assert!(
                kept as f64 >= 0.6 * total as f64,
                "only {kept}/{total} tokens kept: {s} -> {out}"
            );
        }
    }

    #[test]
    fn corpus_build_counts_match_table_shape() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TestCorpusSpec::default();
        assert_eq!(spec.total_files(), 48);
        assert_eq!(spec.total_sentences(), 1200);
        let pool = TextPool::generate(spec.rng_seed, spec.total_sentences());
        let gen = build_test_corpus(&spec, &pool, dir.path()).unwrap();
        assert_eq!(gen.truth.len(), 48);
        let suspect_files = fs::read_dir(gen.workspace.suspects_dir()).unwrap().count();
        assert_eq!(suspect_files, 48);
        // 16 web sources (one per Web file), 8 mill sources (one per
        // two Mill files).
        let corpus_files: Vec<String> = fs::read_dir(gen.workspace.corpus_dir())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(corpus_files.iter().filter(|f| f.starts_with("web_")).count(), 16);
        assert_eq!(corpus_files.iter().filter(|f| f.starts_with("mill_")).count(), 8);
    }

    #[test]
    fn original_files_share_no_sentence_with_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TestCorpusSpec {
            files_per_cell: 2,
            sentences_per_file: 6,
            ..TestCorpusSpec::default()
        };
        let pool = TextPool::generate(3, spec.total_sentences());
        let gen = build_test_corpus(&spec, &pool, dir.path()).unwrap();
        let mut corpus_text = String::new();
        for entry in fs::read_dir(gen.workspace.corpus_dir()).unwrap() {
            corpus_text.push_str(&fs::read_to_string(entry.unwrap().path()).unwrap());
            corpus_text.push(' ');
        }
        for t in gen.truth.iter().filter(|t| t.category == Category::Original) {
            let text = fs::read_to_string(
                gen.workspace.suspects_dir().join(format!("{}.txt", t.id)),
            )
            .unwrap();
            // Verbatim originals are raw pool sentences; check each.
            if t.edit_type == EditType::Verbatim {
                for sentence in text.split_inclusive('.') {
                    let sentence = sentence.trim();
                    if sentence.len() > 10 {
                        assert!(
                            !corpus_text.contains(sentence),
                            "original sentence leaked into corpus: {sentence}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn corpus_build_is_deterministic() {
        let spec = TestCorpusSpec {
            files_per_cell: 1,
            sentences_per_file: 5,
            ..TestCorpusSpec::default()
        };
        let pool = TextPool::generate(spec.rng_seed, spec.total_sentences());
        let snapshot = |root: &Path| -> BTreeMap<String, String> {
            let mut map = BTreeMap::new();
            for sub in ["suspects", "corpus"] {
                for entry in fs::read_dir(root.join(sub)).unwrap() {
                    let p = entry.unwrap().path();
                    map.insert(
                        format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()),
                        fs::read_to_string(&p).unwrap(),
                    );
                }
            }
            map
        };
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        build_test_corpus(&spec, &pool, d1.path()).unwrap();
        build_test_corpus(&spec, &pool, d2.path()).unwrap();
        assert_eq!(snapshot(d1.path()), snapshot(d2.path()));
    }

    #[test]
    fn insufficient_pool_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TestCorpusSpec::default();
        let pool = TextPool::generate(1, 10);
        assert!(matches!(
            build_test_corpus(&spec, &pool, dir.path()),
            Err(EvalError::InsufficientSourcePool { .. })
        ));
    }

    #[test]
    fn small_evaluation_smoke() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TestCorpusSpec {
            categories: vec![Category::Original, Category::Web],
            edit_types: vec![EditType::Verbatim],
            files_per_cell: 2,
            sentences_per_file: 6,
            rng_seed: 5,
            synonym_lexicon: None,
        };
        let report =
            generate_and_evaluate(&spec, dir.path(), &EngineConfig::default()).unwrap();
        assert_eq!(report.cell(Category::Original, EditType::Verbatim), Some(100.0));
        assert_eq!(report.cell(Category::Web, EditType::Verbatim), Some(100.0));
        assert_eq!(report.grand_avg, 100.0);
        // Store was populated by sampling.
        assert!(dir.path().join("sampled/manifest.json").exists());
    }

    #[test]
    fn all_original_workspace_never_alerts() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TestCorpusSpec {
            categories: vec![Category::Original],
            edit_types: vec![
                EditType::Verbatim,
                EditType::Edited,
                EditType::Synonymous,
                EditType::Paraphrased,
            ],
            files_per_cell: 1,
            sentences_per_file: 6,
            rng_seed: 8,
            synonym_lexicon: None,
        };
        let report =
            generate_and_evaluate(&spec, dir.path(), &EngineConfig::default()).unwrap();
        assert_eq!(report.grand_avg, 100.0);
        for f in &report.files {
            assert!(!f.alert, "false alert on {}", f.id);
        }
    }

    #[test]
    fn table_rendering_shape() {
        let dir = tempfile::tempdir().unwrap();
        let spec = TestCorpusSpec {
            categories: vec![Category::Web],
            edit_types: vec![EditType::Verbatim],
            files_per_cell: 1,
            sentences_per_file: 6,
            rng_seed: 2,
            synonym_lexicon: None,
        };
        let report =
            generate_and_evaluate(&spec, dir.path(), &EngineConfig::default()).unwrap();
        let runs = vec![LabeledReport {
            label: "W=5, S=6".to_string(),
            report,
        }];
        let table = render_accuracy_table(&runs);
        assert!(table.contains("W=5, S=6"));
        assert!(table.contains("Web"));
        assert!(table.contains("Verbatim"));
        assert!(table.contains("AVERAGE"));
        let cmp = render_comparison(&runs);
        assert!(cmp.contains("Avg. accuracy"));
        assert!(cmp.contains("100.0"));
    }
}
