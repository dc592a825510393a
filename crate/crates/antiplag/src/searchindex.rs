//! Exact-phrase search providers and the sampled-source store.
//!
//! Web search engines only answer exact-phrase queries, so the provider
//! abstraction exposes exactly that: given a phrase, return the sources
//! containing it verbatim (case-insensitively). The reference provider
//! is a local inverted n-gram index; the trait admits remote providers
//! but none ships. Sources that answer often enough are copied into the
//! sampled-source store — the "local database" the hermetic search runs
//! against.

use crate::error::{ProviderError, StoreError};
use crate::matcher::canonicalize;
use crate::span::Span;
use crate::textmodel::{ingest_plain_text_with, Document, DocumentOrigin};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// One occurrence of a queried phrase in a provider's source.
///
/// Offsets are populated by the local provider; an opaque remote
/// provider may omit them, in which case the detector locates the
/// phrase after download.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHit {
    pub source_id: String,
    pub source_uri: String,
    pub span: Option<Span>,
}

/// Anything that can answer exact-phrase queries and hand over the
/// matching documents.
pub trait SearchProvider: Send + Sync {
    fn name(&self) -> &str;
    /// At most `max_hits` hits, deterministically ordered.
    fn search(&self, phrase: &str, max_hits: usize) -> Result<Vec<SearchHit>, ProviderError>;
    /// "Download" a source for local storage and hermetic analysis.
    fn fetch(&self, source_id: &str) -> Result<Document, ProviderError>;
}

/// Validate and dispatch one provider query, truncating to `max_hits`.
pub fn provider_search(
    provider: &dyn SearchProvider,
    phrase: &str,
    max_hits: usize,
) -> Result<Vec<SearchHit>, ProviderError> {
    if phrase.split_whitespace().next().is_none() {
        return Err(ProviderError::QueryRejected("empty phrase".into()));
    }
    let mut hits = provider.search(phrase, max_hits)?;
    hits.truncate(max_hits);
    Ok(hits)
}

type Posting = (u32, u32); // (document index, token position)

/// Immutable inverted index over token n-grams of a corpus.
pub struct PhraseIndex {
    gram_width: usize,
    docs: Vec<IndexedDoc>,
    by_id: HashMap<String, usize>,
    postings: HashMap<String, Vec<Posting>>,
}

struct IndexedDoc {
    doc: Document,
    /// Case-folded token surfaces, parallel to `doc.tokens()`.
    canon_tokens: Vec<String>,
}

/// Default posting key width for a given query window size: keys
/// shorter than the window keep the map small, and intersection plus
/// verification restores exactness for any W >= 1.
pub fn default_gram_width(window_size: usize) -> usize {
    window_size.clamp(1, 3)
}

/// Build the index; postings cover every token n-gram of every corpus
/// document.
pub fn build_index(corpus: Vec<Document>, gram_width: usize) -> PhraseIndex {
    let gram_width = gram_width.max(1);
    let mut docs = Vec::with_capacity(corpus.len());
    let mut by_id = HashMap::new();
    let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
    for doc in corpus {
        let canon_tokens: Vec<String> = doc
            .tokens()
            .iter()
            .map(|t| canonicalize(&t.surface))
            .collect();
        let doc_idx = docs.len() as u32;
        debug_assert!(
            !by_id.contains_key(&doc.id),
            "duplicate document id {}",
            doc.id
        );
        by_id.insert(doc.id.clone(), docs.len());
        if canon_tokens.len() >= gram_width {
            for pos in 0..=canon_tokens.len() - gram_width {
                let key = canon_tokens[pos..pos + gram_width].join(" ");
                postings.entry(key).or_default().push((doc_idx, pos as u32));
            }
        }
        docs.push(IndexedDoc { doc, canon_tokens });
    }
    PhraseIndex {
        gram_width,
        docs,
        by_id,
        postings,
    }
}

impl PhraseIndex {
    pub fn gram_width(&self) -> usize {
        self.gram_width
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| &self.docs[i].doc)
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.docs.iter().map(|d| &d.doc)
    }

    #[cfg(test)]
    fn posting_keys(&self) -> Vec<&str> {
        let mut keys: Vec<&str> = self.postings.keys().map(|k| k.as_str()).collect();
        keys.sort_unstable();
        keys
    }

    /// All occurrences of the phrase across the corpus: candidate
    /// postings are intersected on the first and last covering n-gram,
    /// then verified token by token against the source. Phrases shorter
    /// than the gram width fall back to a linear scan, so W=1 or W=2
    /// configurations still work.
    pub fn phrase_search(&self, phrase: &str) -> Vec<SearchHit> {
        let wanted: Vec<String> = phrase.split_whitespace().map(canonicalize).collect();
        if wanted.is_empty() {
            return Vec::new();
        }
        let mut hits = if wanted.len() < self.gram_width {
            self.scan_search(&wanted)
        } else {
            self.posting_search(&wanted)
        };
        hits.sort_by(|a, b| {
            (a.source_id.as_str(), a.span.map(|s| s.start))
                .cmp(&(b.source_id.as_str(), b.span.map(|s| s.start)))
        });
        hits
    }

    fn posting_search(&self, wanted: &[String]) -> Vec<SearchHit> {
        let g = self.gram_width;
        let first_key = wanted[..g].join(" ");
        let Some(first) = self.postings.get(&first_key) else {
            return Vec::new();
        };
        let mut candidates: Vec<Posting> = first.clone();
        let last_off = wanted.len() - g;
        if last_off > 0 {
            let last_key = wanted[last_off..].join(" ");
            let Some(last) = self.postings.get(&last_key) else {
                return Vec::new();
            };
            let last_set: std::collections::HashSet<Posting> = last.iter().copied().collect();
            candidates.retain(|&(doc, pos)| last_set.contains(&(doc, pos + last_off as u32)));
        }
        candidates
            .into_iter()
            .filter_map(|(doc_idx, pos)| {
                let entry = &self.docs[doc_idx as usize];
                let pos = pos as usize;
                let end = pos + wanted.len();
                if end <= entry.canon_tokens.len()
                    && entry.canon_tokens[pos..end]
                        .iter()
                        .zip(wanted)
                        .all(|(a, b)| a == b)
                {
                    Some(self.hit(entry, pos, wanted.len()))
                } else {
                    None
                }
            })
            .collect()
    }

    fn scan_search(&self, wanted: &[String]) -> Vec<SearchHit> {
        let mut hits = Vec::new();
        for entry in &self.docs {
            if entry.canon_tokens.len() < wanted.len() {
                continue;
            }
            for pos in 0..=entry.canon_tokens.len() - wanted.len() {
                if entry.canon_tokens[pos..pos + wanted.len()]
                    .iter()
                    .zip(wanted)
                    .all(|(a, b)| a == b)
                {
                    hits.push(self.hit(entry, pos, wanted.len()));
                }
            }
        }
        hits
    }

    fn hit(&self, entry: &IndexedDoc, pos: usize, len: usize) -> SearchHit {
        let tokens = entry.doc.tokens();
        SearchHit {
            source_id: entry.doc.id.clone(),
            source_uri: entry.doc.source_uri.clone(),
            span: Some(Span::new(tokens[pos].start, tokens[pos + len - 1].end)),
        }
    }

    /// Persist the corpus snapshot; postings are rebuilt on load.
    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        let file = IndexFile {
            gram_width: self.gram_width,
            docs: self
                .docs
                .iter()
                .map(|d| DocRecord {
                    id: d.doc.id.clone(),
                    uri: d.doc.source_uri.clone(),
                    text: d.doc.text.clone(),
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&file).expect("index serializes");
        write_atomic(path, json.as_bytes()).map_err(|source| StoreError::StorageFailure {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<PhraseIndex, StoreError> {
        let bytes = fs::read(path).map_err(|source| StoreError::StorageFailure {
            path: path.to_path_buf(),
            source,
        })?;
        let file: IndexFile = serde_json::from_slice(&bytes)
            .map_err(|e| StoreError::ManifestCorrupt(format!("index file: {e}")))?;
        let docs = file
            .docs
            .into_iter()
            .map(|r| {
                ingest_plain_text_with(r.text.as_bytes(), &r.id, DocumentOrigin::LocalCorpus, &r.uri)
                    .map_err(|e| StoreError::ManifestCorrupt(format!("doc {}: {e}", r.id)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(build_index(docs, file.gram_width))
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    gram_width: usize,
    docs: Vec<DocRecord>,
}

#[derive(Serialize, Deserialize)]
struct DocRecord {
    id: String,
    uri: String,
    text: String,
}

/// The reference provider: a borrowed local phrase index standing in
/// for a web search engine.
pub struct LocalProvider<'a> {
    index: &'a PhraseIndex,
    name: String,
}

impl<'a> LocalProvider<'a> {
    pub fn new(index: &'a PhraseIndex) -> Self {
        LocalProvider {
            index,
            name: "local".to_string(),
        }
    }

    pub fn named(index: &'a PhraseIndex, name: impl Into<String>) -> Self {
        LocalProvider {
            index,
            name: name.into(),
        }
    }
}

impl SearchProvider for LocalProvider<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn search(&self, phrase: &str, max_hits: usize) -> Result<Vec<SearchHit>, ProviderError> {
        let mut hits = self.index.phrase_search(phrase);
        hits.truncate(max_hits);
        Ok(hits)
    }

    fn fetch(&self, source_id: &str) -> Result<Document, ProviderError> {
        self.index
            .document(source_id)
            .cloned()
            .ok_or_else(|| ProviderError::UnknownSource(source_id.to_string()))
    }
}

/// Manifest row for one stored source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub uri: String,
    pub id: String,
    pub sha256: String,
    pub fetched_at: String,
}

/// On-disk store of sampled sources: normalized plain text under
/// `<root>/<provider>/<id>.txt` plus `<root>/manifest.json`.
///
/// Writes are serialized internally; sharing `&SampledSourceStore`
/// across threads is safe.
pub struct SampledSourceStore {
    root: PathBuf,
    provider: String,
    manifest: Mutex<BTreeMap<String, ManifestEntry>>,
}

impl SampledSourceStore {
    /// Open (or create) a store rooted at `root` for the named provider.
    pub fn open(root: impl Into<PathBuf>, provider: impl Into<String>) -> Result<Self, StoreError> {
        let root = root.into();
        let manifest_path = root.join("manifest.json");
        let manifest = if manifest_path.exists() {
            let bytes = fs::read(&manifest_path).map_err(|source| StoreError::StorageFailure {
                path: manifest_path.clone(),
                source,
            })?;
            let entries: Vec<ManifestEntry> = serde_json::from_slice(&bytes)
                .map_err(|e| StoreError::ManifestCorrupt(e.to_string()))?;
            entries.into_iter().map(|e| (e.uri.clone(), e)).collect()
        } else {
            BTreeMap::new()
        };
        Ok(SampledSourceStore {
            root,
            provider: provider.into(),
            manifest: Mutex::new(manifest),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Persist one source document. Idempotent per content digest: a
    /// source already stored with identical text is a no-op.
    pub fn store(&self, source: &Document) -> Result<String, StoreError> {
        let digest = sha256_hex(source.text.as_bytes());
        let mut manifest = self.manifest.lock().expect("store lock");
        if let Some(entry) = manifest.get(&source.source_uri) {
            if entry.sha256 == digest {
                return Ok(entry.id.clone());
            }
        }
        let id = digest[..16].to_string();
        let dir = self.root.join(&self.provider);
        fs::create_dir_all(&dir).map_err(|source| StoreError::StorageFailure {
            path: dir.clone(),
            source,
        })?;
        let path = dir.join(format!("{id}.txt"));
        if !path.exists() {
            fs::write(&path, source.text.as_bytes()).map_err(|source| {
                StoreError::StorageFailure {
                    path: path.clone(),
                    source,
                }
            })?;
        }
        manifest.insert(
            source.source_uri.clone(),
            ManifestEntry {
                uri: source.source_uri.clone(),
                id: id.clone(),
                sha256: digest,
                fetched_at: chrono::Utc::now().to_rfc3339(),
            },
        );
        self.persist_manifest(&manifest)?;
        Ok(id)
    }

    fn persist_manifest(
        &self,
        manifest: &BTreeMap<String, ManifestEntry>,
    ) -> Result<(), StoreError> {
        fs::create_dir_all(&self.root).map_err(|source| StoreError::StorageFailure {
            path: self.root.clone(),
            source,
        })?;
        let entries: Vec<&ManifestEntry> = manifest.values().collect();
        let json = serde_json::to_string_pretty(&entries).expect("manifest serializes");
        let path = self.root.join("manifest.json");
        write_atomic(&path, json.as_bytes())
            .map_err(|source| StoreError::StorageFailure { path, source })
    }

    /// Reload a stored source; text round-trips byte-identically.
    pub fn load_source(&self, id: &str) -> Result<Document, StoreError> {
        let entry = self
            .entry_for_id(id)
            .ok_or_else(|| StoreError::UnknownId(id.to_string()))?;
        let path = self.root.join(&self.provider).join(format!("{id}.txt"));
        let bytes = fs::read(&path).map_err(|source| StoreError::StorageFailure {
            path: path.clone(),
            source,
        })?;
        ingest_plain_text_with(&bytes, id, DocumentOrigin::SampledWeb, &entry.uri)
            .map_err(|e| StoreError::ManifestCorrupt(format!("stored source {id}: {e}")))
    }

    pub fn entries(&self) -> Vec<ManifestEntry> {
        self.manifest
            .lock()
            .expect("store lock")
            .values()
            .cloned()
            .collect()
    }

    pub fn entry_for_id(&self, id: &str) -> Option<ManifestEntry> {
        self.manifest
            .lock()
            .expect("store lock")
            .values()
            .find(|e| e.id == id)
            .cloned()
    }

    /// Manifest entry for the original location a source was fetched
    /// from; this is how a provider-scoped source id maps back to its
    /// stored copy.
    pub fn entry_for_uri(&self, uri: &str) -> Option<ManifestEntry> {
        self.manifest.lock().expect("store lock").get(uri).cloned()
    }

    /// Path of a stored source relative to the store root, for report links.
    pub fn relative_path(&self, id: &str) -> String {
        format!("{}/{id}.txt", self.provider)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}
