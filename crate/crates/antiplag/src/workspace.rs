//! On-disk workspace layout.
//!
//! ```text
//! <root>/
//!   suspects/   input documents under inspection (.txt, .html)
//!   corpus/     local corpus (hermetic detection, provider stand-in)
//!   sampled/    downloaded sources + manifest.json
//!   report/     generated HTML report
//!   index.json  persisted corpus index
//! ```

use crate::error::WorkspaceError;
use crate::textmodel::{ingest_html_with, ingest_plain_text_with, Document, DocumentOrigin};
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn suspects_dir(&self) -> PathBuf {
        self.root.join("suspects")
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.root.join("corpus")
    }

    pub fn sampled_dir(&self) -> PathBuf {
        self.root.join("sampled")
    }

    pub fn report_dir(&self) -> PathBuf {
        self.root.join("report")
    }

    pub fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    pub fn results_path(&self) -> PathBuf {
        self.root.join("results.json")
    }
}

/// Load every `.txt`/`.html`/`.htm` file in a directory as a document.
/// File stems become ids; duplicates are rejected. Deterministic order
/// (sorted by file name).
pub fn load_documents(dir: &Path, origin: DocumentOrigin) -> Result<Vec<Document>, WorkspaceError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|source| WorkspaceError::Io {
            path: dir.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("txt") | Some("html") | Some("htm")
                )
        })
        .collect();
    paths.sort();

    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut docs = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("unnamed")
            .to_string();
        if !seen.insert(id.clone()) {
            return Err(WorkspaceError::DuplicateDocumentId(id));
        }
        let bytes = fs::read(&path).map_err(|source| WorkspaceError::Io {
            path: path.clone(),
            source,
        })?;
        let uri = path.to_string_lossy().into_owned();
        let is_html = matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("html") | Some("htm")
        );
        let doc = if is_html {
            ingest_html_with(&bytes, &id, origin, &uri)?
        } else {
            ingest_plain_text_with(&bytes, &id, origin, &uri)?
        };
        docs.push(doc);
    }
    Ok(docs)
}
