//! Document ingestion, normalization, and tokenization.
//!
//! Every document in the engine — suspect files, corpus files, sampled
//! web sources — is normalized to a canonical text form: no carriage
//! returns, whitespace runs collapsed to single spaces, ends trimmed.
//! Tokens are whitespace-separated words with punctuation attached,
//! carrying character offsets back into the normalized text. All
//! offsets everywhere in the engine refer to this normalized form.

use crate::error::TextError;
use crate::span::Span;
use sha2::{Digest, Sha256};

/// Where a document came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DocumentOrigin {
    Suspect,
    LocalCorpus,
    SampledWeb,
}

/// A whitespace-delimited word. Offsets are character offsets into the
/// owning document's normalized text; `text[start..end)` equals `surface`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }
}

/// A normalized, tokenized document.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: String,
    pub origin: DocumentOrigin,
    pub source_uri: String,
    /// Hex SHA-256 of the ingested raw bytes, for dedup.
    pub raw_bytes_hash: String,
    /// Normalized text.
    pub text: String,
    tokens: Vec<Token>,
    /// Byte offset of each character, plus a final entry = text.len().
    char_to_byte: Vec<usize>,
    /// One-to-one case-folded characters, used for matching.
    canon: Vec<char>,
}

impl Document {
    fn from_normalized(
        id: String,
        origin: DocumentOrigin,
        source_uri: String,
        raw_bytes_hash: String,
        text: String,
    ) -> Result<Self, TextError> {
        if text.is_empty() {
            return Err(TextError::EmptyDocument(id));
        }
        let tokens = tokenize(&text);
        let mut char_to_byte: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        char_to_byte.push(text.len());
        let canon = canonical_fold(&text);
        Ok(Document {
            id,
            origin,
            source_uri,
            raw_bytes_hash,
            text,
            tokens,
            char_to_byte,
            canon,
        })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Length of the normalized text in characters.
    pub fn char_len(&self) -> usize {
        self.char_to_byte.len() - 1
    }

    /// Slice of the normalized text by character span.
    pub fn slice(&self, span: Span) -> &str {
        let b0 = self.char_to_byte[span.start];
        let b1 = self.char_to_byte[span.end];
        &self.text[b0..b1]
    }

    /// Case-folded characters of the whole text (1:1 with characters).
    pub fn canonical(&self) -> &[char] {
        &self.canon
    }

    /// Case-folded characters of a span.
    pub fn canonical_slice(&self, span: Span) -> &[char] {
        &self.canon[span.start..span.end]
    }

    /// Index of the token containing `offset`, or `None` on whitespace.
    /// `offset` may equal the text length (maps to `None`).
    pub fn char_to_token(&self, offset: usize) -> Result<Option<usize>, TextError> {
        let len = self.char_len();
        if offset > len {
            return Err(TextError::OffsetOutOfRange { offset, len });
        }
        // Tokens are sorted and non-overlapping: binary search by start.
        let idx = self.tokens.partition_point(|t| t.start <= offset);
        if idx == 0 {
            return Ok(None);
        }
        let tok = &self.tokens[idx - 1];
        Ok(if offset < tok.end { Some(idx - 1) } else { None })
    }
}

/// One-to-one case fold: each character maps to exactly one folded
/// character, so offsets are preserved. Multi-character lowercase
/// expansions keep their first character only.
pub(crate) fn canonical_fold(text: &str) -> Vec<char> {
    text.chars()
        .map(|c| c.to_lowercase().next().unwrap_or(c))
        .collect()
}

/// Collapse whitespace runs to single spaces and trim the ends.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

/// Split normalized text on whitespace, punctuation attached to its word.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut start = None;
    let mut surface = String::new();
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    surface: std::mem::take(&mut surface),
                    start: s,
                    end: i,
                });
            }
        } else {
            if start.is_none() {
                start = Some(i);
            }
            surface.push(c);
        }
    }
    if let Some(s) = start {
        let end = s + surface.chars().count();
        tokens.push(Token {
            surface,
            start: s,
            end,
        });
    }
    tokens
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Ingest raw bytes as UTF-8 plain text. Invalid sequences are replaced
/// with U+FFFD rather than rejected.
pub fn ingest_plain_text(bytes: &[u8], id: &str) -> Result<Document, TextError> {
    ingest_plain_text_with(bytes, id, DocumentOrigin::Suspect, id)
}

pub fn ingest_plain_text_with(
    bytes: &[u8],
    id: &str,
    origin: DocumentOrigin,
    source_uri: &str,
) -> Result<Document, TextError> {
    let decoded = String::from_utf8_lossy(bytes);
    let text = normalize(&decoded);
    Document::from_normalized(
        id.to_string(),
        origin,
        source_uri.to_string(),
        sha256_hex(bytes),
        text,
    )
}

/// Ingest HTML-like bytes: script/style contents dropped, tags stripped
/// (block-level tags become whitespace), the basic entity set decoded,
/// then normalized as plain text.
pub fn ingest_html(bytes: &[u8], id: &str) -> Result<Document, TextError> {
    ingest_html_with(bytes, id, DocumentOrigin::Suspect, id)
}

pub fn ingest_html_with(
    bytes: &[u8],
    id: &str,
    origin: DocumentOrigin,
    source_uri: &str,
) -> Result<Document, TextError> {
    let decoded = String::from_utf8_lossy(bytes);
    let stripped = strip_html(&decoded);
    let text = normalize(&stripped);
    Document::from_normalized(
        id.to_string(),
        origin,
        source_uri.to_string(),
        sha256_hex(bytes),
        text,
    )
}

/// Tags whose boundaries separate words when stripped.
const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "br", "caption", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "li", "main", "nav", "ol", "option", "p", "pre", "section", "select",
    "table", "tbody", "td", "tfoot", "th", "thead", "title", "tr", "ul",
];

fn is_block_tag(name: &str) -> bool {
    BLOCK_TAGS.binary_search(&name).is_ok()
}

/// Lightweight tag stripper; not a full HTML parser by design.
fn strip_html(html: &str) -> String {
    let chars: Vec<char> = html.chars().collect();
    let n = chars.len();
    let mut out = String::with_capacity(html.len());
    let mut i = 0;

    let starts_with_ci = |pos: usize, pat: &str| -> bool {
        pat.chars()
            .enumerate()
            .all(|(k, p)| chars.get(pos + k).is_some_and(|c| c.eq_ignore_ascii_case(&p)))
    };
    // Find the end of the closing tag `</name ... >` at or after `pos`.
    let find_close = |mut pos: usize, name: &str| -> Option<usize> {
        let pat: String = format!("</{name}");
        while pos < n {
            if starts_with_ci(pos, &pat) {
                let mut j = pos + pat.chars().count();
                while j < n && chars[j] != '>' {
                    j += 1;
                }
                return Some((j + 1).min(n));
            }
            pos += 1;
        }
        None
    };

    while i < n {
        let c = chars[i];
        if c == '<' {
            if starts_with_ci(i, "<!--") {
                // Comment: drop through `-->`, or the rest if unterminated.
                let mut j = i + 4;
                loop {
                    if j + 2 >= n {
                        j = n;
                        break;
                    }
                    if chars[j] == '-' && chars[j + 1] == '-' && chars[j + 2] == '>' {
                        j += 3;
                        break;
                    }
                    j += 1;
                }
                i = j;
                continue;
            }
            let mut dropped_block = false;
            for dropped in ["script", "style"] {
                let pat = format!("<{dropped}");
                let boundary = i + pat.chars().count();
                if starts_with_ci(i, &pat)
                    && chars.get(boundary).is_none_or(|c| !c.is_ascii_alphanumeric())
                {
                    i = find_close(i, dropped).unwrap_or(n);
                    out.push(' ');
                    dropped_block = true;
                    break;
                }
            }
            if dropped_block {
                continue;
            }
            // Ordinary tag: read the name, skip to '>'.
            let mut j = i + 1;
            if j < n && chars[j] == '/' {
                j += 1;
            }
            let name_start = j;
            while j < n && chars[j].is_ascii_alphanumeric() {
                j += 1;
            }
            let name: String = chars[name_start..j]
                .iter()
                .collect::<String>()
                .to_ascii_lowercase();
            while j < n && chars[j] != '>' {
                j += 1;
            }
            if is_block_tag(&name) {
                out.push(' ');
            }
            i = (j + 1).min(n);
        } else if c == '&' {
            let mut decoded = None;
            for (entity, repl) in [
                ("&amp;", '&'),
                ("&lt;", '<'),
                ("&gt;", '>'),
                ("&quot;", '"'),
                ("&nbsp;", ' '),
            ] {
                if starts_with_ci(i, entity) {
                    decoded = Some((repl, entity.len()));
                    break;
                }
            }
            match decoded {
                Some((repl, len)) => {
                    out.push(repl);
                    i += len;
                }
                None => {
                    out.push('&');
                    i += 1;
                }
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}
