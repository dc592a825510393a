//! Hermetic matching core: exact and edit-distance string search.
//!
//! All comparisons are case-folded one character to one character, so
//! every reported offset is valid in the original text. Whitespace is
//! already collapsed by normalization upstream.
//!
//! `approx_find` implements semi-global alignment: the pattern must be
//! consumed entirely, the text span is free at both ends. For every end
//! position in the text it keeps the cheapest match (ties broken toward
//! the leftmost start), then discards matches overlapped by a strictly
//! cheaper one. Under this rule a zero budget reduces exactly to
//! substring search and raising the budget only ever adds matches.

use crate::span::Span;
use crate::textmodel::{canonical_fold, Document};
use serde::{Deserialize, Serialize};

/// An aligned pair of spans: one in the suspect document, one in a
/// source, with the edit cost between their folded texts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanMatch {
    pub suspect: Span,
    pub source: Span,
    pub edit_cost: usize,
}

/// Which side of a span to grow during expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
    Both,
}

/// Case-folded copy of a string (1:1 per character).
pub fn canonicalize(text: &str) -> String {
    canonical_fold(text).into_iter().collect()
}

/// Unit-cost Levenshtein distance under case folding. Zero iff the two
/// strings are canonically equal.
pub fn edit_distance(a: &str, b: &str) -> usize {
    edit_distance_chars(&canonical_fold(a), &canonical_fold(b))
}

/// Levenshtein distance over already-folded character slices.
pub fn edit_distance_chars(a: &[char], b: &[char]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0usize; short.len() + 1];
    for (j, &lc) in long.iter().enumerate() {
        cur[0] = j + 1;
        for i in 1..=short.len() {
            let sub = prev[i - 1] + usize::from(short[i - 1] != lc);
            cur[i] = sub.min(prev[i] + 1).min(cur[i - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Levenshtein distance if it does not exceed `bound`, else `None`.
/// Cheaper than the full distance for large, mostly-equal spans.
pub fn edit_distance_bounded(a: &str, b: &str, bound: usize) -> Option<usize> {
    edit_distance_bounded_chars(&canonical_fold(a), &canonical_fold(b), bound)
}

/// Banded two-row dynamic program: only cells within `bound` of the
/// main diagonal can contribute to a distance <= bound, so the cost is
/// O(len × bound) rather than O(len²).
pub fn edit_distance_bounded_chars(a: &[char], b: &[char], bound: usize) -> Option<usize> {
    if a.len().abs_diff(b.len()) > bound {
        return None;
    }
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return Some(long.len()).filter(|d| *d <= bound);
    }
    let (m, n) = (short.len(), long.len());
    const INF: usize = usize::MAX / 2;
    // Row j covers columns i with |i - j| <= bound (plus the length
    // difference absorbed by the initial abs_diff check).
    let mut prev = vec![INF; m + 1];
    let mut cur = vec![INF; m + 1];
    for (i, cell) in prev.iter_mut().enumerate().take(bound.min(m) + 1) {
        *cell = i;
    }
    for j in 1..=n {
        let lo = j.saturating_sub(bound).max(1);
        let hi = (j + bound).min(m);
        if lo > hi {
            return None;
        }
        cur[lo - 1] = if lo == 1 { j } else { INF };
        let lc = long[j - 1];
        let mut row_min = cur[lo - 1];
        for i in lo..=hi {
            let sub = prev[i - 1] + usize::from(short[i - 1] != lc);
            let del = if prev[i] == INF { INF } else { prev[i] + 1 };
            let ins = if cur[i - 1] == INF { INF } else { cur[i - 1] + 1 };
            cur[i] = sub.min(del).min(ins);
            row_min = row_min.min(cur[i]);
        }
        if hi < m {
            cur[hi + 1] = INF;
        }
        if row_min > bound {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[m]).filter(|d| *d <= bound)
}

/// First occurrence of `needle` in `haystack`, by index.
pub(crate) fn find_exact(haystack: &[char], needle: &[char]) -> Option<usize> {
    let (n, m) = (haystack.len(), needle.len());
    if m == 0 || m > n {
        return None;
    }
    let first = needle[0];
    (0..=n - m).find(|&i| haystack[i] == first && haystack[i..i + m] == *needle)
}

/// All occurrences of the pattern in the text with edit cost within
/// `budget`, case-folded. Matches are `SpanMatch`es whose suspect side
/// is the whole pattern in pattern-local coordinates and whose source
/// side is text-local; callers rebase into document coordinates.
pub fn approx_find(pattern: &str, text: &str, budget: usize) -> Vec<SpanMatch> {
    approx_find_chars(&canonical_fold(pattern), &canonical_fold(text), budget)
}

/// `approx_find` over already-folded slices.
pub fn approx_find_chars(pattern: &[char], text: &[char], budget: usize) -> Vec<SpanMatch> {
    let m = pattern.len();
    let n = text.len();
    if m == 0 {
        return Vec::new();
    }

    // Semi-global DP, column per text position. d[i] = cheapest cost of
    // aligning pattern[..i] against text[s..j] over any start s; s[i]
    // tracks the smallest such start.
    let mut d: Vec<usize> = (0..=m).collect();
    let mut starts: Vec<usize> = vec![0; m + 1];
    let mut nd = vec![0usize; m + 1];
    let mut nstarts = vec![0usize; m + 1];

    // (start, end, cost) candidates, one per qualifying end position.
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();

    for j in 1..=n {
        nd[0] = 0;
        nstarts[0] = j;
        let tc = text[j - 1];
        for i in 1..=m {
            let sub = usize::from(pattern[i - 1] != tc);
            let diag = d[i - 1] + sub;
            let left = d[i] + 1;
            let up = nd[i - 1] + 1;
            let best = diag.min(left).min(up);
            let mut best_start = usize::MAX;
            if diag == best {
                best_start = best_start.min(starts[i - 1]);
            }
            if left == best {
                best_start = best_start.min(starts[i]);
            }
            if up == best {
                best_start = best_start.min(nstarts[i - 1]);
            }
            nd[i] = best;
            nstarts[i] = best_start;
        }
        std::mem::swap(&mut d, &mut nd);
        std::mem::swap(&mut starts, &mut nstarts);
        if d[m] <= budget && starts[m] < j {
            candidates.push((starts[m], j, d[m]));
        }
    }

    // A match overlapped by a strictly cheaper match is noise around
    // that better occurrence.
    let kept: Vec<(usize, usize, usize)> = candidates
        .iter()
        .filter(|&&(s, e, c)| {
            !candidates
                .iter()
                .any(|&(s2, e2, c2)| c2 < c && s2 < e && s < e2)
        })
        .copied()
        .collect();

    kept.into_iter()
        .map(|(s, e, c)| SpanMatch {
            suspect: Span::new(0, m),
            source: Span::new(s, e),
            edit_cost: c,
        })
        .collect()
}

/// Grow a seed span by `step_chars` in the given direction(s), clipped
/// at the document bounds, and realign it against the source in a
/// window around the seed's source span. Succeeds iff the grown span
/// matches some source span within floor(edit_ratio × grown length)
/// edits; the result strictly contains the seed's suspect span.
pub fn extend_match(
    suspect: &Document,
    source: &Document,
    seed: &SpanMatch,
    direction: Direction,
    step_chars: usize,
    edit_ratio: f64,
) -> Option<SpanMatch> {
    let step = step_chars.max(1);
    let (grow_left, grow_right) = match direction {
        Direction::Left => (step, 0),
        Direction::Right => (0, step),
        Direction::Both => (step, step),
    };
    let new_start = seed.suspect.start.saturating_sub(grow_left);
    let new_end = (seed.suspect.end + grow_right).min(suspect.char_len());
    let grown = Span::new(new_start, new_end);
    if grown == seed.suspect {
        return None;
    }
    let left_growth = seed.suspect.start - new_start;
    let right_growth = new_end - seed.suspect.end;
    let budget = (edit_ratio * grown.len() as f64).floor() as usize;

    let slack = step + budget + 4;
    let w_start = seed.source.start.saturating_sub(left_growth + slack);
    let w_end = (seed.source.end + right_growth + slack).min(source.char_len());
    if w_start >= w_end {
        return None;
    }
    let window = Span::new(w_start, w_end);

    let pattern = suspect.canonical_slice(grown);
    let text = source.canonical_slice(window);

    if let Some(pos) = find_exact(text, pattern) {
        return Some(SpanMatch {
            suspect: grown,
            source: Span::new(w_start + pos, w_start + pos + pattern.len()),
            edit_cost: 0,
        });
    }
    if budget == 0 {
        return None;
    }
    let best = approx_find_chars(pattern, text, budget)
        .into_iter()
        .min_by_key(|m| (m.edit_cost, m.source.start))?;
    Some(SpanMatch {
        suspect: grown,
        source: Span::new(w_start + best.source.start, w_start + best.source.end),
        edit_cost: best.edit_cost,
    })
}
