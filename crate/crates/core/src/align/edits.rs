use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AlignEdge, Alignment};
use crate::text::{Sentence, Token};

/// Error type assigned to edits that carry no annotation.
pub const UNSPECIFIED_TYPE: &str = "unspec";

/// Largest number of correct tokens a transposition may jump over and still
/// be stored as one edit.
pub const DEFAULT_SWAP_GAP: usize = 2;

/// Replacement of the source span `start..end` by `replacement`.
///
/// `start == end` is a pure insertion before token `start`; an empty
/// replacement is a deletion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<Token>,
    pub error_type: String,
    pub annotator: u32,
}

impl Edit {
    pub fn new(start: usize, end: usize, replacement: Vec<Token>) -> Self {
        Edit {
            start,
            end,
            replacement,
            error_type: UNSPECIFIED_TYPE.to_string(),
            annotator: 0,
        }
    }

    pub fn with_type(mut self, error_type: impl Into<String>) -> Self {
        self.error_type = error_type.into();
        self
    }

    pub fn with_annotator(mut self, annotator: u32) -> Self {
        self.annotator = annotator;
        self
    }

    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }

    pub fn is_deletion(&self) -> bool {
        self.replacement.is_empty() && self.start < self.end
    }

    /// True when applying the edit would not change `src`.
    pub fn is_vacuous(&self, src: &Sentence) -> bool {
        src.tokens().get(self.start..self.end) == Some(&self.replacement[..])
    }

    /// The key edits are matched on: span and replacement, ignoring type and annotator.
    pub fn span_key(&self) -> (usize, usize, &[Token]) {
        (self.start, self.end, &self.replacement)
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{} -> [", self.start, self.end)?;
        for (i, t) in self.replacement.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t)?;
        }
        f.write_str("]")
    }
}

/// How runs of non-matching alignment edges become edits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EditGranularity {
    /// Each maximal run of adjacent non-match edges is one edit.
    #[default]
    Merged,
    /// Every non-match edge is its own edit.
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("edit #{index} ({start}..{end}) is out of range for a sentence of {len} tokens")]
    OutOfRange {
        index: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("edit #{index} has start {start} after end {end}")]
    InvertedSpan { index: usize, start: usize, end: usize },
    #[error("edits #{first} and #{second} overlap or are out of order")]
    Overlap { first: usize, second: usize },
}

/// Checks that edits are in range, sorted and non-overlapping.
/// Several insertions at the same index are allowed and keep their order.
pub fn validate_edits(edits: &[Edit], src_len: usize) -> Result<(), ApplyError> {
    let mut prev_end = 0;
    for (index, e) in edits.iter().enumerate() {
        if e.start > e.end {
            return Err(ApplyError::InvertedSpan {
                index,
                start: e.start,
                end: e.end,
            });
        }
        if e.end > src_len {
            return Err(ApplyError::OutOfRange {
                index,
                start: e.start,
                end: e.end,
                len: src_len,
            });
        }
        if index > 0 && e.start < prev_end {
            return Err(ApplyError::Overlap {
                first: index - 1,
                second: index,
            });
        }
        prev_end = e.end;
    }
    Ok(())
}

/// Applies sorted, non-overlapping edits to `src`.
pub fn apply_edits(src: &Sentence, edits: &[Edit]) -> Result<Sentence, ApplyError> {
    validate_edits(edits, src.len())?;
    let tokens = src.tokens();
    let mut out = Vec::with_capacity(tokens.len());
    let mut pos = 0;
    for e in edits {
        out.extend_from_slice(&tokens[pos..e.start]);
        out.extend(e.replacement.iter().cloned());
        pos = e.end;
    }
    out.extend_from_slice(&tokens[pos..]);
    Ok(Sentence::new(out))
}

/// Turns the non-matching edges of an alignment into edits typed `unspec`.
pub fn extract_edits(alignment: &Alignment, annotator: u32, granularity: EditGranularity) -> Vec<Edit> {
    let tgt = alignment.tgt().tokens();
    let mut edits = Vec::new();
    let mut open: Option<Edit> = None;
    let mut src_pos = 0;
    for edge in alignment.edges() {
        if edge.is_match() {
            edits.extend(open.take());
            src_pos += 1;
            continue;
        }
        if granularity == EditGranularity::Split {
            edits.extend(open.take());
        }
        let edit = open.get_or_insert_with(|| Edit::new(src_pos, src_pos, Vec::new()).with_annotator(annotator));
        if let Some(j) = edge.tgt_index() {
            edit.replacement.push(tgt[j].clone());
        }
        if matches!(edge, AlignEdge::Substitute { .. } | AlignEdge::Delete { .. }) {
            edit.end += 1;
            src_pos += 1;
        }
    }
    edits.extend(open);
    edits
}

/// Rewrites short-range transpositions as single edits.
///
/// A deletion of tokens X and an insertion of the same tokens X that are
/// adjacent in `edits` and separated by at most `max_gap` untouched source
/// tokens become one edit over the whole window, whose replacement is the
/// window as it reads after both edits. Pairs further apart stay as they are.
pub fn merge_swaps(edits: &[Edit], src: &Sentence, max_gap: usize) -> Vec<Edit> {
    let tokens = src.tokens();
    let mut out = Vec::with_capacity(edits.len());
    let mut i = 0;
    while i < edits.len() {
        if let Some(next) = edits.get(i + 1) {
            if let Some(merged) = merge_pair(&edits[i], next, tokens, max_gap) {
                out.extend(merged);
                i += 2;
                continue;
            }
        }
        out.push(edits[i].clone());
        i += 1;
    }
    out
}

/// `Some(None)` when the pair cancels out entirely.
fn merge_pair(left: &Edit, right: &Edit, tokens: &[Token], max_gap: usize) -> Option<Option<Edit>> {
    if right.start < left.end || right.end > tokens.len() {
        return None;
    }
    let gap = right.start - left.end;
    if gap > max_gap {
        return None;
    }
    let between = &tokens[left.end..right.start];
    let replacement: Vec<Token> = if left.is_deletion() && right.is_insertion() {
        if right.replacement != tokens[left.start..left.end] {
            return None;
        }
        between.iter().chain(&right.replacement).cloned().collect()
    } else if left.is_insertion() && right.is_deletion() {
        if left.replacement != tokens[right.start..right.end] {
            return None;
        }
        left.replacement.iter().chain(between).cloned().collect()
    } else {
        return None;
    };
    let (start, end) = (left.start, right.end);
    if tokens[start..end] == replacement[..] {
        return Some(None);
    }
    let error_type = if left.error_type == right.error_type {
        left.error_type.clone()
    } else {
        UNSPECIFIED_TYPE.to_string()
    };
    Some(Some(Edit {
        start,
        end,
        replacement,
        error_type,
        annotator: left.annotator,
    }))
}
