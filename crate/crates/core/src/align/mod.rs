//! Token-level Levenshtein alignment and everything derived from it.

mod edits;

pub use edits::{
    apply_edits, extract_edits, merge_swaps, validate_edits, ApplyError, Edit, EditGranularity, DEFAULT_SWAP_GAP,
    UNSPECIFIED_TYPE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Match,
    Substitute,
    Insert,
    Delete,
}

/// One link of an alignment. Insertions consume only a target token,
/// deletions only a source token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignEdge {
    Match { src: usize, tgt: usize },
    Substitute { src: usize, tgt: usize },
    Insert { tgt: usize },
    Delete { src: usize },
}

impl AlignEdge {
    pub fn kind(&self) -> EdgeKind {
        match self {
            AlignEdge::Match { .. } => EdgeKind::Match,
            AlignEdge::Substitute { .. } => EdgeKind::Substitute,
            AlignEdge::Insert { .. } => EdgeKind::Insert,
            AlignEdge::Delete { .. } => EdgeKind::Delete,
        }
    }

    pub fn src_index(&self) -> Option<usize> {
        match *self {
            AlignEdge::Match { src, .. } | AlignEdge::Substitute { src, .. } => Some(src),
            AlignEdge::Delete { src } => Some(src),
            AlignEdge::Insert { .. } => None,
        }
    }

    pub fn tgt_index(&self) -> Option<usize> {
        match *self {
            AlignEdge::Match { tgt, .. } | AlignEdge::Substitute { tgt, .. } => Some(tgt),
            AlignEdge::Insert { tgt } => Some(tgt),
            AlignEdge::Delete { .. } => None,
        }
    }

    pub fn is_match(&self) -> bool {
        matches!(self, AlignEdge::Match { .. })
    }
}

/// A minimum-cost monotone alignment of two sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    edges: Vec<AlignEdge>,
    src: Sentence,
    tgt: Sentence,
}

impl Alignment {
    pub fn edges(&self) -> &[AlignEdge] {
        &self.edges
    }

    pub fn src(&self) -> &Sentence {
        &self.src
    }

    pub fn tgt(&self) -> &Sentence {
        &self.tgt
    }

    /// Number of non-match edges, i.e. the token edit distance.
    pub fn cost(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_match()).count()
    }

    pub fn counts(&self) -> EdgeCounts {
        EdgeCounts {
            non_match: self.cost() as u64,
            total: self.edges.len() as u64,
        }
    }
}

// Traceback preference at every cell, strongest first.
const TRACE_ORDER: [EdgeKind; 4] = [
    EdgeKind::Match,
    EdgeKind::Substitute,
    EdgeKind::Delete,
    EdgeKind::Insert,
];

/// Aligns `src` to `tgt` with unit costs for substitution, insertion and deletion.
///
/// Among equal-cost alignments the traceback prefers match, then substitute,
/// then delete, then insert at every cell, so the result is deterministic.
pub fn align(src: &Sentence, tgt: &Sentence) -> Alignment {
    let a = src.tokens();
    let b = tgt.tokens();
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut dist = vec![0u32; (n + 1) * width];
    for (j, d) in dist[..width].iter_mut().enumerate() {
        *d = j as u32;
    }
    for i in 1..=n {
        dist[i * width] = i as u32;
        for j in 1..=m {
            let diag = dist[(i - 1) * width + j - 1] + u32::from(a[i - 1] != b[j - 1]);
            let up = dist[(i - 1) * width + j] + 1;
            let left = dist[i * width + j - 1] + 1;
            dist[i * width + j] = diag.min(up).min(left);
        }
    }

    let mut edges = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dist[i * width + j];
        let step = TRACE_ORDER
            .into_iter()
            .find(|kind| match kind {
                EdgeKind::Match => i > 0 && j > 0 && a[i - 1] == b[j - 1] && dist[(i - 1) * width + j - 1] == here,
                EdgeKind::Substitute => {
                    i > 0 && j > 0 && a[i - 1] != b[j - 1] && dist[(i - 1) * width + j - 1] + 1 == here
                }
                EdgeKind::Delete => i > 0 && dist[(i - 1) * width + j] + 1 == here,
                EdgeKind::Insert => j > 0 && dist[i * width + j - 1] + 1 == here,
            })
            .expect("some predecessor realizes the cell cost");
        match step {
            EdgeKind::Match => {
                i -= 1;
                j -= 1;
                edges.push(AlignEdge::Match { src: i, tgt: j });
            }
            EdgeKind::Substitute => {
                i -= 1;
                j -= 1;
                edges.push(AlignEdge::Substitute { src: i, tgt: j });
            }
            EdgeKind::Delete => {
                i -= 1;
                edges.push(AlignEdge::Delete { src: i });
            }
            EdgeKind::Insert => {
                j -= 1;
                edges.push(AlignEdge::Insert { tgt: j });
            }
        }
    }
    edges.reverse();
    Alignment {
        edges,
        src: src.clone(),
        tgt: tgt.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ErrorRateError {
    #[error("undefined error rate: both sentences are empty")]
    Undefined,
}

/// Non-match and total edge counts of one or more alignments.
///
/// Merging is associative, so per-pair counts can be reduced in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCounts {
    pub non_match: u64,
    pub total: u64,
}

impl EdgeCounts {
    pub fn merge(self, other: EdgeCounts) -> EdgeCounts {
        EdgeCounts {
            non_match: self.non_match + other.non_match,
            total: self.total + other.total,
        }
    }

    pub fn rate(&self) -> Option<f64> {
        (self.total > 0).then(|| self.non_match as f64 / self.total as f64)
    }
}

impl std::ops::AddAssign for EdgeCounts {
    fn add_assign(&mut self, rhs: EdgeCounts) {
        *self = self.merge(rhs);
    }
}

impl std::iter::Sum for EdgeCounts {
    fn sum<I: Iterator<Item = EdgeCounts>>(iter: I) -> Self {
        iter.fold(EdgeCounts::default(), EdgeCounts::merge)
    }
}

/// Fraction of non-matching edges in the minimal alignment of `src` and `tgt`.
pub fn error_rate(src: &Sentence, tgt: &Sentence) -> Result<f64, ErrorRateError> {
    align(src, tgt).counts().rate().ok_or(ErrorRateError::Undefined)
}

/// Pooled error rate over sentence pairs: summed non-match edges over summed edges.
pub fn corpus_error_rate<'a, I>(pairs: I) -> Result<f64, ErrorRateError>
where
    I: IntoIterator<Item = (&'a Sentence, &'a Sentence)>,
{
    pairs
        .into_iter()
        .map(|(s, t)| align(s, t).counts())
        .sum::<EdgeCounts>()
        .rate()
        .ok_or(ErrorRateError::Undefined)
}
