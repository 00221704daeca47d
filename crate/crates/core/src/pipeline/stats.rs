use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::align::{align, apply_edits, EdgeCounts};
use crate::m2::{split_parallel_line, M2Reader, M2Record};
use crate::text::Sentence;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    #[default]
    Auto,
    M2,
    Tsv,
}

/// Sentence, word and error-rate counts of a corpus, optionally split into
/// named subsets whose counts add up to the totals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sentences: u64,
    pub words: u64,
    pub error_rate: f64,
    /// False when the corpus has no alignment edges; `error_rate` is then 0.
    pub error_rate_defined: bool,
    pub non_match_edges: u64,
    pub total_edges: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub documents: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub subsets: BTreeMap<String, CorpusStats>,
}

impl CorpusStats {
    fn from_parts(sentences: u64, words: u64, edges: EdgeCounts) -> Self {
        CorpusStats {
            sentences,
            words,
            error_rate: edges.rate().unwrap_or(0.0),
            error_rate_defined: edges.rate().is_some(),
            non_match_edges: edges.non_match,
            total_edges: edges.total,
            documents: None,
            subsets: BTreeMap::new(),
        }
    }

    pub fn edges(&self) -> EdgeCounts {
        EdgeCounts {
            non_match: self.non_match_edges,
            total: self.total_edges,
        }
    }

    /// Pools counts; the error rate is recomputed from the summed edges.
    pub fn merge(&self, other: &CorpusStats) -> CorpusStats {
        let mut out = CorpusStats::from_parts(
            self.sentences + other.sentences,
            self.words + other.words,
            self.edges().merge(other.edges()),
        );
        out.documents = match (self.documents, other.documents) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        out
    }

    /// Totals over named parts, keeping each part as a subset.
    pub fn combine(parts: Vec<(String, CorpusStats)>) -> CorpusStats {
        let mut iter = parts.iter().map(|(_, s)| s);
        let mut total = match iter.next() {
            Some(first) => CorpusStats {
                subsets: BTreeMap::new(),
                ..first.clone()
            },
            None => CorpusStats::default(),
        };
        for s in iter {
            total = total.merge(s);
        }
        total.subsets = parts.into_iter().collect();
        total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    sentences: u64,
    words: u64,
    edges: EdgeCounts,
}

impl Tally {
    fn pair(src: &Sentence, tgt: &Sentence) -> Tally {
        Tally {
            sentences: 1,
            words: src.len() as u64,
            edges: align(src, tgt).counts(),
        }
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            sentences: self.sentences + other.sentences,
            words: self.words + other.words,
            edges: self.edges.merge(other.edges),
        }
    }

    fn finish(self) -> CorpusStats {
        CorpusStats::from_parts(self.sentences, self.words, self.edges)
    }
}

fn corrected_side(record: &M2Record) -> Sentence {
    // Prefer annotator 0, otherwise the lowest id present.
    let edits = record
        .edits
        .get(&0)
        .or_else(|| record.edits.values().next())
        .map(Vec::as_slice)
        .unwrap_or_default();
    apply_edits(&record.source, edits).expect("parsed records hold valid edits")
}

/// Statistics of an M2 stream; the corrected side is annotator 0's.
pub fn stats_from_m2<R: BufRead>(reader: R) -> Result<CorpusStats, PipelineError> {
    let mut records = M2Reader::new(reader);
    let mut total = Tally::default();
    loop {
        let chunk: Vec<M2Record> = records.by_ref().take(CHUNK).collect::<Result<_, _>>()?;
        if chunk.is_empty() {
            break;
        }
        total = chunk
            .par_iter()
            .map(|r| Tally::pair(&r.source, &corrected_side(r)))
            .reduce(Tally::default, Tally::merge)
            .merge(total);
    }
    Ok(total.finish())
}

/// Statistics of `source<TAB>target` lines. `name` is used in error messages.
pub fn stats_from_parallel<R: BufRead>(reader: R, name: &str) -> Result<CorpusStats, PipelineError> {
    let mut lines = reader.lines().enumerate();
    let mut total = Tally::default();
    loop {
        let mut chunk = Vec::with_capacity(CHUNK);
        for (i, line) in lines.by_ref().take(CHUNK) {
            let line = line?;
            let line = line.trim_end_matches('\r');
            let Some((src, tgt)) = split_parallel_line(line) else {
                return Err(PipelineError::NotParallel {
                    path: name.to_string(),
                    line: i + 1,
                });
            };
            chunk.push((src.to_string(), tgt.to_string()));
        }
        if chunk.is_empty() {
            break;
        }
        total = chunk
            .par_iter()
            .map(|(s, t)| Tally::pair(&Sentence::from_tokenized(s), &Sentence::from_tokenized(t)))
            .reduce(Tally::default, Tally::merge)
            .merge(total);
    }
    Ok(total.finish())
}

/// Counts documents in a sidecar index holding one document id per sentence.
pub fn count_documents<R: BufRead>(reader: R, sentences: u64) -> Result<u64, PipelineError> {
    let mut ids = HashSet::new();
    let mut lines = 0u64;
    for line in reader.lines() {
        let line = line?;
        ids.insert(line.trim().to_string());
        lines += 1;
    }
    if lines != sentences {
        return Err(PipelineError::DocIndex(format!(
            "has {lines} lines but the corpus has {sentences} sentences"
        )));
    }
    Ok(ids.len() as u64)
}

/// Text table with one row per subset and a total row.
pub fn render_stats_table(stats: &CorpusStats) -> String {
    let mut rows: Vec<(&str, &CorpusStats)> = stats.subsets.iter().map(|(k, v)| (k.as_str(), v)).collect();
    rows.push(("total", stats));
    let width = rows.iter().map(|(n, _)| n.chars().count()).max().unwrap_or(5).max(6);
    let with_docs = rows.iter().any(|(_, s)| s.documents.is_some());
    let mut out = String::new();
    let _ = write!(out, "{:<width$}", "Subset");
    if with_docs {
        let _ = write!(out, " {:>8}", "Doc");
    }
    let _ = writeln!(out, " {:>10} {:>12} {:>9}", "Sent", "Word", "Error r.");
    for (name, s) in rows {
        let _ = write!(out, "{name:<width$}");
        if with_docs {
            match s.documents {
                Some(d) => {
                    let _ = write!(out, " {d:>8}");
                }
                None => {
                    let _ = write!(out, " {:>8}", "-");
                }
            }
        }
        let rate = if s.error_rate_defined {
            format!("{:.1} %", s.error_rate * 100.0)
        } else {
            "n/a".to_string()
        };
        let _ = writeln!(out, " {:>10} {:>12} {:>9}", s.sentences, s.words, rate);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        let s = stats_from_parallel("".as_bytes(), "x").unwrap();
        assert_eq!(
            (s.sentences, s.words, s.error_rate, s.error_rate_defined),
            (0, 0, 0.0, false)
        );
        let s = stats_from_m2("".as_bytes()).unwrap();
        assert_eq!(s.sentences, 0);
    }

    #[test]
    fn identical_pairs() {
        let s = stats_from_parallel("a b c\ta b c\nd e f\td e f\n".as_bytes(), "x").unwrap();
        assert_eq!((s.sentences, s.words, s.error_rate), (2, 6, 0.0));
        assert!(s.error_rate_defined);
    }

    #[test]
    fn m2_uses_first_annotator() {
        let text = "S a b c\nA 1 2|||x|||z|||REQUIRED|||-NONE-|||0\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||1\n\nS d\nA 0 1|||x|||-NONE-|||REQUIRED|||-NONE-|||1\n\n";
        let s = stats_from_m2(text.as_bytes()).unwrap();
        assert_eq!(s.sentences, 2);
        assert_eq!(s.words, 4);
        assert_eq!((s.non_match_edges, s.total_edges), (2, 4));
    }

    #[test]
    fn missing_tab_is_reported() {
        let err = stats_from_parallel("a\ta\nbroken\n".as_bytes(), "in.tsv").unwrap_err();
        assert!(matches!(err, PipelineError::NotParallel { line: 2, .. }));
        let err = stats_from_m2("S a\nA 5 6|||x|||y|||REQUIRED|||-NONE-|||0\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("record 1"));
    }

    #[test]
    fn combine_pools_subsets() {
        let a = stats_from_parallel("a b\ta c\n".as_bytes(), "a").unwrap();
        let b = stats_from_parallel("x y z\tx y z\n".as_bytes(), "b").unwrap();
        let both = stats_from_parallel("a b\ta c\nx y z\tx y z\n".as_bytes(), "ab").unwrap();
        let total = CorpusStats::combine(vec![("dev".into(), a.clone()), ("test".into(), b)]);
        assert_eq!(total.sentences, both.sentences);
        assert_eq!(total.words, both.words);
        assert_eq!(total.error_rate, both.error_rate);
        assert_eq!(total.subsets.len(), 2);
        let table = render_stats_table(&total);
        assert!(table.contains("Error r."));
        assert!(table.contains("dev"));
    }

    #[test]
    fn documents() {
        assert_eq!(count_documents("d1\nd1\nd2\n".as_bytes(), 3).unwrap(), 2);
        assert!(count_documents("d1\n".as_bytes(), 3).is_err());
    }
}
