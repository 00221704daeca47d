//! Reading and writing M2 annotation files.
//!
//! A record is one `S` line with the tokenized source sentence, followed by
//! `A` lines of the form
//!
//! ```text
//! A <start> <end>|||<type>|||<replacement>|||REQUIRED|||-NONE-|||<annotator>
//! ```
//!
//! and a blank line. `-NONE-` as replacement is a deletion, and the span
//! `-1 -1` marks an annotator who left the sentence unchanged (noop).

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{align, extract_edits, merge_swaps, validate_edits, Edit, EditGranularity, DEFAULT_SWAP_GAP};
use crate::text::Sentence;

const NONE_FIELD: &str = "-NONE-";
const FIELD_SEP: &str = "|||";

#[derive(Debug, Error)]
pub enum M2Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("record {record} (line {line}): {message}")]
    Validation {
        record: usize,
        line: usize,
        message: String,
    },
    #[error("cannot emit record {record}: {message}")]
    Emit { record: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A source sentence with the edits of each annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Record {
    pub source: Sentence,
    pub edits: BTreeMap<u32, Vec<Edit>>,
}

impl M2Record {
    pub fn new(source: Sentence, edits: BTreeMap<u32, Vec<Edit>>) -> Self {
        M2Record { source, edits }
    }

    /// A record in which `annotator` made no changes.
    pub fn noop(source: Sentence, annotator: u32) -> Self {
        M2Record {
            source,
            edits: BTreeMap::from([(annotator, Vec::new())]),
        }
    }

    pub fn annotators(&self) -> impl Iterator<Item = u32> + '_ {
        self.edits.keys().copied()
    }

    /// Checks the record invariants, returning a description of the first violation.
    pub fn check(&self) -> Result<(), String> {
        if self.edits.is_empty() {
            return Err("record has no annotators".into());
        }
        for (&annotator, edits) in &self.edits {
            if let Some(e) = edits.iter().find(|e| e.annotator != annotator) {
                return Err(format!(
                    "edit {e} is filed under annotator {annotator} but tagged {}",
                    e.annotator
                ));
            }
            validate_edits(edits, self.source.len()).map_err(|err| format!("annotator {annotator}: {err}"))?;
        }
        Ok(())
    }
}

/// Streaming M2 parser over any buffered reader.
pub struct M2Reader<R> {
    reader: R,
    line_no: usize,
    record_no: usize,
    buf: String,
    pending: Option<(usize, String)>,
    done: bool,
}

struct Partial {
    record: usize,
    line: usize,
    source: Sentence,
    edits: BTreeMap<u32, Vec<Edit>>,
}

impl<R: BufRead> M2Reader<R> {
    pub fn new(reader: R) -> Self {
        M2Reader {
            reader,
            line_no: 0,
            record_no: 0,
            buf: String::new(),
            pending: None,
            done: false,
        }
    }

    fn next_line(&mut self) -> Result<Option<(usize, String)>, M2Error> {
        if let Some(p) = self.pending.take() {
            return Ok(Some(p));
        }
        self.buf.clear();
        let read = self.reader.read_line(&mut self.buf).map_err(|e| {
            if e.kind() == io::ErrorKind::InvalidData {
                M2Error::Syntax {
                    line: self.line_no + 1,
                    message: "invalid UTF-8".into(),
                }
            } else {
                M2Error::Io(e)
            }
        })?;
        if read == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        let line = self.buf.trim_end_matches(['\n', '\r']).to_string();
        Ok(Some((self.line_no, line)))
    }

    fn read_record(&mut self) -> Result<Option<M2Record>, M2Error> {
        let mut partial: Option<Partial> = None;
        while let Some((line_no, line)) = self.next_line()? {
            if line.trim().is_empty() {
                if partial.is_some() {
                    break;
                }
                continue;
            }
            if let Some(text) = line.strip_prefix("S ").or((line == "S").then_some("")) {
                if partial.is_some() {
                    self.pending = Some((line_no, line));
                    break;
                }
                self.record_no += 1;
                partial = Some(Partial {
                    record: self.record_no,
                    line: line_no,
                    source: Sentence::from_tokenized(text),
                    edits: BTreeMap::new(),
                });
            } else if let Some(body) = line.strip_prefix("A ") {
                let Some(p) = partial.as_mut() else {
                    return Err(M2Error::Syntax {
                        line: line_no,
                        message: "\"A\" line outside of a record".into(),
                    });
                };
                parse_a_line(p, body, line_no)?;
            } else {
                return Err(M2Error::Syntax {
                    line: line_no,
                    message: format!("expected an \"S \" or \"A \" line, found {line:?}"),
                });
            }
        }
        let Some(mut p) = partial else {
            return Ok(None);
        };
        if p.edits.is_empty() {
            p.edits.insert(0, Vec::new());
        }
        let record = M2Record::new(p.source, p.edits);
        record.check().map_err(|message| M2Error::Validation {
            record: p.record,
            line: p.line,
            message,
        })?;
        Ok(Some(record))
    }
}

impl<R: BufRead> Iterator for M2Reader<R> {
    type Item = Result<M2Record, M2Error>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

fn parse_a_line(p: &mut Partial, body: &str, line: usize) -> Result<(), M2Error> {
    let fields: Vec<&str> = body.split(FIELD_SEP).collect();
    if fields.len() != 6 {
        return Err(M2Error::Syntax {
            line,
            message: format!("\"A\" line has {} \"|||\"-separated fields, expected 6", fields.len()),
        });
    }
    let invalid = |message: String| M2Error::Validation {
        record: p.record,
        line,
        message,
    };
    let span: Vec<&str> = fields[0].split_whitespace().collect();
    let [start, end] = span[..] else {
        return Err(invalid(format!("span {:?} must be two integers", fields[0])));
    };
    let parse_index = |s: &str| {
        s.parse::<i64>()
            .map_err(|_| invalid(format!("span index {s:?} is not an integer")))
    };
    let (start, end) = (parse_index(start)?, parse_index(end)?);
    let annotator: u32 = fields[5]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("annotator id {:?} is not a non-negative integer", fields[5])))?;
    let entry = p.edits.entry(annotator).or_default();
    if (start, end) == (-1, -1) {
        return Ok(());
    }
    let len = p.source.len() as i64;
    if start < 0 || start > end || end > len {
        return Err(invalid(format!(
            "span {start} {end} is out of range for a sentence of {len} tokens"
        )));
    }
    let replacement = match fields[2].trim() {
        NONE_FIELD => Vec::new(),
        text => Sentence::from_tokenized(text).into_tokens(),
    };
    entry.push(Edit {
        start: start as usize,
        end: end as usize,
        replacement,
        error_type: fields[1].to_string(),
        annotator,
    });
    Ok(())
}

/// Parses every record of an M2 document.
pub fn parse_m2(text: &str) -> Result<Vec<M2Record>, M2Error> {
    M2Reader::new(text.as_bytes()).collect()
}

/// Serializes one record, including the trailing blank line.
///
/// `index` is the 1-based record number used in error messages.
pub fn format_record(record: &M2Record, index: usize) -> Result<String, M2Error> {
    let fail = |message: String| M2Error::Emit { record: index, message };
    record.check().map_err(fail)?;
    let mut out = String::new();
    out.push_str("S ");
    out.push_str(&record.source.to_string());
    out.push('\n');
    for (&annotator, edits) in &record.edits {
        if edits.is_empty() {
            out.push_str(&format!(
                "A -1 -1|||noop|||{NONE_FIELD}|||REQUIRED|||{NONE_FIELD}|||{annotator}\n"
            ));
        }
        for e in edits {
            if e.error_type.contains(FIELD_SEP) || e.error_type.contains(['\n', '\r']) {
                return Err(fail(format!("error type {:?} cannot be written", e.error_type)));
            }
            if let Some(t) = e.replacement.iter().find(|t| t.contains(FIELD_SEP)) {
                return Err(fail(format!("replacement token {t:?} contains \"|||\"")));
            }
            let replacement = if e.replacement.is_empty() {
                NONE_FIELD.to_string()
            } else {
                let joined = Sentence::new(e.replacement.clone()).to_string();
                if joined == NONE_FIELD {
                    return Err(fail(format!(
                        "replacement {NONE_FIELD:?} is indistinguishable from a deletion"
                    )));
                }
                joined
            };
            out.push_str(&format!(
                "A {} {}|||{}|||{}|||REQUIRED|||{NONE_FIELD}|||{}\n",
                e.start, e.end, e.error_type, replacement, annotator
            ));
        }
    }
    out.push('\n');
    Ok(out)
}

/// Writes records to `out`. Nothing of a record is written if it is invalid.
pub fn write_m2<'a, W, I>(out: &mut W, records: I) -> Result<(), M2Error>
where
    W: Write,
    I: IntoIterator<Item = &'a M2Record>,
{
    for (i, record) in records.into_iter().enumerate() {
        out.write_all(format_record(record, i + 1)?.as_bytes())?;
    }
    Ok(())
}

pub fn emit_m2(records: &[M2Record]) -> Result<String, M2Error> {
    let mut out = String::new();
    for (i, record) in records.iter().enumerate() {
        out.push_str(&format_record(record, i + 1)?);
    }
    Ok(out)
}

/// Settings for turning a parallel sentence pair into edits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub granularity: EditGranularity,
    pub merge_swaps: bool,
    pub max_swap_gap: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            granularity: EditGranularity::Merged,
            merge_swaps: true,
            max_swap_gap: DEFAULT_SWAP_GAP,
        }
    }
}

/// Edits that turn `src` into `tgt`.
pub fn parallel_edits(src: &Sentence, tgt: &Sentence, annotator: u32, options: &ExtractOptions) -> Vec<Edit> {
    let edits = extract_edits(&align(src, tgt), annotator, options.granularity);
    if options.merge_swaps {
        merge_swaps(&edits, src, options.max_swap_gap)
    } else {
        edits
    }
}

/// Builds a single-annotator record from a parallel pair.
pub fn from_parallel(src: &Sentence, tgt: &Sentence, annotator: u32, options: &ExtractOptions) -> M2Record {
    let edits = parallel_edits(src, tgt, annotator, options);
    M2Record::new(src.clone(), BTreeMap::from([(annotator, edits)]))
}

/// Splits a `src<TAB>tgt` line. Returns `None` when there is no tab.
pub fn split_parallel_line(line: &str) -> Option<(&str, &str)> {
    line.split_once('\t')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::apply_edits;
    use crate::text::Token;

    fn s(text: &str) -> Sentence {
        Sentence::from_tokenized(text)
    }

    fn tokens(text: &str) -> Vec<Token> {
        s(text).into_tokens()
    }

    #[test]
    fn parse_single_edit() {
        let recs = parse_m2("S This are bad .\nA 1 2|||agr|||is|||REQUIRED|||-NONE-|||0\n\n").unwrap();
        assert_eq!(recs.len(), 1);
        let edits = &recs[0].edits[&0];
        assert_eq!(edits, &vec![Edit::new(1, 2, tokens("is")).with_type("agr")]);
    }

    #[test]
    fn parse_noop_and_missing_a_lines() {
        let recs = parse_m2(
            "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\nS c d\n\nS e\nA 0 1|||x|||-NONE-|||REQUIRED|||-NONE-|||1",
        )
        .unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].edits, BTreeMap::from([(0, vec![])]));
        assert_eq!(recs[1].edits, BTreeMap::from([(0, vec![])]));
        assert_eq!(
            recs[2].edits[&1],
            vec![Edit::new(0, 1, vec![]).with_type("x").with_annotator(1)]
        );
    }

    #[test]
    fn parse_two_annotators() {
        let text = "S a b c\nA 0 1|||x|||z|||REQUIRED|||-NONE-|||0\nA 2 3|||y|||-NONE-|||REQUIRED|||-NONE-|||1\n\n";
        let recs = parse_m2(text).unwrap();
        assert_eq!(recs[0].edits.len(), 2);
        assert_eq!(emit_m2(&recs).unwrap(), text);
    }

    #[test]
    fn parse_errors() {
        let err = parse_m2("S a\nB nonsense\n").unwrap_err();
        assert!(matches!(err, M2Error::Syntax { line: 2, .. }), "{err}");
        let err = parse_m2("S a\nA 0 1|||x|||y|||REQUIRED\n").unwrap_err();
        assert!(matches!(err, M2Error::Syntax { line: 2, .. }), "{err}");
        let err = parse_m2("A 0 1|||x|||y|||REQUIRED|||-NONE-|||0\n").unwrap_err();
        assert!(matches!(err, M2Error::Syntax { line: 1, .. }));
        let err = parse_m2("S a\n\nS b\nA 0 x|||x|||y|||REQUIRED|||-NONE-|||0\n").unwrap_err();
        assert!(matches!(err, M2Error::Validation { record: 2, line: 4, .. }), "{err}");
        let err = parse_m2("S a\nA 0 3|||x|||y|||REQUIRED|||-NONE-|||0\n").unwrap_err();
        assert!(matches!(err, M2Error::Validation { record: 1, .. }));
        let err = parse_m2("S a b\nA 0 2|||x|||y|||REQUIRED|||-NONE-|||0\nA 1 2|||x|||y|||REQUIRED|||-NONE-|||0\n")
            .unwrap_err();
        assert!(matches!(err, M2Error::Validation { .. }));
    }

    #[test]
    fn emit_noop_and_table_example() {
        let noop = M2Record::noop(s("a b"), 0);
        assert_eq!(
            emit_m2(&[noop]).unwrap(),
            "S a b\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"
        );
        let rec = M2Record::new(
            s("on pracovají v továrně"),
            BTreeMap::from([(0, vec![Edit::new(1, 2, tokens("pracují")).with_type("incorInfl")])]),
        );
        assert_eq!(
            emit_m2(&[rec]).unwrap(),
            "S on pracovají v továrně\nA 1 2|||incorInfl|||pracují|||REQUIRED|||-NONE-|||0\n\n"
        );
    }

    #[test]
    fn emit_rejects_invalid() {
        let rec = M2Record::new(s("a"), BTreeMap::from([(0, vec![Edit::new(0, 1, tokens("-NONE-"))])]));
        assert!(matches!(emit_m2(&[rec]), Err(M2Error::Emit { record: 1, .. })));
        let rec = M2Record::new(s("a"), BTreeMap::new());
        assert!(emit_m2(&[rec]).is_err());
        let rec = M2Record::new(s("a"), BTreeMap::from([(0, vec![Edit::new(0, 2, vec![])])]));
        assert!(emit_m2(&[rec]).is_err());
        let rec = M2Record::new(s("a"), BTreeMap::from([(1, vec![Edit::new(0, 1, vec![])])]));
        assert!(emit_m2(&[rec]).is_err(), "annotator tag mismatch");
    }

    #[test]
    fn from_parallel_cases() {
        let opts = ExtractOptions::default();
        assert_eq!(
            from_parallel(&s("a b"), &s("a b"), 0, &opts),
            M2Record::noop(s("a b"), 0)
        );
        let rec = from_parallel(&s("A B C"), &s("C A B"), 0, &opts);
        assert_eq!(rec.edits[&0], vec![Edit::new(0, 3, tokens("C A B"))]);
        let rec = from_parallel(&s("musím to při pravit"), &s("musím to připravit"), 3, &opts);
        assert_eq!(
            rec.edits[&3],
            vec![Edit::new(2, 4, tokens("připravit")).with_annotator(3)]
        );
        assert_eq!(
            apply_edits(&rec.source, &rec.edits[&3]).unwrap(),
            s("musím to připravit")
        );
    }

    #[test]
    fn crlf_and_empty_source() {
        let recs = parse_m2("S \r\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\r\n\r\n").unwrap();
        assert!(recs[0].source.is_empty());
        assert_eq!(
            emit_m2(&recs).unwrap(),
            "S \nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"
        );
    }
}
