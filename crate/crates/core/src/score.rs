//! MaxMatch-style evaluation of corrected sentences against M2 gold edits.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{validate_edits, ApplyError, Edit, UNSPECIFIED_TYPE};
use crate::m2::{parallel_edits, ExtractOptions, M2Record};
use crate::text::Sentence;

pub const DEFAULT_BETA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("{name} = {value} is outside [0, 1]")]
    InvalidFraction { name: &'static str, value: f64 },
    #[error("beta must be a positive finite number, got {0}")]
    InvalidBeta(f64),
    #[error("{side} edits are not sorted and non-overlapping: {source}")]
    Overlap {
        side: &'static str,
        #[source]
        source: ApplyError,
    },
    #[error("hypothesis has {hyp} sentences but gold has {gold} records (first unmatched index {index})")]
    LengthMismatch { hyp: usize, gold: usize, index: usize },
}

/// Weighted harmonic mean of precision and recall; 0 when both are 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> Result<f64, ScoreError> {
    if !(0.0..=1.0).contains(&precision) {
        return Err(ScoreError::InvalidFraction {
            name: "precision",
            value: precision,
        });
    }
    if !(0.0..=1.0).contains(&recall) {
        return Err(ScoreError::InvalidFraction {
            name: "recall",
            value: recall,
        });
    }
    check_beta(beta)?;
    Ok(f_beta_unchecked(precision, recall, beta))
}

fn check_beta(beta: f64) -> Result<(), ScoreError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(ScoreError::InvalidBeta(beta))
    }
}

fn f_beta_unchecked(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}

/// True positive, false positive and false negative edit counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Counts { tp, fp, fn_ }
    }

    /// 1.0 when nothing was proposed.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// 1.0 when nothing was required.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f_beta(&self, beta: f64) -> f64 {
        f_beta_unchecked(self.precision(), self.recall(), beta)
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, rhs: Counts) -> Counts {
        Counts {
            tp: self.tp + rhs.tp,
            fp: self.fp + rhs.fp,
            fn_: self.fn_ + rhs.fn_,
        }
    }
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        *self = *self + rhs;
    }
}

fn ratio(num: u64, denom: u64) -> f64 {
    if denom == 0 {
        1.0
    } else {
        num as f64 / denom as f64
    }
}

/// For each gold edit, whether some hypothesis edit has the same span and
/// replacement. Each hypothesis edit matches at most one gold edit.
fn gold_matches(hyp: &[Edit], gold: &[Edit]) -> Vec<bool> {
    let mut available: HashMap<_, usize> = HashMap::new();
    for e in hyp {
        *available.entry(e.span_key()).or_default() += 1;
    }
    gold.iter()
        .map(|e| match available.get_mut(&e.span_key()) {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        })
        .collect()
}

fn check_sequence(edits: &[Edit], side: &'static str) -> Result<(), ScoreError> {
    validate_edits(edits, usize::MAX).map_err(|source| ScoreError::Overlap { side, source })
}

/// Counts matches between hypothesis and gold edits of one sentence.
/// Error types are ignored.
pub fn match_edits(hyp: &[Edit], gold: &[Edit]) -> Result<Counts, ScoreError> {
    check_sequence(hyp, "hypothesis")?;
    check_sequence(gold, "gold")?;
    let tp = gold_matches(hyp, gold).into_iter().filter(|&m| m).count() as u64;
    Ok(Counts::new(tp, hyp.len() as u64 - tp, gold.len() as u64 - tp))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeRecall {
    pub matched: u64,
    pub total: u64,
    pub recall: f64,
}

#[derive(Debug, Default, Clone)]
struct TypeTally(BTreeMap<String, (u64, u64)>);

impl TypeTally {
    fn add(&mut self, hyp: &[Edit], gold: &[Edit]) {
        for (edit, matched) in gold.iter().zip(gold_matches(hyp, gold)) {
            let key = if edit.error_type.is_empty() {
                UNSPECIFIED_TYPE
            } else {
                edit.error_type.as_str()
            };
            let slot = self.0.entry(key.to_string()).or_default();
            slot.0 += u64::from(matched);
            slot.1 += 1;
        }
    }

    fn finish(self) -> BTreeMap<String, TypeRecall> {
        self.0
            .into_iter()
            .map(|(t, (matched, total))| {
                (
                    t,
                    TypeRecall {
                        matched,
                        total,
                        recall: ratio(matched, total),
                    },
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    #[serde(rename = "per_type")]
    pub per_type_recall: BTreeMap<String, TypeRecall>,
}

impl ScoreReport {
    pub fn counts(&self) -> Counts {
        Counts::new(self.tp, self.fp, self.fn_)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary table.
    pub fn render_table(&self, with_types: bool) -> String {
        let mut out = String::new();
        let f_label = format!("F{}", self.beta);
        let _ = writeln!(
            out,
            "{:>8} {:>8} {:>8} {:>10} {:>10} {:>10}",
            "TP", "FP", "FN", "Prec", "Rec", f_label
        );
        let _ = writeln!(
            out,
            "{:>8} {:>8} {:>8} {:>10.4} {:>10.4} {:>10.4}",
            self.tp, self.fp, self.fn_, self.precision, self.recall, self.f_beta
        );
        if with_types && !self.per_type_recall.is_empty() {
            let _ = writeln!(out);
            out.push_str(&type_table(&self.per_type_recall));
        }
        out
    }
}

fn type_table(types: &BTreeMap<String, TypeRecall>) -> String {
    let width = types.keys().map(|k| k.chars().count()).max().unwrap_or(0).max(4);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$} {:>8} {:>8} {:>8}",
        "Type", "Matched", "Total", "Recall"
    );
    for (t, r) in types {
        let _ = writeln!(out, "{:<width$} {:>8} {:>8} {:>8.4}", t, r.matched, r.total, r.recall);
    }
    out
}

/// Per-type recall table for one annotator.
pub fn render_type_table(recall: &PerTypeRecall) -> String {
    let mut out = format!("Annotator {}", recall.annotator);
    if recall.skipped_records > 0 {
        let _ = write!(
            out,
            " ({} records without this annotator skipped)",
            recall.skipped_records
        );
    }
    out.push('\n');
    out.push_str(&type_table(&recall.types));
    out
}

/// Outcome of scoring one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceScore {
    pub annotator: u32,
    pub counts: Counts,
    pub hypothesis_edits: Vec<Edit>,
}

/// Incremental corpus scorer.
///
/// Sentences must be added in corpus order: for each one the annotator whose
/// edits give the best cumulative F-score so far is selected, lower id on ties.
#[derive(Debug, Clone)]
pub struct Scorer {
    beta: f64,
    options: ExtractOptions,
    counts: Counts,
    types: TypeTally,
}

impl Scorer {
    pub fn new(beta: f64) -> Result<Self, ScoreError> {
        Self::with_options(beta, ExtractOptions::default())
    }

    pub fn with_options(beta: f64, options: ExtractOptions) -> Result<Self, ScoreError> {
        check_beta(beta)?;
        Ok(Scorer {
            beta,
            options,
            counts: Counts::default(),
            types: TypeTally::default(),
        })
    }

    pub fn counts(&self) -> Counts {
        self.counts
    }

    pub fn add(&mut self, gold: &M2Record, hypothesis: &Sentence) -> Result<SentenceScore, ScoreError> {
        let hyp_edits = parallel_edits(&gold.source, hypothesis, 0, &self.options);
        self.add_edits(gold, hyp_edits)
    }

    /// Like [`Scorer::add`], with hypothesis edits already extracted.
    pub fn add_edits(&mut self, gold: &M2Record, hyp_edits: Vec<Edit>) -> Result<SentenceScore, ScoreError> {
        let mut best: Option<(u32, Counts, f64)> = None;
        for (&annotator, gold_edits) in &gold.edits {
            let counts = match_edits(&hyp_edits, gold_edits)?;
            let f = (self.counts + counts).f_beta(self.beta);
            if best.is_none_or(|(_, _, best_f)| f > best_f) {
                best = Some((annotator, counts, f));
            }
        }
        let (annotator, counts) = match best {
            Some((a, c, _)) => (a, c),
            None => {
                check_sequence(&hyp_edits, "hypothesis")?;
                (0, Counts::new(0, hyp_edits.len() as u64, 0))
            }
        };
        if let Some(gold_edits) = gold.edits.get(&annotator) {
            self.types.add(&hyp_edits, gold_edits);
        }
        self.counts += counts;
        Ok(SentenceScore {
            annotator,
            counts,
            hypothesis_edits: hyp_edits,
        })
    }

    pub fn finish(self) -> ScoreReport {
        let c = self.counts;
        ScoreReport {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision: c.precision(),
            recall: c.recall(),
            f_beta: c.f_beta(self.beta),
            beta: self.beta,
            per_type_recall: self.types.finish(),
        }
    }
}

fn check_lengths(hyp: usize, gold: usize) -> Result<(), ScoreError> {
    if hyp == gold {
        Ok(())
    } else {
        Err(ScoreError::LengthMismatch {
            hyp,
            gold,
            index: hyp.min(gold),
        })
    }
}

/// Scores a corrected corpus against gold M2 records.
pub fn score_corpus(hyp: &[Sentence], gold: &[M2Record], beta: f64) -> Result<ScoreReport, ScoreError> {
    check_lengths(hyp.len(), gold.len())?;
    let mut scorer = Scorer::new(beta)?;
    for (record, sentence) in gold.iter().zip(hyp) {
        scorer.add(record, sentence)?;
    }
    Ok(scorer.finish())
}

/// Recall per gold error type for one fixed annotator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerTypeRecall {
    pub annotator: u32,
    pub types: BTreeMap<String, TypeRecall>,
    /// Records that have no edits from the requested annotator.
    pub skipped_records: u64,
}

/// Incremental form of [`per_type_recall`].
#[derive(Debug, Clone)]
pub struct TypeRecallCounter {
    annotator: u32,
    options: ExtractOptions,
    tally: TypeTally,
    skipped: u64,
}

impl TypeRecallCounter {
    pub fn new(annotator: u32) -> Self {
        TypeRecallCounter {
            annotator,
            options: ExtractOptions::default(),
            tally: TypeTally::default(),
            skipped: 0,
        }
    }

    pub fn add(&mut self, gold: &M2Record, hypothesis: &Sentence) {
        match gold.edits.get(&self.annotator) {
            Some(gold_edits) => {
                let hyp_edits = parallel_edits(&gold.source, hypothesis, 0, &self.options);
                self.tally.add(&hyp_edits, gold_edits);
            }
            None => self.skipped += 1,
        }
    }

    pub fn add_edits(&mut self, gold: &M2Record, hyp_edits: &[Edit]) {
        match gold.edits.get(&self.annotator) {
            Some(gold_edits) => self.tally.add(hyp_edits, gold_edits),
            None => self.skipped += 1,
        }
    }

    pub fn finish(self) -> PerTypeRecall {
        PerTypeRecall {
            annotator: self.annotator,
            types: self.tally.finish(),
            skipped_records: self.skipped,
        }
    }
}

pub fn per_type_recall(gold: &[M2Record], hyp: &[Sentence], annotator: u32) -> Result<PerTypeRecall, ScoreError> {
    check_lengths(hyp.len(), gold.len())?;
    let mut counter = TypeRecallCounter::new(annotator);
    for (record, sentence) in gold.iter().zip(hyp) {
        counter.add(record, sentence);
    }
    Ok(counter.finish())
}
