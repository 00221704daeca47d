//! Corpus tooling for grammatical error correction.
//!
//! * [`text`]: tokens, sentences, the rule tokenizer and per-language noising profiles.
//! * [`align`]: token alignment, edit extraction, swap merging and error rates.
//! * [`m2`]: the M2 annotation format.
//! * [`score`]: MaxMatch-style precision, recall and F-beta.
//! * [`noise`]: seeded synthetic error injection.
//! * [`pipeline`]: corpus statistics and finetuning mixes.
//! * [`cli`]: the `gectool` command line.

pub mod align;
pub mod cli;
pub mod m2;
pub mod manifest;
pub mod noise;
pub mod pipeline;
pub mod score;
pub mod text;

pub use align::{align, apply_edits, error_rate, extract_edits, merge_swaps, Alignment, Edit};
pub use m2::{emit_m2, from_parallel, parse_m2, M2Record};
pub use noise::{ConfusionLexicon, NoiseConfig, Noiser};
pub use score::{f_beta, score_corpus, ScoreReport};
pub use text::{builtin_profile, tokenize, LanguageProfile, Sentence, Token};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Profile(#[from] text::ProfileError),
    #[error(transparent)]
    Apply(#[from] align::ApplyError),
    #[error(transparent)]
    ErrorRate(#[from] align::ErrorRateError),
    #[error(transparent)]
    M2(#[from] m2::M2Error),
    #[error(transparent)]
    Score(#[from] score::ScoreError),
    #[error(transparent)]
    Noise(#[from] noise::NoiseError),
    #[error(transparent)]
    Lexicon(#[from] noise::LexiconError),
    #[error(transparent)]
    Pipeline(#[from] pipeline::PipelineError),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
