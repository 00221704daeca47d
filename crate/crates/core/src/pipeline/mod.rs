//! Corpus statistics and finetuning-mix construction.

mod mix;
mod stats;

pub use mix::{build_mix, mix_counts, Balance, MixPart, MixSpec, MixSummary};
pub use stats::{count_documents, render_stats_table, stats_from_m2, stats_from_parallel, CorpusStats, InputFormat};

use std::path::PathBuf;

use thiserror::Error;

use crate::m2::M2Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    M2(#[from] M2Error),
    #[error("{path}: line {line} is not a parallel pair (no tab)")]
    NotParallel { path: String, line: usize },
    #[error("the authentic pool is empty")]
    EmptyAuthentic,
    #[error("cannot reach ratio {ratio}: {message}")]
    Ratio { ratio: String, message: String },
    #[error("document index: {0}")]
    DocIndex(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
