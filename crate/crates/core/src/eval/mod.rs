//! Subjective scores, content-separated splits and the fusion benchmark.

mod benchmark;
mod mos;
mod split;

pub use benchmark::{
    run_benchmark, run_benchmark_repeated, run_benchmark_with_scores, BenchmarkConfig, BenchmarkReport, CellResult,
    ScoreTable, SingleModeResult,
};
pub use mos::{compute_mos, MosTable};
pub use split::{split_by_content, SplitPlan, TRAIN_FRACTION};

pub use crate::stats::{plcc, srcc, StatsError};

use crate::store::StoreError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("subject `{0}` gave the same rating to every sequence")]
    ConstantRater(String),
    #[error("need at least 2 rated sequences, got {0}")]
    TooFewSequences(usize),
    #[error("need at least 2 distinct contents to split, got {0}")]
    TooFewContents(usize),
    #[error("no `{model}` score for entry `{id}`")]
    MissingScore { id: String, model: String },
    #[error("{model} expects {expected} features, entry `{id}` has {actual}")]
    FeatureArity {
        model: String,
        id: String,
        expected: usize,
        actual: usize,
    },
    #[error("writing CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}
