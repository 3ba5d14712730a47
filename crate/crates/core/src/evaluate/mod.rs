//! Cross-validation, scoring and ranking.
//!
//! Scores are in-memory tables; file emission lives in [`crate::cli`].

mod cv;
mod folds;
mod ranking;
mod scores;
mod spearman;

pub use cv::{cross_validate, design_matrix, CellPredictions, CvOptions, EvaluationReport, RankingSummary};
pub use folds::{make_folds, make_folds_k, make_sample_folds, FoldAssignment, SplitUnit};
pub use ranking::{mean_rankings, rank_per_case, RankTable};
pub use scores::{
    mean_relative_score, median_squared_error, relative_score, squared_error, CellScore, ReferenceMode, RelativeScore,
};
pub use spearman::{average_ranks, spearman, spearman_matrix, CorrelationMatrix};

use thiserror::Error;

use crate::learners::LearnError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("need at least {needed} units to form {folds} folds, got {got}")]
    TooFewUnits { needed: usize, folds: usize, got: usize },
    #[error("median of an empty error list")]
    EmptyErrors,
    #[error("reference score is zero; relative score undefined")]
    ZeroReference,
    #[error("cells come from different test folds ({cell} vs {reference})")]
    FoldMismatch { cell: usize, reference: usize },
    #[error("expected {expected} fold scores, got {got}")]
    MissingFold { expected: usize, got: usize },
    #[error("ranking needs at least 2 contenders, got {0}")]
    TooFewContenders(usize),
    #[error("inconsistent ranking input: {0}")]
    Ranking(String),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("fold {fold}: {source}")]
    Fit {
        fold: usize,
        #[source]
        source: LearnError,
    },
}
