//! Regression learners implemented from primitives.
//!
//! All tree learners share one exact greedy builder ([`tree`]) that scans
//! presorted feature columns. The node statistic is a pair of sums `(G, H)`
//! and a node's score is `G² / (H + λ)`:
//!
//! - CART / random forest / gbm: `g = w·y`, `h = w`, `λ = 0`, so the split
//!   gain is exactly the reduction in the sum of squared deviations and the
//!   leaf value `G / H` is the (weighted) mean.
//! - Second-order boosting: `g` is the negated squared-loss gradient
//!   `2(y - F)`, `h = 2`, giving leaf weight `-Σgrad / (Σhess + λ)` and the
//!   regularized gain `½[...] - γ`.

mod forest;
mod gbm;
mod importance;
mod linear;
mod matrix;
mod model;
mod params;
mod serialize;
pub mod tree;
mod xgb;

pub use forest::fit_random_forest;
pub use gbm::{fit_gbm, fit_gbm_traced};
pub use importance::{gain_importance, ImportanceTable};
pub use linear::fit_linear;
pub use matrix::FeatureMatrix;
pub use model::{Algorithm, FittedModel, ForestModel, GbmModel, LinearModel, XgbModel};
pub use params::{ForestParams, GbmParams, Hyperparams, XgbParams};
pub use serialize::{dump_text, read_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use tree::{fit_tree, Node, RegressionTree, TreeConfig};
pub use xgb::{fit_xgb, fit_xgb_traced, xgb_split_gain};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("need more samples than predictors: n = {n}, p = {p}")]
    TooFewSamples { n: usize, p: usize },
    #[error("design matrix is rank deficient; collinear predictor columns {columns:?}")]
    RankDeficient { columns: Vec<usize> },
    #[error("mtry = {mtry} must be in 1..={p}")]
    InvalidMtry { mtry: usize, p: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidParams(String),
    #[error("feature vector has length {got}, model expects {expected}")]
    FeatureLength { expected: usize, got: usize },
    #[error("{rows} rows but {targets} targets")]
    TargetLength { rows: usize, targets: usize },
    #[error("empty training set")]
    Empty,
    #[error("non-finite value in training data")]
    NonFinite,
    #[error("model has no tree splits to attribute gain to")]
    NotTreeModel,
    #[error("model file: {0}")]
    Format(String),
}

pub(crate) fn check_training(x: &FeatureMatrix, y: &[f64]) -> Result<(), LearnError> {
    if x.n_rows() != y.len() {
        return Err(LearnError::TargetLength {
            rows: x.n_rows(),
            targets: y.len(),
        });
    }
    if y.is_empty() {
        return Err(LearnError::Empty);
    }
    if !y.iter().all(|v| v.is_finite()) || !x.as_slice().iter().all(|v| v.is_finite()) {
        return Err(LearnError::NonFinite);
    }
    Ok(())
}
