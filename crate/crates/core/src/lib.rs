//! Merging gridded satellite precipitation with gauge observations.
//!
//! The crate is organized bottom-up:
//!
//! - [`spatial`]: great-circle distances, nearest grid-point queries and
//!   bilinear regridding between regular lat/lon grids.
//! - [`ingest`]: GHCNd daily and station-inventory parsers, the grid-series
//!   text container, regression-sample assembly and predictor sets.
//! - [`learners`]: linear regression, regression trees, random forests,
//!   gradient boosting and regularized second-order boosting, plus gain
//!   importance and model serialization.
//! - [`evaluate`]: fold assignment, median squared error, relative scores,
//!   rankings and Spearman correlation.
//! - [`cli`]: configuration, synthetic data generation and the `synth`,
//!   `run`, `explore` and `report` commands.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod evaluate;
pub mod ingest;
pub mod learners;
pub mod spatial;

pub use evaluate::{EvalError, EvaluationReport};
pub use ingest::{GridSeries, IngestError, PredictorSet, RegressionSample, SampleTable, StationRecord};
pub use learners::{FeatureMatrix, FittedModel, LearnError};
pub use spatial::{GeoPoint, GridSpec, NeighborSet, SpatialError};
