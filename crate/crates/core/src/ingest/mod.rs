//! Gauge and grid ingestion, regression-sample assembly and predictor sets.
//!
//! Three on-disk formats are read here: the GHCNd `.dly` fixed-width daily
//! files, the GHCNd station inventory, and a plain-text grid-series container
//! holding one satellite product. Samples are assembled per (station, date)
//! and can be stored as a little-endian columnar cache or as CSV.

mod cache;
mod ghcnd;
mod grid_series;
mod predictors;
mod samples;

pub use cache::{read_sample_cache, write_sample_cache, write_samples_csv, CACHE_MAGIC, CACHE_VERSION};
pub use ghcnd::{
    build_station_records, parse_ghcnd_dly, parse_ghcnd_stations, write_ghcnd_dly, write_ghcnd_stations, DailySeries,
    GaugeData, Observation, StationInventory, StationMeta, StationRecord,
};
pub use grid_series::{parse_grid_series, read_grid_series, write_grid_series, GridSeries, ProductTag};
pub use predictors::{select_predictors, Predictor, PredictorSet, ALL_PREDICTORS, PREDICTAND_NAME};
pub use samples::{assemble_samples, staggered_target, AssemblyOptions, RegressionSample, SampleTable, StudyWindow};

use thiserror::Error;

use crate::spatial::SpatialError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{what}, line {line}: {msg}")]
    Parse {
        what: &'static str,
        line: usize,
        msg: String,
    },
    #[error("duplicate station id {0:?}")]
    DuplicateStation(String),
    #[error("no stations to assemble samples from")]
    EmptyStations,
    #[error("study window is empty: start {start} is after end {end}")]
    EmptyWindow {
        start: chrono::NaiveDate,
        end: chrono::NaiveDate,
    },
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("sample cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IngestError {
    pub(crate) fn parse(what: &'static str, line: usize, msg: impl Into<String>) -> Self {
        Self::Parse {
            what,
            line,
            msg: msg.into(),
        }
    }
}
