//! Configuration, synthetic data and the `synth`, `run`, `explore` and
//! `report` commands. Every command builds its outputs in memory and writes
//! them only once all of them exist.

mod commands;
mod config;
mod figures;
mod report;
mod synth;

pub use commands::{
    cmd_explore, cmd_report, cmd_run, cmd_synth, explore, explore_outputs, load_samples, report_outputs,
    run_evaluation, run_outputs, synth_outputs, Exploration, OutputFormat, Outputs,
};
pub use config::{
    CvConfig, ImergTarget, InputPaths, ModelsConfig, OutputConfig, ReferenceSelection, RunConfig, StudyConfig,
};
pub use figures::{build_figures, render_markdown, render_svg, Figure, Panel};
pub use report::{parse_report_csv, report_json, report_rows, write_report_csv, Metric, ReportRow, REPORT_HEADER};
pub use synth::{generate, ProductNoise, SynthFiles, SynthSpec};

use thiserror::Error;

use crate::evaluate::EvalError;
use crate::ingest::IngestError;
use crate::learners::LearnError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("report schema: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 usage or configuration, 2 data, 3 internal or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) | CliError::Schema(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(io) => CliError::Io(io),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Config(m) => CliError::Config(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::InvalidParams(_) | LearnError::InvalidMtry { .. } => CliError::Config(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
