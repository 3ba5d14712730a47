//! Run configuration (TOML).
//!
//! ```toml
//! seed = 42                      # fold assignment
//!
//! [synth]                        # or [input] with four paths
//! n_stations = 100
//!
//! [study]
//! start = "2014-01-01"
//! end = "2015-12-31"
//! date_offset_days = 0
//! neighbors = 4
//! imerg_target = "staggered"     # or "persiann"
//!
//! [cv]
//! folds = 2
//! split_unit = "station"         # or "sample"
//!
//! [models]
//! algorithms = ["linear", "random_forest", "gbm", "xgboost"]
//! predictor_sets = [1, 2, 3]
//! reference = "both"             # or "same_set", "set1"
//!
//! [random_forest]                # also [gbm], [xgboost]
//! n_trees = 500
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Unknown keys are rejected. Relative input paths resolve against the
//! directory holding the config file.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{CliError, SynthSpec};
use crate::evaluate::{CvOptions, ReferenceMode, SplitUnit};
use crate::ingest::{staggered_target, PredictorSet, StudyWindow};
use crate::learners::{Algorithm, ForestParams, GbmParams, Hyperparams, XgbParams};
use crate::spatial::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub gauges: PathBuf,
    pub stations: PathBuf,
    pub persiann: PathBuf,
    pub imerg: PathBuf,
}

/// Grid the IMERG-side product is regridded onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImergTarget {
    /// PERSIANN grid shifted by half a cell (centers at PERSIANN cell corners).
    #[default]
    Staggered,
    /// The PERSIANN grid itself.
    Persiann,
}

impl ImergTarget {
    pub fn resolve(&self, persiann: &GridSpec) -> Result<GridSpec, CliError> {
        match self {
            ImergTarget::Staggered => Ok(staggered_target(persiann)?),
            ImergTarget::Persiann => Ok(*persiann),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub date_offset_days: i64,
    pub neighbors: usize,
    pub imerg_target: ImergTarget,
}

impl Default for StudyConfig {
    fn default() -> Self {
        let w = StudyWindow::default();
        Self {
            start: w.start,
            end: w.end,
            date_offset_days: w.offset_days,
            neighbors: 4,
            imerg_target: ImergTarget::default(),
        }
    }
}

impl StudyConfig {
    pub fn window(&self) -> StudyWindow {
        StudyWindow {
            start: self.start,
            end: self.end,
            offset_days: self.date_offset_days,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub folds: usize,
    pub split_unit: SplitUnit,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 2,
            split_unit: SplitUnit::Station,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSelection {
    #[default]
    Both,
    SameSet,
    Set1,
}

impl ReferenceSelection {
    pub fn modes(&self) -> Vec<ReferenceMode> {
        match self {
            ReferenceSelection::Both => ReferenceMode::ALL.to_vec(),
            ReferenceSelection::SameSet => vec![ReferenceMode::SameSet],
            ReferenceSelection::Set1 => vec![ReferenceMode::Set1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsConfig {
    pub algorithms: Vec<Algorithm>,
    pub predictor_sets: Vec<u8>,
    pub reference: ReferenceSelection,
}

impl Default for ModelsConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            predictor_sets: vec![1, 2, 3],
            reference: ReferenceSelection::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub input: Option<InputPaths>,
    pub synth: Option<SynthSpec>,
    pub study: StudyConfig,
    pub cv: CvConfig,
    pub models: ModelsConfig,
    pub random_forest: ForestParams,
    pub gbm: GbmParams,
    pub xgboost: XgbParams,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            input: None,
            synth: None,
            study: StudyConfig::default(),
            cv: CvConfig::default(),
            models: ModelsConfig::default(),
            random_forest: ForestParams::default(),
            gbm: GbmParams::default(),
            xgboost: XgbParams::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load and validate; relative input paths are anchored at the file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(input) = cfg.input.as_mut() {
            for p in [
                &mut input.gauges,
                &mut input.stations,
                &mut input.persiann,
                &mut input.imerg,
            ] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.input.is_some() && self.synth.is_some() {
            return bad("[input] and [synth] are mutually exclusive".into());
        }
        if self.study.neighbors != 4 {
            return bad(format!(
                "study.neighbors = {}; only 4 is supported",
                self.study.neighbors
            ));
        }
        if self.study.start > self.study.end {
            return bad(format!(
                "study.start {} is after study.end {}",
                self.study.start, self.study.end
            ));
        }
        if self.cv.folds < 2 {
            return bad(format!("cv.folds = {} must be at least 2", self.cv.folds));
        }
        self.predictor_sets()?;
        if let Some(s) = &self.synth {
            s.validate()?;
        }
        self.hyperparams()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn predictor_sets(&self) -> Result<Vec<PredictorSet>, CliError> {
        self.models
            .predictor_sets
            .iter()
            .map(|&n| {
                PredictorSet::from_number(n)
                    .ok_or_else(|| CliError::Config(format!("models.predictor_sets: unknown set {n}")))
            })
            .collect()
    }

    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            random_forest: self.random_forest.clone(),
            gbm: self.gbm.clone(),
            xgboost: self.xgboost.clone(),
        }
    }

    /// The synth spec to use when no `[input]` is given.
    pub fn synth_or_default(&self) -> SynthSpec {
        self.synth.clone().unwrap_or_default()
    }

    pub fn cv_options(&self) -> Result<CvOptions, CliError> {
        Ok(CvOptions {
            algorithms: self.models.algorithms.clone(),
            predictor_sets: self.predictor_sets()?,
            n_folds: self.cv.folds,
            split_unit: self.cv.split_unit,
            seed: self.seed,
            references: self.models.reference.modes(),
            hyperparams: self.hyperparams(),
        })
    }
}
