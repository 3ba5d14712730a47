use serde::{Deserialize, Serialize};

use super::LearnError;

/// Random forest settings. `mtry = None` means `floor(sqrt(p))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub mtry: Option<usize>,
    pub min_node: usize,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            mtry: None,
            min_node: 5,
            bootstrap: true,
            max_depth: None,
            seed: 42,
        }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, p: usize) -> usize {
        self.mtry.unwrap_or_else(|| ((p as f64).sqrt().floor() as usize).max(1))
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        if self.n_trees == 0 {
            return Err(LearnError::InvalidParams(
                "random forest n_trees must be positive".into(),
            ));
        }
        if self.min_node == 0 {
            return Err(LearnError::InvalidParams(
                "random forest min_node must be positive".into(),
            ));
        }
        if self.mtry == Some(0) {
            return Err(LearnError::InvalidParams("random forest mtry must be positive".into()));
        }
        Ok(())
    }
}

/// Gradient boosting settings (squared loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbmParams {
    pub n_trees: usize,
    pub depth: usize,
    pub shrinkage: f64,
    pub min_obs_node: usize,
    pub bag_fraction: f64,
    pub seed: u64,
}

impl Default for GbmParams {
    fn default() -> Self {
        Self {
            n_trees: 500,
            depth: 1,
            shrinkage: 0.1,
            min_obs_node: 10,
            bag_fraction: 0.5,
            seed: 42,
        }
    }
}

impl GbmParams {
    pub fn validate(&self) -> Result<(), LearnError> {
        if self.depth == 0 {
            return Err(LearnError::InvalidParams("gbm depth must be positive".into()));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(LearnError::InvalidParams(format!(
                "gbm shrinkage {} not in (0, 1]",
                self.shrinkage
            )));
        }
        if self.min_obs_node == 0 {
            return Err(LearnError::InvalidParams("gbm min_obs_node must be positive".into()));
        }
        if !(self.bag_fraction > 0.0 && self.bag_fraction <= 1.0) {
            return Err(LearnError::InvalidParams(format!(
                "gbm bag_fraction {} not in (0, 1]",
                self.bag_fraction
            )));
        }
        Ok(())
    }
}

/// Regularized second-order boosting settings (squared loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XgbParams {
    pub n_rounds: usize,
    pub eta: f64,
    pub max_depth: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub base_score: f64,
}

impl Default for XgbParams {
    fn default() -> Self {
        Self {
            n_rounds: 500,
            eta: 0.3,
            max_depth: 6,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            base_score: 0.5,
        }
    }
}

impl XgbParams {
    pub fn validate(&self) -> Result<(), LearnError> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(LearnError::InvalidParams(format!(
                "xgboost eta {} not in (0, 1]",
                self.eta
            )));
        }
        if self.max_depth == 0 {
            return Err(LearnError::InvalidParams("xgboost max_depth must be positive".into()));
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("min_child_weight", self.min_child_weight),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(LearnError::InvalidParams(format!(
                    "xgboost {name} {v} must be finite and >= 0"
                )));
            }
        }
        if !self.base_score.is_finite() {
            return Err(LearnError::InvalidParams("xgboost base_score must be finite".into()));
        }
        Ok(())
    }
}

/// Settings for every algorithm.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub random_forest: ForestParams,
    pub gbm: GbmParams,
    pub xgboost: XgbParams,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), LearnError> {
        self.random_forest.validate()?;
        self.gbm.validate()?;
        self.xgboost.validate()
    }
}
