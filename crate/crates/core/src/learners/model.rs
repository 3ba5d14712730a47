use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    fit_gbm, fit_linear, fit_random_forest, fit_xgb, FeatureMatrix, ForestParams, GbmParams, Hyperparams, LearnError,
    RegressionTree, XgbParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Linear,
    RandomForest,
    Gbm,
    Xgboost,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Linear,
        Algorithm::RandomForest,
        Algorithm::Gbm,
        Algorithm::Xgboost,
    ];

    /// Identifier used in configs and reports.
    pub fn key(&self) -> &'static str {
        match self {
            Algorithm::Linear => "linear",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Gbm => "gbm",
            Algorithm::Xgboost => "xgboost",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Linear => "linear regression",
            Algorithm::RandomForest => "random forests",
            Algorithm::Gbm => "gbm",
            Algorithm::Xgboost => "XGBoost",
        }
    }

    pub fn fit(&self, x: &FeatureMatrix, y: &[f64], params: &Hyperparams) -> Result<FittedModel, LearnError> {
        Ok(match self {
            Algorithm::Linear => FittedModel::Linear(fit_linear(x, y)?),
            Algorithm::RandomForest => FittedModel::Forest(fit_random_forest(x, y, &params.random_forest)?),
            Algorithm::Gbm => FittedModel::Gbm(fit_gbm(x, y, &params.gbm)?),
            Algorithm::Xgboost => FittedModel::Xgb(fit_xgb(x, y, &params.xgboost)?),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.key() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// Equal-weight average of trees.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

impl ForestModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64
    }
}

/// `init + Σ shrinkage · tree(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GbmModel {
    pub params: GbmParams,
    pub n_features: usize,
    pub init: f64,
    pub trees: Vec<RegressionTree>,
}

impl GbmModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut f = self.init;
        for t in &self.trees {
            f += self.params.shrinkage * t.predict(x);
        }
        f
    }
}

/// `base_score + Σ eta · tree(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct XgbModel {
    pub params: XgbParams,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

impl XgbModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut f = self.params.base_score;
        for t in &self.trees {
            f += self.params.eta * t.predict(x);
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Linear(LinearModel),
    Forest(ForestModel),
    Gbm(GbmModel),
    Xgb(XgbModel),
}

impl FittedModel {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            FittedModel::Linear(_) => Algorithm::Linear,
            FittedModel::Forest(_) => Algorithm::RandomForest,
            FittedModel::Gbm(_) => Algorithm::Gbm,
            FittedModel::Xgb(_) => Algorithm::Xgboost,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            FittedModel::Linear(m) => m.coefficients.len(),
            FittedModel::Forest(m) => m.n_features,
            FittedModel::Gbm(m) => m.n_features,
            FittedModel::Xgb(m) => m.n_features,
        }
    }

    pub fn trees(&self) -> &[RegressionTree] {
        match self {
            FittedModel::Linear(_) => &[],
            FittedModel::Forest(m) => &m.trees,
            FittedModel::Gbm(m) => &m.trees,
            FittedModel::Xgb(m) => &m.trees,
        }
    }

    fn predict_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            FittedModel::Linear(m) => m.predict_row(x),
            FittedModel::Forest(m) => m.predict_row(x),
            FittedModel::Gbm(m) => m.predict_row(x),
            FittedModel::Xgb(m) => m.predict_row(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, LearnError> {
        if x.len() != self.n_features() {
            return Err(LearnError::FeatureLength {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub fn predict_batch(&self, x: &FeatureMatrix) -> Result<Vec<f64>, LearnError> {
        if x.n_cols() != self.n_features() {
            return Err(LearnError::FeatureLength {
                expected: self.n_features(),
                got: x.n_cols(),
            });
        }
        Ok(x.rows().map(|r| self.predict_unchecked(r)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_prediction() {
        let m = FittedModel::Linear(LinearModel {
            intercept: 1.0,
            coefficients: vec![2.0, 0.0],
        });
        assert_eq!(m.predict(&[3.0, 9.0]).unwrap(), 7.0);
        assert_eq!(
            m.predict(&[3.0]),
            Err(LearnError::FeatureLength { expected: 2, got: 1 })
        );
    }

    #[test]
    fn forest_of_constants_averages() {
        let m = FittedModel::Forest(ForestModel {
            params: ForestParams::default(),
            n_features: 1,
            trees: vec![RegressionTree::constant(4.0), RegressionTree::constant(6.0)],
        });
        assert_eq!(m.predict(&[0.0]).unwrap(), 5.0);
    }

    #[test]
    fn algorithm_keys() {
        for a in Algorithm::ALL {
            assert_eq!(a.key().parse::<Algorithm>(), Ok(a));
        }
        assert!("svm".parse::<Algorithm>().is_err());
    }
}
