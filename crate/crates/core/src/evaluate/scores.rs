use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::ingest::PredictorSet;
use crate::learners::Algorithm;

pub fn squared_error(prediction: f64, observation: f64) -> f64 {
    let d = prediction - observation;
    d * d
}

/// Median; even lengths take the mean of the two central values.
pub fn median_squared_error(errors: &[f64]) -> Result<f64, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::EmptyErrors);
    }
    if let Some(v) = errors.iter().find(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite(format!("squared error {v}")));
    }
    let mut v = errors.to_vec();
    let mid = v.len() / 2;
    let (lower, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if errors.len() % 2 == 1 {
        return Ok(upper);
    }
    let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lower + upper) / 2.0)
}

/// MedSE of one {algorithm, predictor set, test fold}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellScore {
    pub algorithm: Algorithm,
    pub predictor_set: PredictorSet,
    pub test_fold: usize,
    pub med_se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    /// Linear regression with the same predictor set.
    SameSet,
    /// Linear regression with predictor set 1.
    Set1,
}

impl ReferenceMode {
    pub const ALL: [ReferenceMode; 2] = [ReferenceMode::SameSet, ReferenceMode::Set1];

    pub fn key(&self) -> &'static str {
        match self {
            ReferenceMode::SameSet => "same_set",
            ReferenceMode::Set1 => "set1",
        }
    }

    pub fn reference_set(&self, set: PredictorSet) -> PredictorSet {
        match self {
            ReferenceMode::SameSet => set,
            ReferenceMode::Set1 => PredictorSet::Set1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeScore {
    pub algorithm: Algorithm,
    pub predictor_set: PredictorSet,
    pub reference_algorithm: Algorithm,
    pub reference_set: PredictorSet,
    pub test_fold: usize,
    /// `100 · (cell − ref) / ref`; negative is better than the reference.
    pub raw_relative: f64,
    /// `−raw_relative`.
    pub improvement: f64,
}

pub fn relative_score(cell: &CellScore, reference: &CellScore) -> Result<RelativeScore, EvalError> {
    if cell.test_fold != reference.test_fold {
        return Err(EvalError::FoldMismatch {
            cell: cell.test_fold,
            reference: reference.test_fold,
        });
    }
    if reference.med_se == 0.0 {
        return Err(EvalError::ZeroReference);
    }
    let raw = 100.0 * (cell.med_se - reference.med_se) / reference.med_se;
    Ok(RelativeScore {
        algorithm: cell.algorithm,
        predictor_set: cell.predictor_set,
        reference_algorithm: reference.algorithm,
        reference_set: reference.predictor_set,
        test_fold: cell.test_fold,
        raw_relative: raw,
        improvement: 0.0 - raw,
    })
}

/// Mean of the per-fold values of one cell; exactly `n_folds` distinct folds required.
pub fn mean_relative_score(scores: &[RelativeScore], n_folds: usize) -> Result<f64, EvalError> {
    let mut folds: Vec<usize> = scores.iter().map(|s| s.test_fold).collect();
    folds.sort_unstable();
    folds.dedup();
    if scores.len() != n_folds || folds.len() != n_folds {
        return Err(EvalError::MissingFold {
            expected: n_folds,
            got: folds.len(),
        });
    }
    Ok(scores.iter().map(|s| s.raw_relative).sum::<f64>() / n_folds as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(algorithm: Algorithm, med_se: f64) -> CellScore {
        CellScore {
            algorithm,
            predictor_set: PredictorSet::Set1,
            test_fold: 1,
            med_se,
        }
    }

    #[test]
    fn squared_error_values() {
        assert_eq!(squared_error(3.0, 3.0), 0.0);
        assert_eq!(squared_error(5.0, 2.0), 9.0);
    }

    #[test]
    fn medians() {
        assert_eq!(median_squared_error(&[1.0, 9.0, 4.0]).unwrap(), 4.0);
        assert_eq!(median_squared_error(&[1.0, 3.0]).unwrap(), 2.0);
        assert_eq!(median_squared_error(&[7.0]).unwrap(), 7.0);
        assert_eq!(median_squared_error(&[]), Err(EvalError::EmptyErrors));
    }

    #[test]
    fn half_the_reference_is_fifty_percent_better() {
        let r = relative_score(&cell(Algorithm::Xgboost, 0.5), &cell(Algorithm::Linear, 1.0)).unwrap();
        assert_eq!(r.raw_relative, -50.0);
        assert_eq!(r.improvement, 50.0);
        let same = relative_score(&cell(Algorithm::Linear, 1.0), &cell(Algorithm::Linear, 1.0)).unwrap();
        assert_eq!(same.raw_relative, 0.0);
        assert_eq!(
            relative_score(&cell(Algorithm::Gbm, 1.0), &cell(Algorithm::Linear, 0.0)),
            Err(EvalError::ZeroReference)
        );
    }

    #[test]
    fn fold_mean() {
        let base = relative_score(&cell(Algorithm::Gbm, 0.6), &cell(Algorithm::Linear, 1.0)).unwrap();
        let mut other = base;
        other.test_fold = 2;
        other.raw_relative = -60.0;
        let mut first = base;
        first.raw_relative = -40.0;
        assert_eq!(mean_relative_score(&[first, other], 2).unwrap(), -50.0);
        assert!(mean_relative_score(&[first], 2).is_err());
        assert!(mean_relative_score(&[first, first], 2).is_err());
    }
}
