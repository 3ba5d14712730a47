use rayon::prelude::*;

use super::{
    make_folds_k, mean_rankings, mean_relative_score, median_squared_error, rank_per_case, relative_score,
    squared_error, CellScore, EvalError, FoldAssignment, RankTable, ReferenceMode, RelativeScore, SplitUnit,
};
use crate::ingest::{select_predictors, PredictorSet, SampleTable};
use crate::learners::{Algorithm, FeatureMatrix, Hyperparams};

#[derive(Debug, Clone, PartialEq)]
pub struct CvOptions {
    pub algorithms: Vec<Algorithm>,
    pub predictor_sets: Vec<PredictorSet>,
    pub n_folds: usize,
    pub split_unit: SplitUnit,
    pub seed: u64,
    pub references: Vec<ReferenceMode>,
    pub hyperparams: Hyperparams,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            predictor_sets: PredictorSet::ALL.to_vec(),
            n_folds: 2,
            split_unit: SplitUnit::Station,
            seed: 42,
            references: ReferenceMode::ALL.to_vec(),
            hyperparams: Hyperparams::default(),
        }
    }
}

/// Test-fold predictions of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPredictions {
    pub algorithm: Algorithm,
    pub predictor_set: PredictorSet,
    pub test_fold: usize,
    /// Indices into `SampleTable::samples`.
    pub test_rows: Vec<usize>,
    pub predictions: Vec<f64>,
    pub squared_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingSummary {
    /// `None` for the collective ranking over every {algorithm, set}.
    pub predictor_set: Option<PredictorSet>,
    pub contenders: Vec<(Algorithm, PredictorSet)>,
    pub table: RankTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub options: CvOptions,
    pub n_samples: usize,
    pub n_stations: usize,
    /// Fold id per sample.
    pub sample_folds: Vec<u8>,
    pub cells: Vec<CellScore>,
    pub predictions: Vec<CellPredictions>,
    pub relative: Vec<(ReferenceMode, RelativeScore)>,
    /// (mode, algorithm, set, mean raw relative score over folds).
    pub mean_relative: Vec<(ReferenceMode, Algorithm, PredictorSet, f64)>,
    pub rankings: Vec<RankingSummary>,
}

impl EvaluationReport {
    pub fn cell(&self, algorithm: Algorithm, set: PredictorSet, fold: usize) -> Option<&CellScore> {
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.predictor_set == set && c.test_fold == fold)
    }

    /// Mean improvement (positive is better than the reference).
    pub fn mean_improvement(&self, mode: ReferenceMode, algorithm: Algorithm, set: PredictorSet) -> Option<f64> {
        self.mean_relative
            .iter()
            .find(|(m, a, s, _)| *m == mode && *a == algorithm && *s == set)
            .map(|r| 0.0 - r.3)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        (1..=self.options.n_folds as u8)
            .map(|f| self.sample_folds.iter().filter(|&&x| x == f).count())
            .collect()
    }
}

/// Design matrix and targets of `rows` under `set`.
pub fn design_matrix(table: &SampleTable, rows: &[usize], set: PredictorSet) -> (FeatureMatrix, Vec<f64>) {
    let p = set.members().len();
    let mut data = Vec::with_capacity(rows.len() * p);
    let mut y = Vec::with_capacity(rows.len());
    for &r in rows {
        let s = &table.samples[r];
        data.extend(select_predictors(s, set));
        y.push(s.y);
    }
    let x = FeatureMatrix::new(data, rows.len(), p).expect("dimensions match by construction");
    (x, y)
}

fn assign_folds(table: &SampleTable, options: &CvOptions) -> Result<(FoldAssignment, Vec<u8>, usize), EvalError> {
    let mut present = vec![false; table.station_ids.len()];
    for s in &table.samples {
        present[s.station as usize] = true;
    }
    let stations: Vec<usize> = (0..present.len()).filter(|&i| present[i]).collect();
    match options.split_unit {
        SplitUnit::Station => {
            let folds = make_folds_k(stations.len(), options.n_folds, options.seed)?;
            let mut by_station = vec![0u8; table.station_ids.len()];
            for (unit, &st) in stations.iter().enumerate() {
                by_station[st] = folds.fold_of(unit);
            }
            let per_sample = table.samples.iter().map(|s| by_station[s.station as usize]).collect();
            Ok((folds, per_sample, stations.len()))
        }
        SplitUnit::Sample => {
            let folds = make_folds_k(table.samples.len(), options.n_folds, options.seed)?;
            let per_sample = folds.folds.clone();
            Ok((folds, per_sample, stations.len()))
        }
    }
}

fn validate(options: &CvOptions) -> Result<(), EvalError> {
    let cfg = |m: &str| Err(EvalError::Config(m.to_string()));
    if options.algorithms.is_empty() {
        return cfg("no algorithms selected");
    }
    if options.predictor_sets.is_empty() {
        return cfg("no predictor sets selected");
    }
    let mut a = options.algorithms.clone();
    a.sort();
    a.dedup();
    let mut s = options.predictor_sets.clone();
    s.sort();
    s.dedup();
    if a.len() != options.algorithms.len() || s.len() != options.predictor_sets.len() {
        return cfg("duplicate algorithm or predictor set");
    }
    if !options.references.is_empty() && !options.algorithms.contains(&Algorithm::Linear) {
        return cfg("relative scores need linear regression among the algorithms");
    }
    if options.references.contains(&ReferenceMode::Set1) && !options.predictor_sets.contains(&PredictorSet::Set1) {
        return cfg("the set-1 reference needs predictor set 1");
    }
    options
        .hyperparams
        .validate()
        .map_err(|e| EvalError::Config(e.to_string()))
}

/// Fits every {algorithm, predictor set} on each training fold, scores the
/// held-out fold and aggregates relative scores and rankings.
pub fn cross_validate(table: &SampleTable, options: &CvOptions) -> Result<EvaluationReport, EvalError> {
    validate(options)?;
    let (_, sample_folds, n_stations) = assign_folds(table, options)?;
    let k = options.n_folds;

    let mut tasks = Vec::new();
    for fold in 1..=k {
        for &set in &options.predictor_sets {
            for &algorithm in &options.algorithms {
                tasks.push((fold, set, algorithm));
            }
        }
    }
    let split = |fold: usize| {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..table.samples.len()).partition(|&i| sample_folds[i] as usize == fold);
        (train, test)
    };
    let predictions: Vec<CellPredictions> = tasks
        .par_iter()
        .map(|&(fold, set, algorithm)| {
            let (train, test) = split(fold);
            let (x_train, y_train) = design_matrix(table, &train, set);
            let (x_test, y_test) = design_matrix(table, &test, set);
            let model = algorithm
                .fit(&x_train, &y_train, &options.hyperparams)
                .map_err(|source| EvalError::Fit { fold, source })?;
            let predictions = model
                .predict_batch(&x_test)
                .map_err(|source| EvalError::Fit { fold, source })?;
            let squared_errors = predictions
                .iter()
                .zip(&y_test)
                .map(|(p, o)| squared_error(*p, *o))
                .collect();
            Ok(CellPredictions {
                algorithm,
                predictor_set: set,
                test_fold: fold,
                test_rows: test,
                predictions,
                squared_errors,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let cells = predictions
        .iter()
        .map(|p| {
            Ok(CellScore {
                algorithm: p.algorithm,
                predictor_set: p.predictor_set,
                test_fold: p.test_fold,
                med_se: median_squared_error(&p.squared_errors)?,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let find = |a: Algorithm, s: PredictorSet, f: usize| {
        cells
            .iter()
            .find(|c| c.algorithm == a && c.predictor_set == s && c.test_fold == f)
            .expect("every cell was evaluated")
    };

    let mut relative = Vec::new();
    let mut mean_relative = Vec::new();
    for &mode in &options.references {
        for &set in &options.predictor_sets {
            for &algorithm in &options.algorithms {
                let per_fold = (1..=k)
                    .map(|f| {
                        relative_score(
                            find(algorithm, set, f),
                            find(Algorithm::Linear, mode.reference_set(set), f),
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                mean_relative.push((mode, algorithm, set, mean_relative_score(&per_fold, k)?));
                relative.extend(per_fold.into_iter().map(|r| (mode, r)));
            }
        }
    }

    let errors_of = |a: Algorithm, s: PredictorSet, f: usize| {
        &predictions
            .iter()
            .find(|p| p.algorithm == a && p.predictor_set == s && p.test_fold == f)
            .expect("every cell was evaluated")
            .squared_errors
    };
    let rank = |contenders: &[(Algorithm, PredictorSet)]| -> Result<RankTable, EvalError> {
        let per_fold = (1..=k)
            .map(|f| {
                let cols: Vec<&Vec<f64>> = contenders.iter().map(|&(a, s)| errors_of(a, s, f)).collect();
                (0..cols[0].len())
                    .map(|i| rank_per_case(&cols.iter().map(|c| c[i]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect::<Vec<Vec<Vec<f64>>>>();
        mean_rankings(&per_fold)
    };
    let mut rankings = Vec::new();
    if options.algorithms.len() >= 2 {
        for &set in &options.predictor_sets {
            let contenders: Vec<_> = options.algorithms.iter().map(|&a| (a, set)).collect();
            rankings.push(RankingSummary {
                predictor_set: Some(set),
                table: rank(&contenders)?,
                contenders,
            });
        }
    }
    let collective: Vec<_> = options
        .predictor_sets
        .iter()
        .flat_map(|&s| options.algorithms.iter().map(move |&a| (a, s)))
        .collect();
    if options.predictor_sets.len() >= 2 && collective.len() >= 2 {
        rankings.push(RankingSummary {
            predictor_set: None,
            table: rank(&collective)?,
            contenders: collective,
        });
    }

    Ok(EvaluationReport {
        options: options.clone(),
        n_samples: table.samples.len(),
        n_stations,
        sample_folds,
        cells,
        predictions,
        relative,
        mean_relative,
        rankings,
    })
}
