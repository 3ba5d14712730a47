use rand::seq::index::sample as sample_indices;

use super::forest::tree_rng;
use super::tree::{grow_tree, FeatureChoice, Presorted, SplitRule};
use super::{check_training, FeatureMatrix, GbmModel, GbmParams, LearnError};

/// Gradient boosting with squared loss: start from the mean, then fit a
/// depth-limited tree to the current residuals on a subsample of
/// `floor(bag_fraction · n)` rows each round and add `shrinkage · tree`.
pub fn fit_gbm(x: &FeatureMatrix, y: &[f64], params: &GbmParams) -> Result<GbmModel, LearnError> {
    fit_gbm_traced(x, y, params).map(|(m, _)| m)
}

/// Like [`fit_gbm`], also returning the training MSE before the first round
/// and after every round.
pub fn fit_gbm_traced(x: &FeatureMatrix, y: &[f64], params: &GbmParams) -> Result<(GbmModel, Vec<f64>), LearnError> {
    check_training(x, y)?;
    params.validate()?;
    let n = x.n_rows();
    let init = y.iter().sum::<f64>() / n as f64;
    let mut f = vec![init; n];
    let mut trace = vec![mse(&f, y)];
    let presorted = Presorted::new(x);
    let rule = SplitRule::cart(Some(params.depth), params.min_obs_node);
    let features: Vec<usize> = (0..x.n_cols()).collect();
    let bag = ((params.bag_fraction * n as f64).floor() as usize).clamp(1, n);
    let ones = vec![1.0; n];
    let mut residual = vec![0.0; n];
    let mut in_sample = vec![true; n];
    let mut trees = Vec::with_capacity(params.n_trees);

    for round in 0..params.n_trees {
        for ((r, yi), fi) in residual.iter_mut().zip(y).zip(&f) {
            *r = yi - fi;
        }
        if bag < n {
            let mut rng = tree_rng(params.seed, round);
            in_sample.fill(false);
            for i in sample_indices(&mut rng, n, bag) {
                in_sample[i] = true;
            }
        }
        let tree = grow_tree::<rand_chacha::ChaCha8Rng>(
            x,
            &presorted,
            &in_sample,
            &residual,
            &ones,
            Some(&residual),
            rule,
            FeatureChoice::Fixed(features.clone()),
        );
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += params.shrinkage * tree.predict(x.row(i));
        }
        trace.push(mse(&f, y));
        trees.push(tree);
    }
    Ok((
        GbmModel {
            params: params.clone(),
            n_features: x.n_cols(),
            init,
            trees,
        },
        trace,
    ))
}

pub(crate) fn mse(f: &[f64], y: &[f64]) -> f64 {
    f.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::FittedModel;

    #[test]
    fn zero_rounds_predicts_mean() {
        let x = FeatureMatrix::from_rows(&[[1.0], [2.0], [3.0], [4.0]]).unwrap();
        let y = [1.0, 2.0, 4.0, 9.0];
        let params = GbmParams {
            n_trees: 0,
            ..GbmParams::default()
        };
        let m = FittedModel::Gbm(fit_gbm(&x, &y, &params).unwrap());
        assert_eq!(m.predict(&[10.0]).unwrap(), 4.0);
    }

    #[test]
    fn bagging_is_seeded() {
        let rows: Vec<[f64; 2]> = (0..80).map(|i| [i as f64, ((i * 7) % 11) as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0].sqrt() + r[1]).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let params = GbmParams {
            n_trees: 30,
            ..GbmParams::default()
        };
        assert_eq!(fit_gbm(&x, &y, &params).unwrap(), fit_gbm(&x, &y, &params).unwrap());
        let other = GbmParams {
            seed: 7,
            ..params.clone()
        };
        assert_ne!(fit_gbm(&x, &y, &params).unwrap(), fit_gbm(&x, &y, &other).unwrap());
    }
}
