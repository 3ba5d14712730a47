use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{grow_tree, FeatureChoice, Presorted, SplitRule};
use super::{check_training, FeatureMatrix, ForestModel, ForestParams, LearnError};

/// Generator for tree `t`: ChaCha8 seeded with `seed`, stream `t`. Each tree
/// owns its stream, so results do not depend on scheduling.
pub(crate) fn tree_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

/// Random forest: each tree is grown on a bootstrap resample (or the full
/// data) and draws `mtry` candidate features uniformly without replacement
/// at every split. Prediction is the mean over trees.
pub fn fit_random_forest(x: &FeatureMatrix, y: &[f64], params: &ForestParams) -> Result<ForestModel, LearnError> {
    check_training(x, y)?;
    params.validate()?;
    let (n, p) = (x.n_rows(), x.n_cols());
    let mtry = params.resolved_mtry(p);
    if mtry == 0 || mtry > p {
        return Err(LearnError::InvalidMtry { mtry, p });
    }
    let presorted = Presorted::new(x);
    let rule = SplitRule::cart(params.max_depth, params.min_node);

    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(params.seed, t);
            let mut weight = vec![0.0; n];
            if params.bootstrap {
                for _ in 0..n {
                    weight[rng.random_range(0..n)] += 1.0;
                }
            } else {
                weight.fill(1.0);
            }
            let in_sample: Vec<bool> = weight.iter().map(|w| *w > 0.0).collect();
            let g: Vec<f64> = weight.iter().zip(y).map(|(w, v)| w * v).collect();
            grow_tree(
                x,
                &presorted,
                &in_sample,
                &g,
                &weight,
                Some(y),
                rule,
                FeatureChoice::PerSplit { mtry, rng: &mut rng },
            )
        })
        .collect();

    Ok(ForestModel {
        params: params.clone(),
        n_features: p,
        trees,
    })
}
