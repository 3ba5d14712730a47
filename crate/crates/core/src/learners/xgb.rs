use super::gbm::mse;
use super::tree::{grow_tree, FeatureChoice, Presorted, SplitRule};
use super::{check_training, FeatureMatrix, LearnError, XgbModel, XgbParams};

/// Split gain of the regularized second-order objective from the gradient
/// and hessian sums of the two children:
/// `½ [G_L²/(H_L+λ) + G_R²/(H_R+λ) − (G_L+G_R)²/(H_L+H_R+λ)] − γ`.
pub fn xgb_split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - gamma
}

/// Second-order boosting with squared loss `(F − y)²`: gradients
/// `2(F − y)`, hessians `2`, leaf weights `−G/(H + λ)`, and splits kept only
/// when their regularized gain is positive.
pub fn fit_xgb(x: &FeatureMatrix, y: &[f64], params: &XgbParams) -> Result<XgbModel, LearnError> {
    fit_xgb_traced(x, y, params).map(|(m, _)| m)
}

/// Like [`fit_xgb`], also returning the training MSE before the first round
/// and after every round.
pub fn fit_xgb_traced(x: &FeatureMatrix, y: &[f64], params: &XgbParams) -> Result<(XgbModel, Vec<f64>), LearnError> {
    check_training(x, y)?;
    params.validate()?;
    let n = x.n_rows();
    let mut f = vec![params.base_score; n];
    let mut trace = vec![mse(&f, y)];
    let presorted = Presorted::new(x);
    let rule = SplitRule {
        lambda: params.lambda,
        gamma: params.gamma,
        gain_scale: 0.5,
        min_child_h: params.min_child_weight,
        max_depth: Some(params.max_depth),
    };
    let features: Vec<usize> = (0..x.n_cols()).collect();
    let hess = vec![2.0; n];
    let in_sample = vec![true; n];
    // The builder's leaf value is G/(H+λ); feeding it the negated gradient
    // yields the optimal weight −Σgrad/(Σhess+λ).
    let mut neg_grad = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.n_rounds);

    for _ in 0..params.n_rounds {
        for ((g, yi), fi) in neg_grad.iter_mut().zip(y).zip(&f) {
            *g = 2.0 * (yi - fi);
        }
        let tree = grow_tree::<rand_chacha::ChaCha8Rng>(
            x,
            &presorted,
            &in_sample,
            &neg_grad,
            &hess,
            None,
            rule,
            FeatureChoice::Fixed(features.clone()),
        );
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += params.eta * tree.predict(x.row(i));
        }
        trace.push(mse(&f, y));
        trees.push(tree);
    }
    Ok((
        XgbModel {
            params: params.clone(),
            n_features: x.n_cols(),
            trees,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::Node;

    #[test]
    fn six_point_root_gain_matches_formula() {
        // Targets chosen so the best root split separates {0,1,2} | {3,4,5}.
        let rows: Vec<[f64; 1]> = (0..6).map(|i| [i as f64]).collect();
        let y = [1.0, 2.0, 1.5, 8.0, 9.0, 7.0];
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let params = XgbParams {
            n_rounds: 1,
            max_depth: 1,
            base_score: 0.5,
            lambda: 1.0,
            gamma: 0.0,
            ..XgbParams::default()
        };
        let m = fit_xgb(&x, &y, &params).unwrap();
        // grad = 2(0.5 - y): left {1,2,1.5} -> G_L = 2(1.5 - 4.5) = -6,
        // right {8,9,7} -> G_R = 2(1.5 - 24) = -45, H_L = H_R = 6.
        // gain = ½[36/7 + 2025/7 - 2601/13] = 47.1758241758...
        let expected: f64 = 0.5 * (36.0 / 7.0 + 2025.0 / 7.0 - 2601.0 / 13.0);
        assert!((expected - 47.175_824_175_824_19).abs() < 1e-12);
        match m.trees[0].nodes()[0] {
            Node::Split { gain, threshold, .. } => {
                assert!((gain - expected).abs() < 1e-9, "{gain}");
                assert_eq!(threshold, 2.5);
            }
            other => panic!("{other:?}"),
        }
        assert!((xgb_split_gain(-6.0, 6.0, -45.0, 6.0, 1.0, 0.0) - expected).abs() < 1e-12);
        // Leaf weights −G/(H+λ): 6/7 and 45/7.
        let leaves: Vec<f64> = m.trees[0]
            .nodes()
            .iter()
            .filter_map(|n| match n {
                Node::Leaf { value } => Some(*value),
                _ => None,
            })
            .collect();
        assert!((leaves[0] - 6.0 / 7.0).abs() < 1e-12);
        assert!((leaves[1] - 45.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_blocks_weak_splits() {
        let rows: Vec<[f64; 1]> = (0..6).map(|i| [i as f64]).collect();
        let y = [1.0, 2.0, 1.5, 8.0, 9.0, 7.0];
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let params = XgbParams {
            n_rounds: 1,
            max_depth: 1,
            gamma: 1000.0,
            ..XgbParams::default()
        };
        let m = fit_xgb(&x, &y, &params).unwrap();
        assert_eq!(m.trees[0].n_splits(), 0);
    }
}
