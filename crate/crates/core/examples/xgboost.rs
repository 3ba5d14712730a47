//! Second-order boosting with L2 regularization.

use precip_merge::learners::{fit_xgb_traced, XgbParams};
use precip_merge::FeatureMatrix;

fn main() {
    let rows: Vec<[f64; 2]> = (0..300).map(|i| [(i % 17) as f64, (i % 11) as f64]).collect();
    let y: Vec<f64> = rows.iter().map(|r| (r[0] - 8.0).abs() * r[1]).collect();
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    for lambda in [0.0, 1.0, 100.0] {
        let params = XgbParams {
            n_rounds: 50,
            lambda,
            ..Default::default()
        };
        let (m, trace) = fit_xgb_traced(&x, &y, &params).unwrap();
        let splits: usize = m.trees.iter().map(|t| t.n_splits()).sum();
        println!(
            "lambda {lambda:>5}: final MSE {:.4}, {splits} splits",
            trace.last().unwrap()
        );
    }
}
