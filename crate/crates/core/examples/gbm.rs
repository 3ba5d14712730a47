//! Gradient boosting with stumps, printing the training error trace.

use precip_merge::learners::{fit_gbm_traced, GbmParams};
use precip_merge::FeatureMatrix;

fn main() {
    let rows: Vec<[f64; 2]> = (0..300).map(|i| [(i % 17) as f64, (i % 11) as f64]).collect();
    let y: Vec<f64> = rows.iter().map(|r| (r[0] - 8.0).abs() + 0.3 * r[1]).collect();
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    let (_, trace) = fit_gbm_traced(
        &x,
        &y,
        &GbmParams {
            n_trees: 200,
            ..Default::default()
        },
    )
    .unwrap();
    for round in [0, 1, 10, 50, 100, 200] {
        println!("round {round:>3}: MSE {:.4}", trace[round]);
    }
}
