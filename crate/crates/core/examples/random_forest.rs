//! Random forest on a nonlinear target.

use precip_merge::learners::{fit_random_forest, ForestParams};
use precip_merge::FeatureMatrix;

fn main() {
    let rows: Vec<[f64; 2]> = (0..400)
        .map(|i| [(i % 20) as f64 / 2.0, (i / 20) as f64 / 2.0])
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| (r[0] * r[1]).sqrt() + r[0].sin()).collect();
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    let m = fit_random_forest(
        &x,
        &y,
        &ForestParams {
            n_trees: 100,
            ..Default::default()
        },
    )
    .unwrap();
    let mse = rows
        .iter()
        .zip(&y)
        .map(|(r, v)| (m.predict_row(r) - v).powi(2))
        .sum::<f64>()
        / y.len() as f64;
    println!("100 trees, training MSE {mse:.5}");
}
