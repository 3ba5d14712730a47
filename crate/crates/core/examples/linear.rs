//! Ordinary least squares on a small noisy plane.

use precip_merge::learners::fit_linear;
use precip_merge::FeatureMatrix;

fn main() {
    let rows: Vec<[f64; 2]> = (0..20).map(|i| [i as f64, ((i * 7) % 5) as f64]).collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| 1.5 + 2.0 * r[0] - 0.5 * r[1] + 0.01 * (r[0] % 3.0))
        .collect();
    let m = fit_linear(&FeatureMatrix::from_rows(&rows).unwrap(), &y).unwrap();
    println!("intercept {:.4}, coefficients {:?}", m.intercept, m.coefficients);
    println!("prediction at (10, 2): {:.4}", m.predict_row(&[10.0, 2.0]));
}
