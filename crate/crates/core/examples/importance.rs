//! Gain importance of a boosted model, and binary save/load.

use precip_merge::learners::{fit_xgb, gain_importance, read_model, write_model, XgbParams};
use precip_merge::{FeatureMatrix, FittedModel};

fn main() {
    let rows: Vec<[f64; 3]> = (0..500)
        .map(|i| [(i % 23) as f64, (i % 7) as f64, ((i * 13) % 29) as f64])
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] + 0.2 * r[1]).collect();
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    let model = FittedModel::Xgb(
        fit_xgb(
            &x,
            &y,
            &XgbParams {
                n_rounds: 30,
                ..Default::default()
            },
        )
        .unwrap(),
    );
    let imp = gain_importance(&model).unwrap();
    for (rank, f) in imp.ranking().into_iter().enumerate() {
        println!("{}: x{f} {:.4}", rank + 1, imp.fractions[f]);
    }
    let mut bytes = Vec::new();
    write_model(&mut bytes, &model).unwrap();
    println!(
        "model: {} bytes, reload equal: {}",
        bytes.len(),
        read_model(bytes.as_slice()).unwrap() == model
    );
}
