//! A single depth-limited regression tree and its text dump.

use precip_merge::learners::{dump_text, fit_tree, FittedModel, ForestModel, ForestParams, TreeConfig};
use precip_merge::FeatureMatrix;

fn main() {
    let rows: Vec<[f64; 1]> = (0..10).map(|i| [i as f64]).collect();
    let y = [0.0, 0.1, 0.0, 0.2, 5.0, 5.1, 4.9, 9.0, 9.2, 9.1];
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    let tree = fit_tree(
        &x,
        &y,
        &TreeConfig {
            max_depth: Some(2),
            min_node: 1,
            candidate_features: None,
        },
    )
    .unwrap();
    println!(
        "{} splits, {} leaves, depth {}",
        tree.n_splits(),
        tree.n_leaves(),
        tree.depth()
    );
    let model = FittedModel::Forest(ForestModel {
        params: ForestParams {
            n_trees: 1,
            ..Default::default()
        },
        n_features: 1,
        trees: vec![tree],
    });
    print!("{}", dump_text(&model, Some(&["x"])));
}
