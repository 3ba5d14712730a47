//! Station-wise two-fold cross-validation with relative scores and ranks.

use precip_merge::cli::{load_samples, RunConfig, SynthSpec};
use precip_merge::evaluate::{cross_validate, CvOptions, ReferenceMode};
use precip_merge::ingest::PredictorSet;
use precip_merge::learners::{Algorithm, ForestParams, GbmParams, Hyperparams, XgbParams};

fn main() {
    let cfg = RunConfig {
        synth: Some(SynthSpec {
            n_stations: 30,
            n_days: 60,
            ..Default::default()
        }),
        ..Default::default()
    };
    let table = load_samples(&cfg).unwrap();
    let options = CvOptions {
        hyperparams: Hyperparams {
            random_forest: ForestParams {
                n_trees: 50,
                ..Default::default()
            },
            gbm: GbmParams {
                n_trees: 100,
                ..Default::default()
            },
            xgboost: XgbParams {
                n_rounds: 50,
                ..Default::default()
            },
        },
        ..Default::default()
    };
    let report = cross_validate(&table, &options).unwrap();
    println!("fold sizes {:?}", report.fold_sizes());
    for a in Algorithm::ALL {
        let v: Vec<String> = PredictorSet::ALL
            .iter()
            .map(|&s| format!("{:7.2}", report.mean_improvement(ReferenceMode::SameSet, a, s).unwrap()))
            .collect();
        println!("{:<14} improvement over linear: {}", a.key(), v.join(" "));
    }
    let collective = report.rankings.last().unwrap();
    println!("collective mean ranks: {:?}", collective.table.mean_rank);
}
