//! Long-format report rows rendered as markdown tables.

use precip_merge::cli::{build_figures, load_samples, render_markdown, report_rows, RunConfig, SynthSpec};
use precip_merge::evaluate::{cross_validate, CvOptions};
use precip_merge::learners::{ForestParams, GbmParams, Hyperparams, XgbParams};

fn main() {
    let cfg = RunConfig {
        synth: Some(SynthSpec {
            n_stations: 24,
            n_days: 30,
            ..Default::default()
        }),
        ..Default::default()
    };
    let table = load_samples(&cfg).unwrap();
    let options = CvOptions {
        hyperparams: Hyperparams {
            random_forest: ForestParams {
                n_trees: 20,
                ..Default::default()
            },
            gbm: GbmParams {
                n_trees: 50,
                ..Default::default()
            },
            xgboost: XgbParams {
                n_rounds: 20,
                ..Default::default()
            },
        },
        ..Default::default()
    };
    let rows = report_rows(&cross_validate(&table, &options).unwrap());
    println!("{} report rows", rows.len());
    print!("{}", render_markdown(&build_figures(&rows)));
}
