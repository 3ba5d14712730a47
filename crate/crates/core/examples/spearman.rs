//! Spearman correlations between the predictand and its predictors.

use precip_merge::cli::{load_samples, RunConfig, SynthSpec};
use precip_merge::evaluate::spearman_matrix;
use precip_merge::ingest::{ALL_PREDICTORS, PREDICTAND_NAME};

fn main() {
    let cfg = RunConfig {
        synth: Some(SynthSpec {
            n_stations: 20,
            n_days: 60,
            ..Default::default()
        }),
        ..Default::default()
    };
    let table = load_samples(&cfg).unwrap();
    let mut names = vec![PREDICTAND_NAME];
    names.extend(ALL_PREDICTORS.iter().map(|p| p.name()));
    let mut cols = vec![table.samples.iter().map(|s| s.y).collect::<Vec<_>>()];
    cols.extend(
        ALL_PREDICTORS
            .iter()
            .map(|p| table.samples.iter().map(|s| p.extract(s)).collect()),
    );
    let m = spearman_matrix(&names, &cols).unwrap();
    for (j, name) in names.iter().enumerate().skip(1) {
        match m.get(0, j) {
            Some(r) => println!("{name:<22} {r:+.3}"),
            None => println!("{name:<22} undefined"),
        }
    }
}
