//! Assemble regression samples from synthetic inputs and cache them.

use precip_merge::cli::{load_samples, RunConfig, SynthSpec};
use precip_merge::ingest::{read_sample_cache, write_sample_cache, ALL_PREDICTORS};

fn main() {
    let cfg = RunConfig {
        synth: Some(SynthSpec {
            n_stations: 12,
            n_days: 30,
            ..Default::default()
        }),
        ..Default::default()
    };
    let table = load_samples(&cfg).unwrap();
    println!("{} samples from {} stations", table.len(), table.station_ids.len());
    let s = &table.samples[0];
    println!("first sample: {} {} y={}", table.station_id(s), s.date, s.y);
    for p in ALL_PREDICTORS {
        println!("  {:<22} {:.4}", p.name(), p.extract(s));
    }
    let mut cache = Vec::new();
    write_sample_cache(&mut cache, &table).unwrap();
    println!(
        "cache: {} bytes, round trip equal: {}",
        cache.len(),
        read_sample_cache(cache.as_slice()).unwrap() == table
    );
}
