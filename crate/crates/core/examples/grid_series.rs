//! Build, write and re-read a grid-series file.

use chrono::NaiveDate;
use precip_merge::ingest::{parse_grid_series, write_grid_series, ProductTag};
use precip_merge::{GridSeries, GridSpec};

fn main() {
    let spec = GridSpec::new(25.05, 0.1, 2, -124.95, 0.1, 3).unwrap();
    let mut series = GridSeries::new(spec, ProductTag::Imerg).unwrap();
    let day = NaiveDate::from_ymd_opt(2014, 1, 1).unwrap();
    series.insert(day, vec![0.0, 0.5, f64::NAN, 1.25, 0.0, 0.0]).unwrap();
    let mut text = Vec::new();
    write_grid_series(&mut text, &series).unwrap();
    print!("{}", String::from_utf8_lossy(&text));
    let back = parse_grid_series(text.as_slice(), Some(ProductTag::Imerg)).unwrap();
    println!("dates: {:?}", back.dates().collect::<Vec<_>>());
}
