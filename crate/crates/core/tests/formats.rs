use chrono::NaiveDate;

use precip_merge::cli::{generate, SynthSpec};
use precip_merge::ingest::{
    parse_ghcnd_dly, parse_ghcnd_stations, parse_grid_series, read_sample_cache, write_grid_series, write_sample_cache,
    write_samples_csv, ProductTag, ALL_PREDICTORS, CACHE_MAGIC,
};
use precip_merge::{GridSeries, GridSpec, IngestError, SampleTable};

const GOLDEN_DLY: &str = include_str!("data/golden.dly");
const GOLDEN_STATIONS: &str = include_str!("data/golden-stations.txt");

fn day(d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2014, 1, d).unwrap()
}

#[test]
fn golden_dly_values_and_flags() {
    let data = parse_ghcnd_dly(GOLDEN_DLY.as_bytes()).unwrap();
    assert_eq!(data.keys().collect::<Vec<_>>(), ["USC00000001"]);
    let s = &data["USC00000001"];
    assert_eq!(s.len(), 3);
    assert_eq!(s[&day(1)].precip_mm, 25.0);
    assert!(!s.contains_key(&day(2)));
    assert_eq!(s[&day(3)].qflag, Some('G'));
    assert_eq!(s[&day(4)].precip_mm, 0.0);
}

#[test]
fn dly_with_wrong_width_reports_line() {
    let mut text = GOLDEN_DLY.to_string();
    text.push_str("USC00000001201402PRCP   10\n");
    match parse_ghcnd_dly(text.as_bytes()) {
        Err(IngestError::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn dly_rejects_invalid_calendar_day_with_value() {
    let mut line: String = GOLDEN_DLY.lines().next().unwrap().replace("201401", "201402");
    // Day 30 of February carries a value.
    let start = 21 + 29 * 8;
    line.replace_range(start..start + 5, "   12");
    assert!(parse_ghcnd_dly(line.as_bytes()).is_err());
}

#[test]
fn golden_inventory() {
    let inv = parse_ghcnd_stations(GOLDEN_STATIONS.as_bytes()).unwrap();
    assert_eq!(inv.stations.len(), 1);
    assert_eq!(inv.excluded, ["USC00000002"]);
    let m = &inv.stations["USC00000001"];
    assert_eq!(
        (m.location.lat(), m.location.lon(), m.elevation_m),
        (38.8977, -77.0365, 17.0)
    );
}

#[test]
fn inventory_duplicates_and_bad_coordinates_fail() {
    let first = GOLDEN_STATIONS.lines().next().unwrap();
    let doubled = format!("{first}\n{first}\n");
    assert!(matches!(
        parse_ghcnd_stations(doubled.as_bytes()),
        Err(IngestError::DuplicateStation(_))
    ));
    let bad = first.replace(" 38.8977", " 98.8977");
    assert!(parse_ghcnd_stations(bad.as_bytes()).is_err());
}

#[test]
fn grid_series_text_round_trip_with_missing_cells() {
    let spec = GridSpec::new(25.05, 0.1, 2, -124.95, 0.1, 3).unwrap();
    let mut g = GridSeries::new(spec, ProductTag::Imerg).unwrap();
    g.insert(day(1), vec![0.0, 0.5, f64::NAN, 1.25, 0.0, 0.0]).unwrap();
    g.insert(day(2), vec![3.0; 6]).unwrap();
    let mut text = Vec::new();
    write_grid_series(&mut text, &g).unwrap();
    let s = String::from_utf8(text.clone()).unwrap();
    assert!(s.starts_with("product=IMERG\n"));
    assert!(s.contains("NA"));
    let back = parse_grid_series(text.as_slice(), Some(ProductTag::Imerg)).unwrap();
    assert_eq!(back.spec(), g.spec());
    assert!(back.field(day(1)).unwrap()[2].is_nan());
    assert_eq!(back.field(day(2)).unwrap(), &[3.0; 6]);
    assert!(parse_grid_series(text.as_slice(), Some(ProductTag::Persiann)).is_err());
}

#[test]
fn grid_series_short_row_is_an_error() {
    let text = "product=IMERG\nlat0=0 dlat=1 nlat=2 lon0=0 dlon=1 nlon=2\ndate=2014-01-01\n1 2\n3\n";
    assert!(parse_grid_series(text.as_bytes(), None).is_err());
}

fn synthetic_table() -> SampleTable {
    let files = generate(&SynthSpec {
        n_stations: 6,
        n_days: 20,
        ..Default::default()
    })
    .unwrap();
    let cfg = precip_merge::cli::RunConfig {
        synth: Some(SynthSpec {
            n_stations: 6,
            n_days: 20,
            ..Default::default()
        }),
        ..Default::default()
    };
    let table = precip_merge::cli::load_samples(&cfg).unwrap();
    assert_eq!(parse_ghcnd_dly(files.gauges.as_slice()).unwrap().len(), 6);
    table
}

#[test]
fn sample_cache_round_trip_and_corruption() {
    let table = synthetic_table();
    let mut bytes = Vec::new();
    write_sample_cache(&mut bytes, &table).unwrap();
    assert_eq!(&bytes[..8], CACHE_MAGIC);
    assert_eq!(read_sample_cache(bytes.as_slice()).unwrap(), table);
    assert!(read_sample_cache(&bytes[..bytes.len() - 3]).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(read_sample_cache(bad.as_slice()).is_err());
}

#[test]
fn sample_csv_header_and_row_count() {
    let table = synthetic_table();
    let mut out = Vec::new();
    write_samples_csv(&mut out, &table).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    for p in ALL_PREDICTORS {
        assert!(header.contains(p.name()), "{header}");
    }
    assert_eq!(lines.count(), table.len());
}
