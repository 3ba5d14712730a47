//! GHCNd `.dly` daily files and the station inventory.
//!
//! A `.dly` line is 269 characters: station id (cols 1-11), year (12-15),
//! month (16-17), element (18-21), then 31 day groups of a 5-character value
//! in tenths of mm (`-9999` = missing) followed by the measurement, quality
//! and source flags. Only `PRCP` rows are kept.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use chrono::{Datelike, NaiveDate};

use super::IngestError;
use crate::spatial::GeoPoint;

const DLY_LINE_LEN: usize = 269;
const DLY_MISSING: i32 = -9999;
const ELEVATION_MISSING: f64 = -999.9;

/// One daily gauge reading. `qflag` holds the GHCNd quality flag, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub precip_mm: f64,
    pub qflag: Option<char>,
}

impl Observation {
    pub fn quality_ok(&self) -> bool {
        self.qflag.is_none()
    }
}

/// Daily PRCP readings for one station. Missing days are absent.
pub type DailySeries = BTreeMap<NaiveDate, Observation>;

/// PRCP series keyed by station id.
pub type GaugeData = BTreeMap<String, DailySeries>;

fn field<'a>(
    line: &'a str,
    cols: std::ops::RangeInclusive<usize>,
    what: &'static str,
    n: usize,
) -> Result<&'a str, IngestError> {
    let (a, b) = (*cols.start() - 1, *cols.end());
    line.get(a..b)
        .ok_or_else(|| IngestError::parse(what, n, format!("columns {}-{} not addressable", a + 1, b)))
}

/// Parse GHCNd `.dly` content, keeping the PRCP element only.
pub fn parse_ghcnd_dly<R: BufRead>(reader: R) -> Result<GaugeData, IngestError> {
    const WHAT: &str = "GHCNd daily";
    let mut out = GaugeData::new();
    for (idx, line) in reader.lines().enumerate() {
        let n = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if line.len() != DLY_LINE_LEN || !line.is_ascii() {
            return Err(IngestError::parse(
                WHAT,
                n,
                format!("expected {DLY_LINE_LEN} ASCII characters, found {}", line.len()),
            ));
        }
        if &line[17..21] != "PRCP" {
            continue;
        }
        let id = line[0..11].trim_end().to_string();
        let year: i32 = line[11..15]
            .trim()
            .parse()
            .map_err(|_| IngestError::parse(WHAT, n, format!("bad year {:?}", &line[11..15])))?;
        let month: u32 = line[15..17]
            .trim()
            .parse()
            .map_err(|_| IngestError::parse(WHAT, n, format!("bad month {:?}", &line[15..17])))?;
        if !(1..=12).contains(&month) {
            return Err(IngestError::parse(WHAT, n, format!("month {month} out of range")));
        }
        let series = out.entry(id).or_default();
        for day in 1..=31u32 {
            let base = 21 + (day as usize - 1) * 8;
            let raw = &line[base..base + 5];
            let value: i32 = raw
                .trim()
                .parse()
                .map_err(|_| IngestError::parse(WHAT, n, format!("day {day}: non-numeric value {raw:?}")))?;
            if value == DLY_MISSING {
                continue;
            }
            let date = NaiveDate::from_ymd_opt(year, month, day).ok_or_else(|| {
                IngestError::parse(
                    WHAT,
                    n,
                    format!("value {value} on nonexistent date {year}-{month:02}-{day:02}"),
                )
            })?;
            if value < 0 {
                return Err(IngestError::parse(
                    WHAT,
                    n,
                    format!("day {day}: negative precipitation {value}"),
                ));
            }
            let q = line.as_bytes()[base + 6] as char;
            series.insert(
                date,
                Observation {
                    precip_mm: value as f64 / 10.0,
                    qflag: (q != ' ').then_some(q),
                },
            );
        }
    }
    Ok(out)
}

/// Write PRCP series as `.dly` lines, one per station-month with data.
pub fn write_ghcnd_dly<W: Write>(mut w: W, data: &GaugeData) -> std::io::Result<()> {
    for (id, series) in data {
        let mut months: BTreeMap<(i32, u32), [Option<Observation>; 31]> = BTreeMap::new();
        for (date, obs) in series {
            months.entry((date.year(), date.month())).or_insert([None; 31])[date.day0() as usize] = Some(*obs);
        }
        for ((year, month), days) in months {
            let mut line = format!("{id:<11}{year:04}{month:02}PRCP");
            for obs in days {
                match obs {
                    Some(o) => {
                        let tenths = (o.precip_mm * 10.0).round() as i32;
                        line.push_str(&format!("{tenths:>5} {} ", o.qflag.unwrap_or(' ')));
                    }
                    None => line.push_str(&format!("{DLY_MISSING:>5}   ")),
                }
            }
            debug_assert_eq!(line.len(), DLY_LINE_LEN);
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationMeta {
    pub location: GeoPoint,
    pub elevation_m: f64,
}

/// Parsed station inventory. Stations whose elevation is the `-999.9`
/// sentinel are listed in `excluded` and left out of `stations`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StationInventory {
    pub stations: BTreeMap<String, StationMeta>,
    pub excluded: Vec<String>,
}

/// Parse the fixed-width station inventory (`ghcnd-stations.txt` layout).
pub fn parse_ghcnd_stations<R: BufRead>(reader: R) -> Result<StationInventory, IngestError> {
    const WHAT: &str = "station inventory";
    let mut inv = StationInventory::default();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let n = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if line.len() < 37 {
            return Err(IngestError::parse(
                WHAT,
                n,
                format!("line has {} characters, need at least 37", line.len()),
            ));
        }
        let id = field(line, 1..=11, WHAT, n)?.trim_end().to_string();
        let number = |cols, name: &str| -> Result<f64, IngestError> {
            let raw = field(line, cols, WHAT, n)?;
            raw.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| IngestError::parse(WHAT, n, format!("malformed {name} {raw:?}")))
        };
        let lat = number(13..=20, "latitude")?;
        let lon = number(22..=30, "longitude")?;
        let elev = number(32..=37, "elevation")?;
        if !(-180.0..=180.0).contains(&lon) {
            return Err(IngestError::parse(WHAT, n, format!("longitude {lon} out of range")));
        }
        let location = GeoPoint::new(lat, lon).map_err(|e| IngestError::parse(WHAT, n, e.to_string()))?;
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateStation(id));
        }
        if (elev - ELEVATION_MISSING).abs() < 1e-6 {
            inv.excluded.push(id);
            continue;
        }
        inv.stations.insert(
            id,
            StationMeta {
                location,
                elevation_m: elev,
            },
        );
    }
    Ok(inv)
}

/// Write inventory lines: id, latitude, longitude, elevation, blank state and
/// an optional name, in the `ghcnd-stations.txt` column layout.
pub fn write_ghcnd_stations<'a, W, I>(mut w: W, rows: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, f64, f64, f64, &'a str)>,
{
    for (id, lat, lon, elev, name) in rows {
        writeln!(w, "{id:<11} {lat:>8.4} {lon:>9.4} {elev:>6.1}    {name}")?;
    }
    Ok(())
}

/// A gauge with its location, elevation and in-window daily series.
#[derive(Debug, Clone, PartialEq)]
pub struct StationRecord {
    pub id: String,
    pub location: GeoPoint,
    pub elevation_m: f64,
    pub series: DailySeries,
}

/// Join inventory metadata with gauge series, restricted to `[start, end]`.
/// Stations missing from either side are skipped. Output is sorted by id.
pub fn build_station_records(
    inventory: &StationInventory,
    gauges: &GaugeData,
    start: NaiveDate,
    end: NaiveDate,
) -> Vec<StationRecord> {
    gauges
        .iter()
        .filter_map(|(id, series)| {
            let meta = inventory.stations.get(id)?;
            let series: DailySeries = series.range(start..=end).map(|(d, o)| (*d, *o)).collect();
            Some(StationRecord {
                id: id.clone(),
                location: meta.location,
                elevation_m: meta.elevation_m,
                series,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dly_line(id: &str, year: i32, month: u32, element: &str, slots: &[(i32, char)]) -> String {
        let mut s = format!("{id:<11}{year:04}{month:02}{element}");
        for d in 0..31 {
            let (v, q) = slots.get(d).copied().unwrap_or((DLY_MISSING, ' '));
            s.push_str(&format!("{v:>5} {q} "));
        }
        s
    }

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn tenths_of_mm_and_flags() {
        let line = dly_line("USC00000001", 2014, 1, "PRCP", &[(250, ' '), (-9999, ' '), (10, 'G')]);
        assert_eq!(line.len(), 269);
        let data = parse_ghcnd_dly(line.as_bytes()).unwrap();
        let s = &data["USC00000001"];
        assert_eq!(
            s[&date(2014, 1, 1)],
            Observation {
                precip_mm: 25.0,
                qflag: None
            }
        );
        assert!(s[&date(2014, 1, 1)].quality_ok());
        assert!(!s.contains_key(&date(2014, 1, 2)));
        let flagged = s[&date(2014, 1, 3)];
        assert_eq!(flagged.precip_mm, 1.0);
        assert!(!flagged.quality_ok());
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn other_elements_ignored() {
        let text = format!(
            "{}\n{}\n",
            dly_line("USC00000001", 2014, 1, "TMAX", &[(250, ' ')]),
            dly_line("USC00000001", 2014, 2, "PRCP", &[(5, ' ')])
        );
        let data = parse_ghcnd_dly(text.as_bytes()).unwrap();
        assert_eq!(data["USC00000001"].len(), 1);
        assert!(data["USC00000001"].contains_key(&date(2014, 2, 1)));
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let good = dly_line("USC00000001", 2014, 1, "PRCP", &[]);
        let short = &good[..200];
        let text = format!("{good}\n{short}\n");
        match parse_ghcnd_dly(text.as_bytes()) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let mut bad = good.clone();
        bad.replace_range(21..26, "  1x0");
        match parse_ghcnd_dly(bad.as_bytes()) {
            Err(IngestError::Parse { line, msg, .. }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("non-numeric"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonexistent_day_with_value_rejected() {
        let mut slots = vec![(0, ' '); 31];
        slots[29] = (3, ' ');
        slots[30] = (DLY_MISSING, ' ');
        let line = dly_line("USC00000001", 2014, 2, "PRCP", &slots);
        assert!(parse_ghcnd_dly(line.as_bytes()).is_err());
    }

    #[test]
    fn inventory_fields_and_sentinel() {
        let mut buf = Vec::new();
        write_ghcnd_stations(
            &mut buf,
            [
                ("USW00013743", 38.8977, -77.0365, 17.0, "WASHINGTON"),
                ("USC00000002", 40.0, -100.0, -999.9, ""),
            ],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(&first[12..20], " 38.8977");
        assert_eq!(&first[21..30], " -77.0365");
        assert_eq!(&first[31..37], "  17.0");
        let inv = parse_ghcnd_stations(text.as_bytes()).unwrap();
        let meta = inv.stations["USW00013743"];
        assert_eq!(meta.location.lat(), 38.8977);
        assert_eq!(meta.location.lon(), -77.0365);
        assert_eq!(meta.elevation_m, 17.0);
        assert_eq!(inv.excluded, vec!["USC00000002".to_string()]);
        assert_eq!(inv.stations.len(), 1);
    }

    #[test]
    fn inventory_errors() {
        let dup = "USW00013743  38.8977  -77.0365   17.0\nUSW00013743  38.8977  -77.0365   17.0\n";
        assert!(matches!(
            parse_ghcnd_stations(dup.as_bytes()),
            Err(IngestError::DuplicateStation(_))
        ));
        let bad = "USW00013743  38.8977  -77.0365   17.0\nUSW00013744  3x.8977  -77.0365   17.0\n";
        match parse_ghcnd_stations(bad.as_bytes()) {
            Err(IngestError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let out_of_range = "USW00013743  98.8977  -77.0365   17.0\n";
        assert!(parse_ghcnd_stations(out_of_range.as_bytes()).is_err());
    }

    #[test]
    fn station_records_join_and_window() {
        let inv = parse_ghcnd_stations("USW00013743  38.8977  -77.0365   17.0\n".as_bytes()).unwrap();
        let lines = format!(
            "{}\n{}\n",
            dly_line("USW00013743", 2013, 12, "PRCP", &[(1, ' ')]),
            dly_line("USW00013743", 2014, 1, "PRCP", &[(2, ' '), (3, ' ')]),
        );
        let gauges = {
            let mut g = parse_ghcnd_dly(lines.as_bytes()).unwrap();
            g.insert("NOMETA00001".into(), DailySeries::new());
            g
        };
        let recs = build_station_records(&inv, &gauges, date(2014, 1, 1), date(2015, 12, 31));
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].series.len(), 2);
        assert_eq!(recs[0].elevation_m, 17.0);
    }
}
