use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use rayon::prelude::*;

use super::{GridSeries, IngestError, StationRecord};
use crate::spatial::{bilinear_regrid, is_missing, nearest_k, GridSpec, NeighborSet};

const NEIGHBORS: usize = 4;

/// One (station, date) regression row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionSample {
    /// Index into [`SampleTable::station_ids`].
    pub station: u32,
    pub date: NaiveDate,
    /// Gauge precipitation in mm (the predictand).
    pub y: f64,
    pub persiann_vals: [f64; 4],
    pub imerg_vals: [f64; 4],
    pub persiann_dists: [f64; 4],
    pub imerg_dists: [f64; 4],
    pub elevation: f64,
}

impl RegressionSample {
    pub fn validate(&self) -> Result<(), IngestError> {
        let bad = |m: String| Err(IngestError::InvalidSample(m));
        if !(self.y.is_finite() && self.y >= 0.0) {
            return bad(format!("predictand {} is not a non-negative depth", self.y));
        }
        for (name, vals) in [("PERSIANN", &self.persiann_vals), ("IMERG", &self.imerg_vals)] {
            if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return bad(format!("{name} values {vals:?} incomplete or negative"));
            }
        }
        for (name, d) in [("PERSIANN", &self.persiann_dists), ("IMERG", &self.imerg_dists)] {
            if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || d.windows(2).any(|w| w[0] > w[1]) {
                return bad(format!("{name} distances {d:?} not non-decreasing"));
            }
        }
        if !self.elevation.is_finite() {
            return bad(format!("elevation {} not finite", self.elevation));
        }
        Ok(())
    }
}

/// Assembled samples in canonical (station id, date) order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleTable {
    pub station_ids: Vec<String>,
    pub samples: Vec<RegressionSample>,
}

impl SampleTable {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn station_id(&self, sample: &RegressionSample) -> &str {
        &self.station_ids[sample.station as usize]
    }
}

/// Inclusive gauge-date window. A gauge reading on day `d` is matched with
/// satellite fields labelled `d + offset_days`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub offset_days: i64,
}

impl Default for StudyWindow {
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2015, 12, 31).unwrap(),
            offset_days: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub window: StudyWindow,
    /// Grid the raw IMERG fields are regridded onto before neighbor search.
    pub imerg_target: GridSpec,
}

/// A grid whose centers sit at the cell corners of `spec`: shifted by half a
/// step along both axes, one cell fewer in each direction.
pub fn staggered_target(spec: &GridSpec) -> Result<GridSpec, IngestError> {
    Ok(GridSpec::new(
        spec.lat0 + spec.dlat / 2.0,
        spec.dlat,
        spec.nlat.saturating_sub(1),
        spec.lon0 + spec.dlon / 2.0,
        spec.dlon,
        spec.nlon.saturating_sub(1),
    )?)
}

fn regrid_window(
    series: &GridSeries,
    target: &GridSpec,
    from: NaiveDate,
    to: NaiveDate,
) -> Result<BTreeMap<NaiveDate, Vec<f64>>, IngestError> {
    let dates: Vec<NaiveDate> = series.fields().range(from..=to).map(|(d, _)| *d).collect();
    dates
        .into_par_iter()
        .map(|d| {
            let field = series.field(d).expect("date taken from series");
            Ok((d, bilinear_regrid(field, series.spec(), target)?))
        })
        .collect()
}

fn gather(field: &[f64], neighbors: &NeighborSet) -> Option<[f64; 4]> {
    let mut out = [0.0; 4];
    for (slot, idx) in out.iter_mut().zip(neighbors.indices()) {
        let v = field[idx];
        if is_missing(v) {
            return None;
        }
        *slot = v;
    }
    Some(out)
}

fn distances(neighbors: &NeighborSet) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (slot, d) in out.iter_mut().zip(neighbors.distances()) {
        *slot = d;
    }
    out
}

/// Build one sample per (station, date) where the gauge reading passes the
/// quality check and all 16 satellite constituents are present.
///
/// The raw IMERG fields are regridded onto `options.imerg_target` first; the
/// four nearest cells of each grid are found once per station.
pub fn assemble_samples(
    stations: &[StationRecord],
    persiann: &GridSeries,
    imerg_raw: &GridSeries,
    options: &AssemblyOptions,
) -> Result<SampleTable, IngestError> {
    let window = options.window;
    if stations.is_empty() {
        return Err(IngestError::EmptyStations);
    }
    if window.start > window.end {
        return Err(IngestError::EmptyWindow {
            start: window.start,
            end: window.end,
        });
    }
    let offset = Duration::days(window.offset_days);
    let imerg = regrid_window(
        imerg_raw,
        &options.imerg_target,
        window.start + offset,
        window.end + offset,
    )?;

    let mut order: Vec<&StationRecord> = stations.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    for pair in order.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(IngestError::DuplicateStation(pair[0].id.clone()));
        }
    }

    let per_station: Vec<Vec<RegressionSample>> = order
        .par_iter()
        .enumerate()
        .map(|(station_idx, rec)| -> Result<Vec<RegressionSample>, IngestError> {
            let p_nb = nearest_k(rec.location, persiann.spec(), NEIGHBORS)?;
            let i_nb = nearest_k(rec.location, &options.imerg_target, NEIGHBORS)?;
            let (persiann_dists, imerg_dists) = (distances(&p_nb), distances(&i_nb));
            let mut rows = Vec::new();
            for (date, obs) in rec.series.range(window.start..=window.end) {
                if !obs.quality_ok() {
                    continue;
                }
                let sat_date = *date + offset;
                let Some(persiann_vals) = persiann.field(sat_date).and_then(|f| gather(f, &p_nb)) else {
                    continue;
                };
                let Some(imerg_vals) = imerg.get(&sat_date).and_then(|f| gather(f, &i_nb)) else {
                    continue;
                };
                let sample = RegressionSample {
                    station: station_idx as u32,
                    date: *date,
                    y: obs.precip_mm,
                    persiann_vals,
                    imerg_vals,
                    persiann_dists,
                    imerg_dists,
                    elevation: rec.elevation_m,
                };
                sample.validate()?;
                rows.push(sample);
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;

    Ok(SampleTable {
        station_ids: order.iter().map(|r| r.id.clone()).collect(),
        samples: per_station.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DailySeries, Observation, ProductTag};
    use crate::spatial::{GeoPoint, MISSING};

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2014, 1, day).unwrap()
    }

    fn station(id: &str, lat: f64, lon: f64, days: &[(u32, f64, Option<char>)]) -> StationRecord {
        let series: DailySeries = days
            .iter()
            .map(|&(day, mm, q)| {
                (
                    d(day),
                    Observation {
                        precip_mm: mm,
                        qflag: q,
                    },
                )
            })
            .collect();
        StationRecord {
            id: id.into(),
            location: GeoPoint::new(lat, lon).unwrap(),
            elevation_m: 100.0,
            series,
        }
    }

    fn grids(days: u32) -> (GridSeries, GridSeries) {
        let pspec = GridSpec::new(30.0, 0.25, 6, -100.0, 0.25, 6).unwrap();
        let ispec = GridSpec::new(29.9, 0.1, 20, -100.1, 0.1, 20).unwrap();
        let mut p = GridSeries::new(pspec, ProductTag::Persiann).unwrap();
        let mut i = GridSeries::new(ispec, ProductTag::Imerg).unwrap();
        for day in 1..=days {
            p.insert(d(day), vec![day as f64; pspec.len()]).unwrap();
            i.insert(d(day), (0..ispec.len()).map(|c| (c % 7) as f64).collect())
                .unwrap();
        }
        (p, i)
    }

    fn options(p: &GridSeries) -> AssemblyOptions {
        AssemblyOptions {
            window: StudyWindow {
                start: d(1),
                end: d(31),
                offset_days: 0,
            },
            imerg_target: staggered_target(p.spec()).unwrap(),
        }
    }

    #[test]
    fn counts_station_days() {
        let (p, i) = grids(3);
        let days = [(1, 0.0, None), (2, 1.5, None), (3, 2.0, None)];
        let stations = vec![
            station("B0000000002", 30.6, -99.4, &days),
            station("A0000000001", 30.4, -99.6, &days),
        ];
        let table = assemble_samples(&stations, &p, &i, &options(&p)).unwrap();
        assert_eq!(table.len(), 6);
        assert_eq!(table.station_ids, vec!["A0000000001", "B0000000002"]);
        assert_eq!(table.samples[0].station, 0);
        assert_eq!(table.samples[3].station, 1);
        assert_eq!(table.samples[4].y, 1.5);
        assert_eq!(table.samples[4].persiann_vals, [2.0; 4]);
        for s in &table.samples {
            s.validate().unwrap();
        }
    }

    #[test]
    fn drops_flagged_and_missing() {
        let (p, mut i) = grids(3);
        // Poison one IMERG field entirely for day 2.
        let spec = *i.spec();
        let mut fields = i.fields().clone();
        fields.insert(d(2), vec![MISSING; spec.len()]);
        i = GridSeries::new(spec, ProductTag::Imerg).unwrap();
        for (date, f) in fields {
            i.insert(date, f).unwrap();
        }
        let days = [(1, 0.0, None), (2, 1.5, None), (3, 2.0, Some('G'))];
        let stations = vec![station("A0000000001", 30.4, -99.6, &days)];
        let table = assemble_samples(&stations, &p, &i, &options(&p)).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.samples[0].date, d(1));
    }

    #[test]
    fn offset_shifts_satellite_date() {
        let (p, i) = grids(3);
        let stations = vec![station("A0000000001", 30.4, -99.6, &[(1, 0.0, None), (3, 1.0, None)])];
        let mut opts = options(&p);
        opts.window.offset_days = 1;
        let table = assemble_samples(&stations, &p, &i, &opts).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table.samples[0].persiann_vals, [2.0; 4]);
    }

    #[test]
    fn empty_inputs_rejected() {
        let (p, i) = grids(1);
        assert!(matches!(
            assemble_samples(&[], &p, &i, &options(&p)),
            Err(IngestError::EmptyStations)
        ));
        let mut opts = options(&p);
        opts.window.start = d(5);
        opts.window.end = d(4);
        let stations = vec![station("A0000000001", 30.4, -99.6, &[])];
        assert!(matches!(
            assemble_samples(&stations, &p, &i, &opts),
            Err(IngestError::EmptyWindow { .. })
        ));
    }

    #[test]
    fn distances_sorted() {
        let (p, i) = grids(1);
        let stations = vec![station("A0000000001", 30.33, -99.71, &[(1, 0.0, None)])];
        let t = assemble_samples(&stations, &p, &i, &options(&p)).unwrap();
        let s = t.samples[0];
        assert!(s.persiann_dists.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.imerg_dists.windows(2).all(|w| w[0] <= w[1]));
        assert_ne!(s.persiann_dists, s.imerg_dists);
    }
}
