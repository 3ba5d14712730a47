//! Sample storage.
//!
//! The binary cache is little-endian and columnar:
//!
//! | field          | type                                         |
//! |----------------|----------------------------------------------|
//! | magic          | 8 bytes, `PMSAMPLE`                          |
//! | version        | u32 (currently 1)                            |
//! | row count      | u64                                          |
//! | station count  | u32                                          |
//! | station ids    | station count x 11 bytes ASCII, space padded |
//! | station column | row count x u32 (index into station ids)     |
//! | date column    | row count x i32 (days since 1970-01-01)      |
//! | predictand     | row count x f64                              |
//! | predictors     | 17 columns of row count x f64, canonical order |
//!
//! The CSV mirror has a header naming every predictor as in
//! [`ALL_PREDICTORS`](super::ALL_PREDICTORS).

use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{IngestError, RegressionSample, SampleTable, ALL_PREDICTORS, PREDICTAND_NAME};

pub const CACHE_MAGIC: &[u8; 8] = b"PMSAMPLE";
pub const CACHE_VERSION: u32 = 1;
const ID_WIDTH: usize = 11;

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()
}

fn predictor_column(samples: &[RegressionSample], k: usize) -> impl Iterator<Item = f64> + '_ {
    let p = ALL_PREDICTORS[k];
    samples.iter().map(move |s| p.extract(s))
}

pub fn write_sample_cache<W: Write>(mut w: W, table: &SampleTable) -> Result<(), IngestError> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(table.samples.len() as u64).to_le_bytes())?;
    w.write_all(&(table.station_ids.len() as u32).to_le_bytes())?;
    for id in &table.station_ids {
        if id.len() > ID_WIDTH || !id.is_ascii() {
            return Err(IngestError::Cache(format!(
                "station id {id:?} is not ASCII of at most {ID_WIDTH} bytes"
            )));
        }
        w.write_all(format!("{id:<ID_WIDTH$}").as_bytes())?;
    }
    let mut buf = Vec::with_capacity(table.samples.len() * 8);
    for s in &table.samples {
        buf.extend_from_slice(&s.station.to_le_bytes());
    }
    for s in &table.samples {
        let days = (s.date - epoch()).num_days() as i32;
        buf.extend_from_slice(&days.to_le_bytes());
    }
    w.write_all(&buf)?;
    buf.clear();
    for s in &table.samples {
        buf.extend_from_slice(&s.y.to_le_bytes());
    }
    w.write_all(&buf)?;
    for k in 0..ALL_PREDICTORS.len() {
        buf.clear();
        for v in predictor_column(&table.samples, k) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N], IngestError> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| IngestError::Cache(format!("truncated cache: {e}")))?;
    Ok(b)
}

pub fn read_sample_cache<R: Read>(mut r: R) -> Result<SampleTable, IngestError> {
    if &take::<8, _>(&mut r)? != CACHE_MAGIC {
        return Err(IngestError::Cache("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != CACHE_VERSION {
        return Err(IngestError::Cache(format!("unsupported version {version}")));
    }
    let rows = u64::from_le_bytes(take(&mut r)?) as usize;
    let n_stations = u32::from_le_bytes(take(&mut r)?) as usize;
    let mut station_ids = Vec::with_capacity(n_stations);
    for _ in 0..n_stations {
        let raw: [u8; ID_WIDTH] = take(&mut r)?;
        let id = std::str::from_utf8(&raw).map_err(|_| IngestError::Cache("non-ASCII station id".into()))?;
        station_ids.push(id.trim_end().to_string());
    }
    let zero = RegressionSample {
        station: 0,
        date: epoch(),
        y: 0.0,
        persiann_vals: [0.0; 4],
        imerg_vals: [0.0; 4],
        persiann_dists: [0.0; 4],
        imerg_dists: [0.0; 4],
        elevation: 0.0,
    };
    let mut samples = vec![zero; rows];
    for s in samples.iter_mut() {
        s.station = u32::from_le_bytes(take(&mut r)?);
        if s.station as usize >= n_stations {
            return Err(IngestError::Cache(format!("station index {} out of range", s.station)));
        }
    }
    for s in samples.iter_mut() {
        let days = i32::from_le_bytes(take(&mut r)?);
        s.date = epoch() + chrono::Duration::days(days as i64);
    }
    for s in samples.iter_mut() {
        s.y = f64::from_le_bytes(take(&mut r)?);
    }
    for k in 0..ALL_PREDICTORS.len() {
        for s in samples.iter_mut() {
            let v = f64::from_le_bytes(take(&mut r)?);
            match k {
                0..=3 => s.persiann_vals[k] = v,
                4..=7 => s.imerg_vals[k - 4] = v,
                8..=11 => s.persiann_dists[k - 8] = v,
                12..=15 => s.imerg_dists[k - 12] = v,
                _ => s.elevation = v,
            }
        }
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(IngestError::Cache("trailing bytes after last column".into()));
    }
    for s in &samples {
        s.validate()?;
    }
    Ok(SampleTable { station_ids, samples })
}

/// CSV mirror: `station_id,date,true value,<17 predictor names>`.
pub fn write_samples_csv<W: Write>(mut w: W, table: &SampleTable) -> std::io::Result<()> {
    let mut header = vec!["station_id", "date", PREDICTAND_NAME];
    header.extend(ALL_PREDICTORS.iter().map(|p| p.name()));
    writeln!(w, "{}", header.join(","))?;
    for s in &table.samples {
        write!(w, "{},{},{}", table.station_id(s), s.date.format("%Y-%m-%d"), s.y)?;
        for p in ALL_PREDICTORS {
            write!(w, ",{}", p.extract(s))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SampleTable {
        let s = RegressionSample {
            station: 1,
            date: NaiveDate::from_ymd_opt(2015, 3, 4).unwrap(),
            y: 2.5,
            persiann_vals: [1.0, 2.0, 3.0, 4.0],
            imerg_vals: [0.5, 0.25, 0.0, 1.0],
            persiann_dists: [1.0, 2.0, 3.0, 4.0],
            imerg_dists: [5.0, 5.0, 6.0, 7.0],
            elevation: -12.5,
        };
        SampleTable {
            station_ids: vec!["USC00000001".into(), "USC00000002".into()],
            samples: vec![
                s,
                RegressionSample {
                    station: 0,
                    y: 0.0,
                    ..s
                },
            ],
        }
    }

    #[test]
    fn cache_round_trip() {
        let t = table();
        let mut buf = Vec::new();
        write_sample_cache(&mut buf, &t).unwrap();
        assert_eq!(&buf[..8], CACHE_MAGIC);
        assert_eq!(read_sample_cache(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn cache_rejects_corruption() {
        let mut buf = Vec::new();
        write_sample_cache(&mut buf, &table()).unwrap();
        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(read_sample_cache(bad_magic.as_slice()).is_err());
        assert!(read_sample_cache(&buf[..buf.len() - 1]).is_err());
        let mut longer = buf.clone();
        longer.push(0);
        assert!(read_sample_cache(longer.as_slice()).is_err());
    }

    #[test]
    fn csv_header_names() {
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &table()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("station_id,date,true value,PERSIANN value 1,"));
        assert!(header.ends_with(",IMERG distance 4,Station elevation"));
        assert_eq!(header.split(',').count(), 20);
        assert_eq!(text.lines().count(), 3);
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("USC00000002,2015-03-04,2.5,1,"));
    }
}
