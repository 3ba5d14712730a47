//! Plain-text container for one gridded precipitation product.
//!
//! ```text
//! product=IMERG
//! lat0=25.05 dlat=0.1 nlat=2 lon0=-124.95 dlon=0.1 nlon=3
//! date=2014-01-01
//! 0 0.5 NA
//! 1.25 0 0
//! date=2014-01-02
//! ...
//! ```
//!
//! Each date block holds `nlat` rows of `nlon` values. The first row is
//! latitude index 0; `NA` marks a missing cell. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

use super::IngestError;
use crate::spatial::{is_missing, GridSpec, MISSING};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProductTag {
    Persiann,
    Imerg,
}

impl fmt::Display for ProductTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProductTag::Persiann => "PERSIANN",
            ProductTag::Imerg => "IMERG",
        })
    }
}

impl FromStr for ProductTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PERSIANN" => Ok(ProductTag::Persiann),
            "IMERG" => Ok(ProductTag::Imerg),
            other => Err(format!("unknown product tag {other:?}")),
        }
    }
}

/// Daily fields of one product on a regular grid. Missing cells are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSeries {
    spec: GridSpec,
    product: ProductTag,
    fields: BTreeMap<NaiveDate, Vec<f64>>,
}

impl GridSeries {
    pub fn new(spec: GridSpec, product: ProductTag) -> Result<Self, IngestError> {
        spec.validate()?;
        Ok(Self {
            spec,
            product,
            fields: BTreeMap::new(),
        })
    }

    /// Add the field for `date`. Values must be non-negative or missing.
    pub fn insert(&mut self, date: NaiveDate, field: Vec<f64>) -> Result<(), IngestError> {
        if field.len() != self.spec.len() {
            return Err(IngestError::InvalidSample(format!(
                "field for {date} has {} cells, grid has {}",
                field.len(),
                self.spec.len()
            )));
        }
        if let Some(v) = field
            .iter()
            .find(|v| !is_missing(**v) && !(**v >= 0.0 && v.is_finite()))
        {
            return Err(IngestError::InvalidSample(format!(
                "field for {date} holds invalid value {v}"
            )));
        }
        if self.fields.contains_key(&date) {
            return Err(IngestError::InvalidSample(format!("duplicate field for {date}")));
        }
        self.fields.insert(date, field);
        Ok(())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn product(&self) -> ProductTag {
        self.product
    }

    pub fn field(&self, date: NaiveDate) -> Option<&[f64]> {
        self.fields.get(&date).map(Vec::as_slice)
    }

    pub fn fields(&self) -> &BTreeMap<NaiveDate, Vec<f64>> {
        &self.fields
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.fields.keys().copied()
    }
}

const WHAT: &str = "grid series";

fn header_spec(line: &str, n: usize) -> Result<GridSpec, IngestError> {
    let mut kv = BTreeMap::new();
    for tok in line.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| IngestError::parse(WHAT, n, format!("expected key=value, found {tok:?}")))?;
        if kv.insert(k, v).is_some() {
            return Err(IngestError::parse(WHAT, n, format!("repeated key {k}")));
        }
    }
    let float = |k: &str| -> Result<f64, IngestError> {
        kv.get(k)
            .ok_or_else(|| IngestError::parse(WHAT, n, format!("missing {k}")))?
            .parse()
            .map_err(|_| IngestError::parse(WHAT, n, format!("malformed {k}")))
    };
    let count = |k: &str| -> Result<usize, IngestError> {
        kv.get(k)
            .ok_or_else(|| IngestError::parse(WHAT, n, format!("missing {k}")))?
            .parse()
            .map_err(|_| IngestError::parse(WHAT, n, format!("malformed {k}")))
    };
    for k in kv.keys() {
        if !["lat0", "dlat", "nlat", "lon0", "dlon", "nlon"].contains(k) {
            return Err(IngestError::parse(WHAT, n, format!("unknown header key {k}")));
        }
    }
    GridSpec::new(
        float("lat0")?,
        float("dlat")?,
        count("nlat")?,
        float("lon0")?,
        float("dlon")?,
        count("nlon")?,
    )
    .map_err(|e| IngestError::parse(WHAT, n, e.to_string()))
}

/// Parse grid-series text. When `expected` is given, the header's product
/// tag must match it.
pub fn parse_grid_series<R: BufRead>(reader: R, expected: Option<ProductTag>) -> Result<GridSeries, IngestError> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('#')));

    let mut next = |want: &str| -> Result<(usize, String), IngestError> {
        match lines.next() {
            Some((n, l)) => Ok((n, l?.trim().to_string())),
            None => Err(IngestError::parse(
                WHAT,
                0,
                format!("unexpected end of input, expected {want}"),
            )),
        }
    };

    let (n, product_line) = next("product header")?;
    let tag = product_line
        .strip_prefix("product=")
        .ok_or_else(|| IngestError::parse(WHAT, n, "expected product=<tag>"))?;
    let product: ProductTag = tag.parse().map_err(|e: String| IngestError::parse(WHAT, n, e))?;
    if let Some(want) = expected {
        if want != product {
            return Err(IngestError::parse(
                WHAT,
                n,
                format!("expected product {want}, found {product}"),
            ));
        }
    }
    let (n, grid_line) = next("grid header")?;
    let spec = header_spec(&grid_line, n)?;
    let mut series = GridSeries::new(spec, product)?;

    loop {
        let (n, line) = match next("date block") {
            Ok(v) => v,
            Err(IngestError::Parse { line: 0, .. }) => break,
            Err(e) => return Err(e),
        };
        let raw = line
            .strip_prefix("date=")
            .ok_or_else(|| IngestError::parse(WHAT, n, format!("expected date=YYYY-MM-DD, found {line:?}")))?;
        let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d")
            .map_err(|_| IngestError::parse(WHAT, n, format!("malformed date {raw:?}")))?;
        if series.fields.contains_key(&date) {
            return Err(IngestError::parse(WHAT, n, format!("duplicate date block {date}")));
        }
        let mut field = Vec::with_capacity(spec.len());
        for _ in 0..spec.nlat {
            let (n, row) = next("grid row").map_err(|_| {
                IngestError::parse(WHAT, n, format!("date block {date} has fewer than {} rows", spec.nlat))
            })?;
            if row.starts_with("date=") {
                return Err(IngestError::parse(
                    WHAT,
                    n,
                    format!("date block {date} has fewer than {} rows", spec.nlat),
                ));
            }
            let before = field.len();
            for tok in row.split_whitespace() {
                let v = if tok == "NA" {
                    MISSING
                } else {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| IngestError::parse(WHAT, n, format!("malformed value {tok:?}")))?;
                    if !v.is_finite() {
                        return Err(IngestError::parse(WHAT, n, format!("non-finite value {tok:?}")));
                    }
                    if v < 0.0 {
                        return Err(IngestError::parse(WHAT, n, format!("negative precipitation {v}")));
                    }
                    v
                };
                field.push(v);
            }
            if field.len() - before != spec.nlon {
                return Err(IngestError::parse(
                    WHAT,
                    n,
                    format!(
                        "row has {} values, header declares nlon={}",
                        field.len() - before,
                        spec.nlon
                    ),
                ));
            }
        }
        series.fields.insert(date, field);
    }
    Ok(series)
}

pub fn read_grid_series(path: impl AsRef<Path>, product: ProductTag) -> Result<GridSeries, IngestError> {
    let file = std::fs::File::open(path)?;
    parse_grid_series(std::io::BufReader::new(file), Some(product))
}

pub fn write_grid_series<W: Write>(mut w: W, series: &GridSeries) -> std::io::Result<()> {
    let s = series.spec;
    writeln!(w, "product={}", series.product)?;
    writeln!(
        w,
        "lat0={} dlat={} nlat={} lon0={} dlon={} nlon={}",
        s.lat0, s.dlat, s.nlat, s.lon0, s.dlon, s.nlon
    )?;
    let mut row = String::new();
    for (date, field) in &series.fields {
        writeln!(w, "date={}", date.format("%Y-%m-%d"))?;
        for cells in field.chunks(s.nlon) {
            row.clear();
            for (j, v) in cells.iter().enumerate() {
                if j > 0 {
                    row.push(' ');
                }
                if is_missing(*v) {
                    row.push_str("NA");
                } else {
                    row.push_str(&v.to_string());
                }
            }
            writeln!(w, "{row}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BY_TWO: &str =
        "product=PERSIANN\nlat0=30 dlat=0.25 nlat=2 lon0=-100 dlon=0.25 nlon=2\ndate=2014-01-01\n0 1\n2 3\n";

    #[test]
    fn declared_order() {
        let g = parse_grid_series(TWO_BY_TWO.as_bytes(), Some(ProductTag::Persiann)).unwrap();
        let d = NaiveDate::from_ymd_opt(2014, 1, 1).unwrap();
        assert_eq!(g.field(d).unwrap(), &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(g.spec().nlat, 2);
        assert_eq!(g.spec().dlon, 0.25);
    }

    #[test]
    fn na_is_missing() {
        let text = TWO_BY_TWO.replace("2 3", "NA 3");
        let g = parse_grid_series(text.as_bytes(), None).unwrap();
        let f = g.field(NaiveDate::from_ymd_opt(2014, 1, 1).unwrap()).unwrap();
        assert!(is_missing(f[2]));
    }

    #[test]
    fn errors() {
        let wrong_tag = parse_grid_series(TWO_BY_TWO.as_bytes(), Some(ProductTag::Imerg));
        assert!(wrong_tag.is_err());
        let short_row = TWO_BY_TWO.replace("2 3", "2");
        assert!(parse_grid_series(short_row.as_bytes(), None).is_err());
        let negative = TWO_BY_TWO.replace("2 3", "2 -3");
        let err = parse_grid_series(negative.as_bytes(), None).unwrap_err();
        assert!(err.to_string().contains("negative"), "{err}");
        let dup = format!("{TWO_BY_TWO}date=2014-01-01\n0 1\n2 3\n");
        let err = parse_grid_series(dup.as_bytes(), None).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
        let missing_row = "product=PERSIANN\nlat0=30 dlat=0.25 nlat=2 lon0=-100 dlon=0.25 nlon=2\ndate=2014-01-01\n0 1\ndate=2014-01-02\n0 1\n2 3\n";
        assert!(parse_grid_series(missing_row.as_bytes(), None).is_err());
        let truncated = "product=PERSIANN\nlat0=30 dlat=0.25 nlat=2 lon0=-100 dlon=0.25 nlon=2\ndate=2014-01-01\n0 1\n";
        assert!(parse_grid_series(truncated.as_bytes(), None).is_err());
        let extra_key = TWO_BY_TWO.replace("nlon=2", "nlon=2 foo=1");
        assert!(parse_grid_series(extra_key.as_bytes(), None).is_err());
    }
}
