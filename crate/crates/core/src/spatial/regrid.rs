use super::{GridSpec, SpatialError};

/// Marker for a missing cell value.
pub const MISSING: f64 = f64::NAN;

pub fn is_missing(v: f64) -> bool {
    v.is_nan()
}

// Fractional indices closer than this to an integer are snapped onto it, so
// coordinates computed as `origin + i * step` land exactly on source centers.
const SNAP: f64 = 1e-9;

fn fractional_index(offset: f64, step: f64, n: usize) -> Option<f64> {
    let mut f = offset / step;
    let nearest = f.round();
    if (f - nearest).abs() < SNAP {
        f = nearest;
    }
    (f >= 0.0 && f <= (n - 1) as f64).then_some(f)
}

fn axis_weights(f: f64, n: usize) -> (usize, f64) {
    let base = (f.floor() as usize).min(n.saturating_sub(2));
    (base, f - base as f64)
}

/// Bilinear interpolation of `field` (laid out on `source`) at a point.
///
/// Returns [`MISSING`] when the point falls outside the span of source
/// centers or when any contributor with non-zero weight is missing.
pub fn bilinear_at(field: &[f64], source: &GridSpec, lat: f64, lon: f64) -> f64 {
    let Some(fi) = fractional_index(lat - source.lat0, source.dlat, source.nlat) else {
        return MISSING;
    };
    let span_lon = (source.nlon - 1) as f64 * source.dlon;
    let mut rel_lon = (lon - source.lon0).rem_euclid(360.0);
    if rel_lon > span_lon + SNAP * source.dlon {
        rel_lon -= 360.0;
    }
    let Some(fj) = fractional_index(rel_lon, source.dlon, source.nlon) else {
        return MISSING;
    };

    let (i0, ti) = axis_weights(fi, source.nlat);
    let (j0, tj) = axis_weights(fj, source.nlon);
    let mut acc = 0.0;
    for (di, wi) in [(0, 1.0 - ti), (1, ti)] {
        if wi == 0.0 {
            continue;
        }
        for (dj, wj) in [(0, 1.0 - tj), (1, tj)] {
            if wj == 0.0 {
                continue;
            }
            let v = field[source.flat_index(i0 + di, j0 + dj)];
            if is_missing(v) {
                return MISSING;
            }
            acc += wi * wj * v;
        }
    }
    acc
}

/// Resample `field` from `source` onto every cell center of `target`.
pub fn bilinear_regrid(field: &[f64], source: &GridSpec, target: &GridSpec) -> Result<Vec<f64>, SpatialError> {
    if field.len() != source.len() {
        return Err(SpatialError::FieldSize {
            expected: source.len(),
            got: field.len(),
        });
    }
    let mut out = Vec::with_capacity(target.len());
    for i in 0..target.nlat {
        let lat = target.lat(i);
        for j in 0..target.nlon {
            out.push(bilinear_at(field, source, lat, target.lon(j)));
        }
    }
    Ok(out)
}
