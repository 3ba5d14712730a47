use std::cmp::Ordering;

use super::geo::{haversine_deg, normalize_lon, EARTH_RADIUS_KM};
use super::{GeoPoint, SpatialError};

/// A regular lat/lon grid. Cell centers sit at `origin + index * step`;
/// cells are numbered row-major, latitude first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lat0: f64,
    pub lon0: f64,
    pub dlat: f64,
    pub dlon: f64,
    pub nlat: usize,
    pub nlon: usize,
}

impl GridSpec {
    pub fn new(lat0: f64, dlat: f64, nlat: usize, lon0: f64, dlon: f64, nlon: usize) -> Result<Self, SpatialError> {
        let spec = Self {
            lat0,
            lon0,
            dlat,
            dlon,
            nlat,
            nlon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SpatialError> {
        let bad = |msg: &str| Err(SpatialError::InvalidGrid(msg.to_string()));
        if self.nlat == 0 || self.nlon == 0 {
            return bad("nlat and nlon must be positive");
        }
        if !(self.dlat.is_finite() && self.dlat > 0.0 && self.dlon.is_finite() && self.dlon > 0.0) {
            return bad("dlat and dlon must be finite and positive");
        }
        if !(self.lat0.is_finite() && self.lon0.is_finite()) {
            return bad("origin must be finite");
        }
        let top = self.lat(self.nlat - 1);
        if self.lat0 < -90.0 || top > 90.0 {
            return bad("cell centers leave the [-90, 90] latitude range");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nlat * self.nlon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lat(&self, i: usize) -> f64 {
        self.lat0 + i as f64 * self.dlat
    }

    pub fn lon(&self, j: usize) -> f64 {
        self.lon0 + j as f64 * self.dlon
    }

    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        i * self.nlon + j
    }

    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.nlon, index % self.nlon)
    }

    /// Center of cell `index` as a normalized [`GeoPoint`].
    pub fn center(&self, index: usize) -> GeoPoint {
        let (i, j) = self.row_col(index);
        GeoPoint::new(self.lat(i), self.lon(j)).expect("validated grid has valid centers")
    }

    fn distance_to(&self, p: GeoPoint, i: usize, j: usize) -> f64 {
        haversine_deg(p.lat(), p.lon(), self.lat(i), normalize_lon(self.lon(j)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance_km: f64,
}

/// The `k` closest grid cells, ascending by distance, ties by flat index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborSet {
    entries: Vec<Neighbor>,
}

impl NeighborSet {
    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|n| n.index)
    }

    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|n| n.distance_km)
    }
}

fn neighbor_order(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.distance_km.total_cmp(&b.distance_km).then(a.index.cmp(&b.index))
}

struct TopK {
    k: usize,
    items: Vec<Neighbor>,
}

impl TopK {
    fn offer(&mut self, candidate: Neighbor) {
        if self.items.len() == self.k {
            let last = self.items.last().expect("k > 0");
            if neighbor_order(&candidate, last) != Ordering::Less {
                return;
            }
            self.items.pop();
        }
        let pos = self
            .items
            .partition_point(|n| neighbor_order(n, &candidate) == Ordering::Less);
        self.items.insert(pos, candidate);
    }

    fn kth_distance(&self) -> Option<f64> {
        (self.items.len() == self.k).then(|| self.items[self.k - 1].distance_km)
    }
}

/// Smallest circular distance (degrees) from 0 to any value of `[a, b]`.
fn circular_gap(a: f64, b: f64) -> f64 {
    let above = (a / 360.0).ceil() * 360.0;
    if above <= b {
        return 0.0;
    }
    (a - (above - 360.0)).min(above - b)
}

/// The `k` grid cells nearest to `p`.
///
/// Searches square rings of cells around the cell containing `p` and stops
/// once a lower bound on the distance of every unvisited cell exceeds the
/// current k-th distance, so a query touches only a small neighborhood of a
/// large grid.
pub fn nearest_k(p: GeoPoint, grid: &GridSpec, k: usize) -> Result<NeighborSet, SpatialError> {
    let cells = grid.len();
    if k > cells {
        return Err(SpatialError::UndersizedGrid { k, cells });
    }
    if k == 0 {
        return Ok(NeighborSet::default());
    }
    let (nlat, nlon) = (grid.nlat as i64, grid.nlon as i64);

    let fi = (p.lat() - grid.lat0) / grid.dlat;
    let rel_lon = normalize_lon(p.lon() - grid.lon0);
    let fj = rel_lon / grid.dlon;
    let ic = (fi.round() as i64).clamp(0, nlat - 1);
    let jc = (fj.round() as i64).clamp(0, nlon - 1);
    let p_lon_frame = grid.lon0 + rel_lon;

    let cos_p = p.lat().to_radians().cos();
    let cos_min = grid
        .lat0
        .to_radians()
        .cos()
        .min(grid.lat(grid.nlat - 1).to_radians().cos())
        .max(0.0);

    let mut top = TopK {
        k,
        items: Vec::with_capacity(k + 1),
    };
    let visit = |i: i64, j: i64, top: &mut TopK| {
        let (i, j) = (i as usize, j as usize);
        top.offer(Neighbor {
            index: grid.flat_index(i, j),
            distance_km: grid.distance_to(p, i, j),
        });
    };

    for r in 0i64.. {
        let (i_lo, i_hi) = (ic - r, ic + r);
        let (j_lo, j_hi) = (jc - r, jc + r);
        for i in i_lo.max(0)..=i_hi.min(nlat - 1) {
            if i == i_lo || i == i_hi {
                for j in j_lo.max(0)..=j_hi.min(nlon - 1) {
                    visit(i, j, &mut top);
                }
            } else {
                if j_lo >= 0 {
                    visit(i, j_lo, &mut top);
                }
                if j_hi < nlon {
                    visit(i, j_hi, &mut top);
                }
            }
        }

        let lat_covered = i_lo <= 0 && i_hi >= nlat - 1;
        let lon_covered = j_lo <= 0 && j_hi >= nlon - 1;
        if lat_covered && lon_covered {
            break;
        }
        let Some(kth) = top.kth_distance() else {
            continue;
        };

        let mut bound = f64::INFINITY;
        if !lat_covered {
            let mut gap = f64::INFINITY;
            if i_lo > 0 {
                gap = gap.min(p.lat() - grid.lat((i_lo - 1) as usize));
            }
            if i_hi + 1 < nlat {
                gap = gap.min(grid.lat((i_hi + 1) as usize) - p.lat());
            }
            bound = bound.min(EARTH_RADIUS_KM * gap.max(0.0).to_radians());
        }
        if !lon_covered {
            let mut gap = f64::INFINITY;
            if j_lo > 0 {
                let near = p_lon_frame - grid.lon((j_lo - 1) as usize);
                let far = p_lon_frame - grid.lon0;
                gap = gap.min(circular_gap(near, far));
            }
            if j_hi + 1 < nlon {
                let near = grid.lon((j_hi + 1) as usize) - p_lon_frame;
                let far = grid.lon(grid.nlon - 1) - p_lon_frame;
                gap = gap.min(circular_gap(near, far));
            }
            let half = (gap.min(180.0) / 2.0).to_radians().sin();
            let h = (cos_p * cos_min * half * half).clamp(0.0, 1.0);
            bound = bound.min(2.0 * EARTH_RADIUS_KM * h.sqrt().asin());
        }
        if kth < bound * (1.0 - 1e-12) {
            break;
        }
    }

    Ok(NeighborSet { entries: top.items })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: GeoPoint, grid: &GridSpec, k: usize) -> Vec<Neighbor> {
        let mut all: Vec<Neighbor> = (0..grid.len())
            .map(|index| {
                let c = grid.center(index);
                Neighbor {
                    index,
                    distance_km: crate::spatial::haversine_distance(p, c),
                }
            })
            .collect();
        all.sort_by(neighbor_order);
        all.truncate(k);
        all
    }

    #[test]
    fn point_on_center_is_first() {
        let grid = GridSpec::new(30.0, 0.25, 10, -100.0, 0.25, 10).unwrap();
        let p = grid.center(37);
        let set = nearest_k(p, &grid, 4).unwrap();
        assert_eq!(set.entries()[0].index, 37);
        assert_eq!(set.entries()[0].distance_km, 0.0);
    }

    #[test]
    fn equidistant_ties_follow_flat_index() {
        // p sits at the exact center of a 2x2 grid straddling the equator.
        let grid = GridSpec::new(-0.5, 1.0, 2, 10.0, 1.0, 2).unwrap();
        let set = nearest_k(GeoPoint::new(0.0, 10.5).unwrap(), &grid, 4).unwrap();
        let d: Vec<f64> = set.distances().collect();
        assert!(d.windows(2).all(|w| w[0] == w[1]), "{d:?}");
        assert_eq!(set.indices().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn undersized_grid() {
        let grid = GridSpec::new(0.0, 1.0, 1, 0.0, 1.0, 3).unwrap();
        assert_eq!(
            nearest_k(GeoPoint::new(0.0, 0.0).unwrap(), &grid, 4),
            Err(SpatialError::UndersizedGrid { k: 4, cells: 3 })
        );
    }

    #[test]
    fn far_outside_grid_matches_brute_force() {
        let grid = GridSpec::new(25.0, 0.5, 12, 170.0, 0.5, 15).unwrap();
        for &(lat, lon) in &[(-60.0, -10.0), (80.0, -179.0), (0.0, 5.0), (27.0, -176.0)] {
            let p = GeoPoint::new(lat, lon).unwrap();
            assert_eq!(nearest_k(p, &grid, 4).unwrap().entries(), &brute(p, &grid, 4)[..]);
        }
    }

    #[test]
    fn circular_gap_wraps() {
        assert_eq!(circular_gap(10.0, 20.0), 10.0);
        assert_eq!(circular_gap(-20.0, -10.0), 10.0);
        assert_eq!(circular_gap(-5.0, 5.0), 0.0);
        assert_eq!(circular_gap(340.0, 350.0), 10.0);
    }
}
