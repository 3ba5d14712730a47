//! Geodesic distances, nearest-k grid queries and bilinear regridding.

mod geo;
mod grid;
mod regrid;

pub use geo::{haversine_distance, GeoPoint, EARTH_RADIUS_KM};
pub use grid::{nearest_k, GridSpec, Neighbor, NeighborSet};
pub use regrid::{bilinear_at, bilinear_regrid, is_missing, MISSING};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpatialError {
    #[error("latitude {0} outside [-90, 90]")]
    InvalidLatitude(f64),
    #[error("longitude {0} is not finite")]
    InvalidLongitude(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid has {cells} cells, fewer than the {k} neighbors requested")]
    UndersizedGrid { k: usize, cells: usize },
    #[error("field has {got} values, grid expects {expected}")]
    FieldSize { expected: usize, got: usize },
}
