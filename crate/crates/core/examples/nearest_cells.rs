//! Great-circle distances and the four nearest grid cells of a station.

use precip_merge::spatial::{haversine_distance, nearest_k};
use precip_merge::{GeoPoint, GridSpec};

fn main() {
    let grid = GridSpec::new(25.125, 0.25, 100, -124.875, 0.25, 236).unwrap();
    let station = GeoPoint::new(38.8977, -77.0365).unwrap();
    let paris = GeoPoint::new(48.8566, 2.3522).unwrap();
    println!("station to Paris: {:.1} km", haversine_distance(station, paris));
    for n in nearest_k(station, &grid, 4).unwrap().entries() {
        let c = grid.center(n.index);
        println!(
            "cell {:>6} at ({:.3}, {:.3}): {:.3} km",
            n.index,
            c.lat(),
            c.lon(),
            n.distance_km
        );
    }
}
