//! Bilinear regridding of a coarse field onto a finer staggered grid.

use precip_merge::spatial::bilinear_regrid;
use precip_merge::GridSpec;

fn main() {
    let coarse = GridSpec::new(30.0, 1.0, 3, -100.0, 1.0, 3).unwrap();
    let field = vec![0.0, 1.0, 2.0, 1.0, 2.0, 3.0, 2.0, 3.0, f64::NAN];
    let fine = GridSpec::new(30.25, 0.5, 4, -99.75, 0.5, 3).unwrap();
    let out = bilinear_regrid(&field, &coarse, &fine).unwrap();
    for i in 0..fine.nlat {
        let row: Vec<String> = (0..fine.nlon)
            .map(|j| format!("{:6.2}", out[fine.flat_index(i, j)]))
            .collect();
        println!("lat {:6.2}: {}", fine.lat(i), row.join(" "));
    }
}
