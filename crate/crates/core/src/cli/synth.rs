//! Synthetic gauge and two-product benchmark.
//!
//! A latent daily rain field is the rectified sum of Gaussian bumps whose
//! positions and amplitudes persist from day to day, scaled by an orographic
//! factor from a synthetic terrain. Whole days are dry with probability
//! `zero_inflation`. Gauges see the latent field at the station with
//! multiplicative noise plus occasional local showers; each product sees it
//! at its cell centers through a monotone power distortion, a bias,
//! multiplicative noise and occasional spurious rain.

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::ingest::{
    parse_ghcnd_dly, parse_ghcnd_stations, parse_grid_series, write_ghcnd_dly, write_ghcnd_stations, write_grid_series,
    DailySeries, GaugeData, GridSeries, Observation, ProductTag, StationInventory,
};
use crate::spatial::GridSpec;

const SCALE_MM: f64 = 5.0;
const RAIN_THRESHOLD: f64 = 2.0;
const FLAG: char = 'K';

/// How one product distorts the latent field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProductNoise {
    /// Multiplicative bias.
    pub bias: f64,
    /// Exponent offset: values are `bias·s·(v/s)^(1 + nonlinearity·distortion)`.
    pub distortion: f64,
    /// Log-space standard deviation of the multiplicative noise.
    pub noise: f64,
    /// Probability that a cell reports spurious rain.
    pub false_alarm: f64,
}

impl Default for ProductNoise {
    fn default() -> Self {
        Self {
            bias: 1.0,
            distortion: 0.0,
            noise: 0.2,
            false_alarm: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_stations: usize,
    pub n_days: usize,
    pub start: NaiveDate,
    /// South-west corner and side length (degrees) of the square region.
    pub lat_min: f64,
    pub lon_min: f64,
    pub extent_deg: f64,
    /// Cells per side of product A's cell-centered grid.
    pub grid_a_cells: usize,
    /// Nodes per side of product B's grid, spanning the region edge to edge.
    pub grid_b_cells: usize,
    pub bumps_per_day: usize,
    /// Probability that a bump carries over to the next day.
    pub persistence: f64,
    pub nonlinearity: f64,
    pub zero_inflation: f64,
    /// Log-space standard deviation of gauge noise.
    pub gauge_noise: f64,
    /// Probability of a gauge-only shower, unseen by either product.
    pub local_rain: f64,
    /// Mean depth (mm) of gauge-only showers and spurious product rain.
    pub spurious_mm: f64,
    pub product_a: ProductNoise,
    pub product_b: ProductNoise,
    /// Fraction of gauge days written as missing (`-9999`).
    pub missing_fraction: f64,
    /// Fraction of gauge days carrying a quality flag.
    pub flagged_fraction: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            n_stations: 100,
            n_days: 365,
            start: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
            lat_min: 30.0,
            lon_min: -100.0,
            extent_deg: 10.0,
            grid_a_cells: 20,
            grid_b_cells: 20,
            bumps_per_day: 8,
            persistence: 0.6,
            nonlinearity: 1.0,
            zero_inflation: 0.3,
            gauge_noise: 0.15,
            local_rain: 0.1,
            spurious_mm: 1.0,
            product_a: ProductNoise {
                bias: 1.3,
                distortion: 0.8,
                noise: 0.6,
                false_alarm: 0.15,
            },
            product_b: ProductNoise {
                bias: 0.95,
                distortion: 0.15,
                noise: 0.2,
                false_alarm: 0.05,
            },
            missing_fraction: 0.0,
            flagged_fraction: 0.0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(format!("synth: {m}")));
        for (name, v) in [
            ("n_stations", self.n_stations),
            ("n_days", self.n_days),
            ("bumps_per_day", self.bumps_per_day),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.grid_a_cells < 2 || self.grid_b_cells < 2 {
            return bad("grids need at least 2 cells per side".into());
        }
        for (name, p) in [
            ("persistence", self.persistence),
            ("local_rain", self.local_rain),
            ("product_a.false_alarm", self.product_a.false_alarm),
            ("product_b.false_alarm", self.product_b.false_alarm),
            ("zero_inflation", self.zero_inflation),
            ("missing_fraction", self.missing_fraction),
            ("flagged_fraction", self.flagged_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} must be in [0, 1]"));
            }
        }
        if self.missing_fraction + self.flagged_fraction > 1.0 {
            return bad("missing_fraction + flagged_fraction exceeds 1".into());
        }
        if !(self.extent_deg > 0.0) || self.lat_min < -90.0 || self.lat_min + self.extent_deg > 90.0 {
            return bad("region must lie within [-90, 90] latitude".into());
        }
        if !(self.gauge_noise >= 0.0) || !(self.nonlinearity >= 0.0) || !(self.spurious_mm > 0.0) {
            return bad("noise and nonlinearity must be non-negative, spurious_mm positive".into());
        }
        for (name, p) in [("product_a", self.product_a), ("product_b", self.product_b)] {
            if !(p.bias > 0.0) || !(p.noise >= 0.0) || !(1.0 + self.nonlinearity * p.distortion > 0.0) {
                return bad(format!(
                    "{name}: bias must be positive, noise non-negative and exponent positive"
                ));
            }
        }
        Ok(())
    }

    /// Product A: `grid_a_cells` cell centers per side.
    pub fn grid_a(&self) -> GridSpec {
        let step = self.extent_deg / self.grid_a_cells as f64;
        GridSpec::new(
            self.lat_min + step / 2.0,
            step,
            self.grid_a_cells,
            self.lon_min + step / 2.0,
            step,
            self.grid_a_cells,
        )
        .expect("validated region")
    }

    /// Product B: `grid_b_cells` nodes per side, first and last on the region edge.
    pub fn grid_b(&self) -> GridSpec {
        let step = self.extent_deg / (self.grid_b_cells - 1) as f64;
        GridSpec::new(
            self.lat_min,
            step,
            self.grid_b_cells,
            self.lon_min,
            step,
            self.grid_b_cells,
        )
        .expect("validated region")
    }

    /// Number of gauge days that survive into the sample table.
    pub fn expected_samples(&self) -> usize {
        self.n_stations * self.n_days
    }
}

/// Generated benchmark in the on-disk formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthFiles {
    pub gauges: Vec<u8>,
    pub stations: Vec<u8>,
    pub persiann: Vec<u8>,
    pub imerg: Vec<u8>,
}

impl SynthFiles {
    pub const NAMES: [&'static str; 4] = ["gauges.dly", "stations.txt", "persiann.grid", "imerg.grid"];

    pub fn named(&self) -> [(&'static str, &[u8]); 4] {
        [
            (Self::NAMES[0], &self.gauges),
            (Self::NAMES[1], &self.stations),
            (Self::NAMES[2], &self.persiann),
            (Self::NAMES[3], &self.imerg),
        ]
    }

    /// Parse the generated bytes back through the ingest readers.
    pub fn parse(&self) -> Result<(GaugeData, StationInventory, GridSeries, GridSeries), CliError> {
        Ok((
            parse_ghcnd_dly(self.gauges.as_slice())?,
            parse_ghcnd_stations(self.stations.as_slice())?,
            parse_grid_series(self.persiann.as_slice(), Some(ProductTag::Persiann))?,
            parse_grid_series(self.imerg.as_slice(), Some(ProductTag::Imerg))?,
        ))
    }
}

struct Bump {
    lat: f64,
    lon: f64,
    amp: f64,
    sigma: f64,
}

struct Mountain {
    lat: f64,
    lon: f64,
    height: f64,
    sigma: f64,
}

fn gauss(dlat: f64, dlon: f64, sigma: f64) -> f64 {
    (-(dlat * dlat + dlon * dlon) / (2.0 * sigma * sigma)).exp()
}

fn elevation(mountains: &[Mountain], lat: f64, lon: f64) -> f64 {
    100.0
        + mountains
            .iter()
            .map(|m| m.height * gauss(lat - m.lat, lon - m.lon, m.sigma))
            .sum::<f64>()
}

fn latent(bumps: &[Bump], elev: f64, lat: f64, lon: f64) -> f64 {
    let raw: f64 = bumps
        .iter()
        .map(|b| b.amp * gauss(lat - b.lat, lon - b.lon, b.sigma))
        .sum();
    (raw - RAIN_THRESHOLD).max(0.0) * (1.0 + elev / 2000.0)
}

fn distort(v: f64, p: &ProductNoise, nonlinearity: f64, noise: f64) -> f64 {
    let exponent = 1.0 + nonlinearity * p.distortion;
    let out = p.bias * SCALE_MM * (v / SCALE_MM).powf(exponent) * noise;
    (out * 100.0).round() / 100.0
}

fn round_to(v: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (v * f).round() / f
}

pub fn generate(spec: &SynthSpec) -> Result<SynthFiles, CliError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lat_min, lon_min, ext) = (spec.lat_min, spec.lon_min, spec.extent_deg);
    let in_region = |rng: &mut ChaCha8Rng, margin: f64| {
        (
            rng.random_range(lat_min + margin..lat_min + ext - margin),
            rng.random_range(lon_min + margin..lon_min + ext - margin),
        )
    };

    let mountains: Vec<Mountain> = (0..3)
        .map(|_| {
            let (lat, lon) = in_region(&mut rng, 0.0);
            Mountain {
                lat,
                lon,
                height: rng.random_range(500.0..2500.0),
                sigma: rng.random_range(0.08..0.2) * ext,
            }
        })
        .collect();

    let margin = (0.075 * ext).min(ext / 4.0);
    let stations: Vec<(String, f64, f64, f64)> = (0..spec.n_stations)
        .map(|i| {
            let (lat, lon) = in_region(&mut rng, margin);
            let (lat, lon) = (round_to(lat, 4), round_to(lon, 4));
            (
                format!("SYN{:08}", i + 1),
                lat,
                lon,
                round_to(elevation(&mountains, lat, lon), 1),
            )
        })
        .collect();

    let (grid_a, grid_b) = (spec.grid_a(), spec.grid_b());
    let cell_elev = |g: &GridSpec| -> Vec<f64> {
        (0..g.len())
            .map(|k| {
                let (i, j) = g.row_col(k);
                elevation(&mountains, g.lat(i), g.lon(j))
            })
            .collect()
    };
    let (elev_a, elev_b) = (cell_elev(&grid_a), cell_elev(&grid_b));

    let amp = LogNormal::new(8f64.ln(), 0.6).expect("valid lognormal");
    let drift = Normal::new(0.0, 0.03 * ext).expect("valid normal");
    let gauge_noise = Normal::new(-spec.gauge_noise * spec.gauge_noise / 2.0, spec.gauge_noise).expect("valid");
    let noise_a = Normal::new(0.0, spec.product_a.noise).expect("valid normal");
    let noise_b = Normal::new(0.0, spec.product_b.noise).expect("valid normal");
    let spurious = Exp::new(1.0 / spec.spurious_mm).expect("validated rate");
    let new_bump = |rng: &mut ChaCha8Rng| {
        let (lat, lon) = in_region(rng, -0.1 * ext);
        Bump {
            lat,
            lon,
            amp: amp.sample(rng),
            sigma: rng.random_range(0.05..0.15) * ext,
        }
    };
    let mut bumps: Vec<Bump> = (0..spec.bumps_per_day).map(|_| new_bump(&mut rng)).collect();

    let mut gauges: GaugeData = stations.iter().map(|s| (s.0.clone(), DailySeries::new())).collect();
    let mut persiann = GridSeries::new(grid_a, ProductTag::Persiann)?;
    let mut imerg = GridSeries::new(grid_b, ProductTag::Imerg)?;

    for day in 0..spec.n_days {
        let date = spec.start + Duration::days(day as i64);
        if day > 0 {
            for b in bumps.iter_mut() {
                if rng.random_bool(spec.persistence) {
                    b.lat += drift.sample(&mut rng);
                    b.lon += drift.sample(&mut rng);
                    b.amp *= rng.random_range(0.7..1.3);
                } else {
                    *b = new_bump(&mut rng);
                }
            }
        }
        let dry = rng.random_bool(spec.zero_inflation);
        let field = |lat: f64, lon: f64, elev: f64| if dry { 0.0 } else { latent(&bumps, elev, lat, lon) };

        for (id, lat, lon, elev) in &stations {
            let mut v = field(*lat, *lon, *elev) * gauge_noise.sample(&mut rng).exp();
            if !dry && rng.random_bool(spec.local_rain) {
                v += spurious.sample(&mut rng);
            }
            let u: f64 = rng.random();
            if u < spec.missing_fraction {
                continue;
            }
            let qflag = (u < spec.missing_fraction + spec.flagged_fraction).then_some(FLAG);
            let obs = Observation {
                precip_mm: round_to(v, 1),
                qflag,
            };
            gauges.get_mut(id).expect("station inserted").insert(date, obs);
        }
        for (grid, elev, p, noise, out) in [
            (&grid_a, &elev_a, &spec.product_a, &noise_a, &mut persiann),
            (&grid_b, &elev_b, &spec.product_b, &noise_b, &mut imerg),
        ] {
            let values = (0..grid.len())
                .map(|k| {
                    let (i, j) = grid.row_col(k);
                    let n = noise.sample(&mut rng).exp();
                    let mut v = distort(field(grid.lat(i), grid.lon(j), elev[k]), p, spec.nonlinearity, n);
                    if rng.random_bool(p.false_alarm) {
                        v = round_to(v + spurious.sample(&mut rng), 2);
                    }
                    v
                })
                .collect();
            out.insert(date, values)?;
        }
    }

    let mut files = SynthFiles {
        gauges: Vec::new(),
        stations: Vec::new(),
        persiann: Vec::new(),
        imerg: Vec::new(),
    };
    write_ghcnd_dly(&mut files.gauges, &gauges)?;
    let names: Vec<String> = (1..=stations.len()).map(|i| format!("SYNTHETIC GAUGE {i}")).collect();
    write_ghcnd_stations(
        &mut files.stations,
        stations
            .iter()
            .zip(&names)
            .map(|((id, lat, lon, elev), name)| (id.as_str(), *lat, *lon, *elev, name.as_str())),
    )?;
    write_grid_series(&mut files.persiann, &persiann)?;
    write_grid_series(&mut files.imerg, &imerg)?;
    Ok(files)
}
