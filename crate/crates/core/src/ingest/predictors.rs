use std::fmt;
use std::str::FromStr;

use super::RegressionSample;

/// Column label of the predictand in exported tables.
pub const PREDICTAND_NAME: &str = "true value";

/// One of the 17 candidate predictors. Neighbor ranks are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predictor {
    PersiannValue(u8),
    ImergValue(u8),
    PersiannDistance(u8),
    ImergDistance(u8),
    StationElevation,
}

use Predictor::*;

/// All predictors in canonical order: PERSIANN values, IMERG values,
/// PERSIANN distances, IMERG distances, station elevation.
pub const ALL_PREDICTORS: [Predictor; 17] = [
    PersiannValue(1),
    PersiannValue(2),
    PersiannValue(3),
    PersiannValue(4),
    ImergValue(1),
    ImergValue(2),
    ImergValue(3),
    ImergValue(4),
    PersiannDistance(1),
    PersiannDistance(2),
    PersiannDistance(3),
    PersiannDistance(4),
    ImergDistance(1),
    ImergDistance(2),
    ImergDistance(3),
    ImergDistance(4),
    StationElevation,
];

const SET1: [Predictor; 9] = [
    PersiannValue(1),
    PersiannValue(2),
    PersiannValue(3),
    PersiannValue(4),
    PersiannDistance(1),
    PersiannDistance(2),
    PersiannDistance(3),
    PersiannDistance(4),
    StationElevation,
];

const SET2: [Predictor; 9] = [
    ImergValue(1),
    ImergValue(2),
    ImergValue(3),
    ImergValue(4),
    ImergDistance(1),
    ImergDistance(2),
    ImergDistance(3),
    ImergDistance(4),
    StationElevation,
];

impl Predictor {
    pub fn name(&self) -> &'static str {
        const NAMES: [&str; 17] = [
            "PERSIANN value 1",
            "PERSIANN value 2",
            "PERSIANN value 3",
            "PERSIANN value 4",
            "IMERG value 1",
            "IMERG value 2",
            "IMERG value 3",
            "IMERG value 4",
            "PERSIANN distance 1",
            "PERSIANN distance 2",
            "PERSIANN distance 3",
            "PERSIANN distance 4",
            "IMERG distance 1",
            "IMERG distance 2",
            "IMERG distance 3",
            "IMERG distance 4",
            "Station elevation",
        ];
        NAMES[self.canonical_index()]
    }

    /// Position in [`ALL_PREDICTORS`].
    pub fn canonical_index(&self) -> usize {
        let rank = |r: u8| {
            assert!((1..=4).contains(&r), "neighbor rank {r} out of 1..=4");
            r as usize - 1
        };
        match *self {
            PersiannValue(r) => rank(r),
            ImergValue(r) => 4 + rank(r),
            PersiannDistance(r) => 8 + rank(r),
            ImergDistance(r) => 12 + rank(r),
            StationElevation => 16,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, PersiannValue(_) | ImergValue(_))
    }

    pub fn is_distance(&self) -> bool {
        matches!(self, PersiannDistance(_) | ImergDistance(_))
    }

    pub fn extract(&self, s: &RegressionSample) -> f64 {
        match *self {
            PersiannValue(r) => s.persiann_vals[r as usize - 1],
            ImergValue(r) => s.imerg_vals[r as usize - 1],
            PersiannDistance(r) => s.persiann_dists[r as usize - 1],
            ImergDistance(r) => s.imerg_dists[r as usize - 1],
            StationElevation => s.elevation,
        }
    }

    pub fn from_name(name: &str) -> Option<Predictor> {
        ALL_PREDICTORS.iter().copied().find(|p| p.name() == name)
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredictorSet {
    Set1,
    Set2,
    Set3,
}

impl PredictorSet {
    pub const ALL: [PredictorSet; 3] = [PredictorSet::Set1, PredictorSet::Set2, PredictorSet::Set3];

    pub fn members(&self) -> &'static [Predictor] {
        match self {
            PredictorSet::Set1 => &SET1,
            PredictorSet::Set2 => &SET2,
            PredictorSet::Set3 => &ALL_PREDICTORS,
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.members().iter().map(Predictor::name).collect()
    }

    pub fn number(&self) -> u8 {
        match self {
            PredictorSet::Set1 => 1,
            PredictorSet::Set2 => 2,
            PredictorSet::Set3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(PredictorSet::Set1),
            2 => Some(PredictorSet::Set2),
            3 => Some(PredictorSet::Set3),
            _ => None,
        }
    }
}

impl fmt::Display for PredictorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "predictor set {}", self.number())
    }
}

impl FromStr for PredictorSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.trim().trim_start_matches("predictor set ").trim_start_matches("set");
        digits
            .trim()
            .parse::<u8>()
            .ok()
            .and_then(PredictorSet::from_number)
            .ok_or_else(|| format!("unknown predictor set {s:?}"))
    }
}

/// The predictor vector of `sample` for `set`, in the set's member order.
pub fn select_predictors(sample: &RegressionSample, set: PredictorSet) -> Vec<f64> {
    set.members().iter().map(|p| p.extract(sample)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn sample() -> RegressionSample {
        RegressionSample {
            station: 0,
            date: NaiveDate::from_ymd_opt(2014, 1, 1).unwrap(),
            y: 3.0,
            persiann_vals: [1.0, 2.0, 3.0, 4.0],
            imerg_vals: [5.0, 6.0, 7.0, 8.0],
            persiann_dists: [10.0, 11.0, 12.0, 13.0],
            imerg_dists: [20.0, 21.0, 22.0, 23.0],
            elevation: 99.0,
        }
    }

    #[test]
    fn set_vectors() {
        let s = sample();
        assert_eq!(
            select_predictors(&s, PredictorSet::Set1),
            vec![1.0, 2.0, 3.0, 4.0, 10.0, 11.0, 12.0, 13.0, 99.0]
        );
        assert_eq!(
            select_predictors(&s, PredictorSet::Set2),
            vec![5.0, 6.0, 7.0, 8.0, 20.0, 21.0, 22.0, 23.0, 99.0]
        );
        assert_eq!(select_predictors(&s, PredictorSet::Set3).len(), 17);
    }

    #[test]
    fn set3_projection_matches_subsets() {
        let s = sample();
        let all = select_predictors(&s, PredictorSet::Set3);
        for set in [PredictorSet::Set1, PredictorSet::Set2] {
            let projected: Vec<f64> = set
                .members()
                .iter()
                .map(|p| {
                    let pos = PredictorSet::Set3.members().iter().position(|q| q == p).unwrap();
                    all[pos]
                })
                .collect();
            assert_eq!(projected, select_predictors(&s, set));
        }
    }

    #[test]
    fn names_round_trip() {
        for p in ALL_PREDICTORS {
            assert_eq!(Predictor::from_name(p.name()), Some(p));
            assert_eq!(ALL_PREDICTORS[p.canonical_index()], p);
        }
        assert_eq!("2".parse::<PredictorSet>(), Ok(PredictorSet::Set2));
        assert_eq!("predictor set 3".parse::<PredictorSet>(), Ok(PredictorSet::Set3));
        assert!("4".parse::<PredictorSet>().is_err());
    }
}
