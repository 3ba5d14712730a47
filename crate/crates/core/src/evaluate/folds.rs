use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

/// What the folds partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitUnit {
    #[default]
    Station,
    Sample,
}

impl FromStr for SplitUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "station" => Ok(SplitUnit::Station),
            "sample" => Ok(SplitUnit::Sample),
            _ => Err(format!("unknown split unit {s:?}")),
        }
    }
}

/// Fold ids (1-based) per unit, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub folds: Vec<u8>,
    pub n_folds: usize,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn fold_of(&self, unit: usize) -> u8 {
        self.folds[unit]
    }

    /// Unit indices in fold `fold`.
    pub fn members(&self, fold: u8) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        (1..=self.n_folds as u8)
            .map(|f| self.folds.iter().filter(|&&x| x == f).count())
            .collect()
    }
}

/// Seeded shuffle, then deal positions round-robin into `k` folds.
pub fn make_folds_k(n_units: usize, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 || k > u8::MAX as usize || n_units < k {
        return Err(EvalError::TooFewUnits {
            needed: k.max(2),
            folds: k,
            got: n_units,
        });
    }
    let mut order: Vec<usize> = (0..n_units).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![0u8; n_units];
    for (pos, &unit) in order.iter().enumerate() {
        folds[unit] = (pos % k) as u8 + 1;
    }
    Ok(FoldAssignment {
        folds,
        n_folds: k,
        seed,
    })
}

/// Random halving of the station list.
pub fn make_folds<S: AsRef<str>>(station_ids: &[S], seed: u64) -> Result<FoldAssignment, EvalError> {
    make_folds_k(station_ids.len(), 2, seed)
}

pub fn make_sample_folds(n_samples: usize, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    make_folds_k(n_samples, k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_stations_split_evenly() {
        let f = make_folds(&["a", "b", "c", "d"], 3).unwrap();
        assert_eq!(f.sizes(), vec![2, 2]);
        let mut all = f.members(1);
        all.extend(f.members(2));
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert_eq!(f, make_folds(&["a", "b", "c", "d"], 3).unwrap());
    }

    #[test]
    fn one_station_is_rejected() {
        assert!(make_folds(&["a"], 0).is_err());
        assert!(make_folds::<&str>(&[], 0).is_err());
    }
}
