mod common;

use proptest::prelude::*;

use common::{counting_ranks, pearson};
use precip_merge::evaluate::{
    average_ranks, make_folds_k, mean_rankings, median_squared_error, rank_per_case, spearman, squared_error,
};
use precip_merge::learners::{fit_gbm, fit_random_forest, fit_xgb, FeatureMatrix, ForestParams, GbmParams, XgbParams};
use precip_merge::spatial::haversine_distance;
use precip_merge::{FittedModel, GeoPoint};

fn dataset(max_rows: usize, p: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (4..max_rows).prop_flat_map(move |n| {
        (
            prop::collection::vec(prop::collection::vec(-10.0..10.0f64, p), n),
            prop::collection::vec(-50.0..50.0f64, n),
        )
    })
}

fn point() -> impl Strategy<Value = GeoPoint> {
    (-90.0..=90.0f64, -180.0..180.0f64).prop_map(|(a, b)| GeoPoint::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_partition_units(n in 2usize..500, k in 2usize..6, seed in any::<u64>()) {
        prop_assume!(n >= k);
        let f = make_folds_k(n, k, seed).unwrap();
        let sizes = f.sizes();
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all: Vec<usize> = (1..=k as u8).flat_map(|j| f.members(j)).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(make_folds_k(n, k, seed).unwrap(), f);
    }

    #[test]
    fn ranks_conserve_total(e in prop::collection::vec(prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 7.5]), 1..16)) {
        let r = rank_per_case(&e);
        let m = e.len() as f64;
        prop_assert_eq!(r.iter().sum::<f64>(), m * (m + 1.0) / 2.0);
        prop_assert_eq!(r, counting_ranks(&e));
    }

    #[test]
    fn ranks_invariant_under_positive_scaling(e in prop::collection::vec(0.0..100.0f64, 2..12), s in 0.01..100.0f64) {
        let scaled: Vec<f64> = e.iter().map(|v| v * s).collect();
        // Scaling may merge near-equal errors, so compare orderings only when
        // the scaled values keep the same strict order.
        let order = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
            idx
        };
        prop_assume!(order(&e) == order(&scaled));
        prop_assert_eq!(rank_per_case(&e), rank_per_case(&scaled));
    }

    #[test]
    fn frequency_rows_sum_to_100(cases in prop::collection::vec(prop::collection::vec(0u8..4, 4), 1..40)) {
        let ranks: Vec<Vec<f64>> = cases
            .iter()
            .map(|c| rank_per_case(&c.iter().map(|&v| v as f64).collect::<Vec<_>>()))
            .collect();
        let table = mean_rankings(&[ranks.clone(), ranks]).unwrap();
        for row in &table.frequency {
            prop_assert!((row.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        }
        for col in 0..4 {
            let total: f64 = table.frequency.iter().map(|r| r[col]).sum();
            prop_assert!((total - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn spearman_invariant_under_monotone_maps(
        a in prop::collection::vec(-20.0..20.0f64, 3..60),
        seed in 0u64..1000,
    ) {
        let b: Vec<f64> = a.iter().enumerate().map(|(i, v)| v + ((i as u64 * 7 + seed) % 11) as f64).collect();
        let a2: Vec<f64> = a.iter().map(|v| v.exp()).collect();
        let b2: Vec<f64> = b.iter().map(|v| v * v * v + 3.0).collect();
        let r1 = spearman(&a, &b).unwrap();
        let r2 = spearman(&a2, &b2).unwrap();
        match (r1, r2) {
            (Some(x), Some(y)) => {
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!((x - pearson(&average_ranks(&a), &average_ranks(&b))).abs() < 1e-12);
            }
            (None, None) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn squared_error_symmetric(a in -1e3..1e3f64, b in -1e3..1e3f64) {
        prop_assert_eq!(squared_error(a, b), squared_error(b, a));
        prop_assert!(squared_error(a, b) >= 0.0);
    }

    #[test]
    fn median_within_range(v in prop::collection::vec(0.0..1e4f64, 1..50)) {
        let m = median_squared_error(&v).unwrap();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
    }

    #[test]
    fn haversine_symmetric_and_bounded(a in point(), b in point()) {
        let d = haversine_distance(a, b);
        prop_assert_eq!(d, haversine_distance(b, a));
        prop_assert!((0.0..=std::f64::consts::PI * 6371.0088 + 1e-9).contains(&d));
        prop_assert_eq!(haversine_distance(a, a), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forest_predictions_within_target_range((rows, y) in dataset(60, 3), seed in any::<u64>()) {
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let m = fit_random_forest(&x, &y, &ForestParams { n_trees: 15, seed, ..Default::default() }).unwrap();
        let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for r in &rows {
            let p = m.predict_row(r);
            prop_assert!(lo - 1e-9 <= p && p <= hi + 1e-9);
        }
    }

    #[test]
    fn batch_prediction_matches_scalar((rows, y) in dataset(50, 2)) {
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let models = [
            FittedModel::Forest(fit_random_forest(&x, &y, &ForestParams { n_trees: 5, ..Default::default() }).unwrap()),
            FittedModel::Gbm(fit_gbm(&x, &y, &GbmParams { n_trees: 10, bag_fraction: 1.0, min_obs_node: 1, ..Default::default() }).unwrap()),
            FittedModel::Xgb(fit_xgb(&x, &y, &XgbParams { n_rounds: 10, ..Default::default() }).unwrap()),
        ];
        for m in &models {
            let batch = m.predict_batch(&x).unwrap();
            for (r, b) in rows.iter().zip(&batch) {
                prop_assert_eq!(m.predict(r).unwrap().to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn fits_deterministic_per_seed((rows, y) in dataset(50, 3), seed in any::<u64>()) {
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let fp = ForestParams { n_trees: 5, seed, ..Default::default() };
        prop_assert_eq!(fit_random_forest(&x, &y, &fp).unwrap(), fit_random_forest(&x, &y, &fp).unwrap());
        let gp = GbmParams { n_trees: 20, seed, min_obs_node: 1, ..Default::default() };
        prop_assert_eq!(fit_gbm(&x, &y, &gp).unwrap(), fit_gbm(&x, &y, &gp).unwrap());
    }
}
