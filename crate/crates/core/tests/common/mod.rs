//! Independent reference implementations used by several test targets.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use precip_merge::spatial::{haversine_distance, GridSpec};

/// OLS through the normal equations `(AᵀA)β = Aᵀy`, `A = [1 | X]`.
pub fn ols_normal_equations(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = rows.len();
    let p = rows[0].len();
    let a = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
    let ata = a.transpose() * &a;
    let aty = a.transpose() * DVector::from_column_slice(y);
    let beta = ata.lu().solve(&aty).expect("full-rank oracle instance");
    beta.iter().copied().collect()
}

fn sse(y: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let m = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - m) * (v - m)).sum()
}

/// SSE reduction of the split `x[f] <= t`, recomputed from scratch.
pub fn split_reduction(rows: &[Vec<f64>], y: &[f64], f: usize, t: f64) -> f64 {
    let (mut l, mut r) = (Vec::new(), Vec::new());
    for (row, &v) in rows.iter().zip(y) {
        if row[f] <= t {
            l.push(v)
        } else {
            r.push(v)
        }
    }
    sse(y) - sse(&l) - sse(&r)
}

/// Every (feature, midpoint threshold, reduction) with both children non-empty.
pub fn enumerate_splits(rows: &[Vec<f64>], y: &[f64]) -> Vec<(usize, f64, f64)> {
    let p = rows[0].len();
    let mut out = Vec::new();
    for f in 0..p {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            out.push((f, t, split_reduction(rows, y, f, t)));
        }
    }
    out
}

/// Full scan of all cells, sorted by (distance, flat index).
pub fn brute_nearest(lat: f64, lon: f64, grid: &GridSpec, k: usize) -> Vec<(usize, f64)> {
    let p = precip_merge::GeoPoint::new(lat, lon).unwrap();
    let mut all: Vec<(usize, f64)> = (0..grid.len())
        .map(|i| (i, haversine_distance(p, grid.center(i))))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Average ranks by counting: `1 + #less + (#equal - 1)/2`.
pub fn counting_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&u| u < v).count() as f64;
            let equal = x.iter().filter(|&&u| u == v).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

pub fn spearman_oracle(a: &[f64], b: &[f64]) -> f64 {
    pearson(&counting_ranks(a), &counting_ranks(b))
}

pub fn sorted_median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Relative difference scaled by the larger magnitude (or 1 near zero).
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
