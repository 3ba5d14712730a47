use super::{check_training, FeatureMatrix, LearnError, LinearModel};

// A column whose component orthogonal to the preceding columns is below this
// fraction of its own norm is treated as collinear.
const RANK_TOL: f64 = 1e-10;

/// Ordinary least squares with an intercept, solved by Householder QR.
pub fn fit_linear(x: &FeatureMatrix, y: &[f64]) -> Result<LinearModel, LearnError> {
    check_training(x, y)?;
    let (n, p) = (x.n_rows(), x.n_cols());
    if n <= p {
        return Err(LearnError::TooFewSamples { n, p });
    }
    let m = p + 1;

    // Column-major copy of [1 | X].
    let mut a = vec![0.0; n * m];
    a[..n].fill(1.0);
    for (r, row) in x.rows().enumerate() {
        for (c, v) in row.iter().enumerate() {
            a[(c + 1) * n + r] = *v;
        }
    }
    let mut b = y.to_vec();

    let col_norms: Vec<f64> = (0..m).map(|c| norm(&a[c * n..(c + 1) * n])).collect();
    let mut diag = vec![0.0; m];
    let mut collinear = Vec::new();
    let mut v = vec![0.0; n];

    // `row` is the pivot row; it lags `k` once a collinear column is skipped.
    let mut row = 0;
    for k in 0..m {
        let col = &a[k * n..(k + 1) * n];
        let alpha_norm = norm(&col[row..]);
        if col_norms[k] == 0.0 || alpha_norm <= RANK_TOL * col_norms[k] {
            // The intercept column always has norm sqrt(n), so k >= 1.
            collinear.push(k - 1);
            continue;
        }
        let alpha = if col[row] > 0.0 { -alpha_norm } else { alpha_norm };
        v[row..].copy_from_slice(&col[row..]);
        v[row] -= alpha;
        let vnorm2: f64 = v[row..].iter().map(|t| t * t).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            for c in k..m {
                let colc = &mut a[c * n..(c + 1) * n];
                let dot: f64 = v[row..].iter().zip(&colc[row..]).map(|(s, t)| s * t).sum();
                let f = 2.0 * dot / vnorm2;
                for (t, s) in colc[row..].iter_mut().zip(&v[row..]) {
                    *t -= f * s;
                }
            }
            let dot: f64 = v[row..].iter().zip(&b[row..]).map(|(s, t)| s * t).sum();
            let f = 2.0 * dot / vnorm2;
            for (t, s) in b[row..].iter_mut().zip(&v[row..]) {
                *t -= f * s;
            }
        }
        a[k * n + row] = alpha;
        row += 1;
    }
    if !collinear.is_empty() {
        return Err(LearnError::RankDeficient { columns: collinear });
    }

    let mut beta = vec![0.0; m];
    for k in (0..m).rev() {
        let mut s = b[k];
        for c in k + 1..m {
            s -= a[c * n + k] * beta[c];
        }
        beta[k] = s / diag[k];
    }
    Ok(LinearModel {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    })
}

fn norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow on large-magnitude columns.
    let scale = v.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|t| (t / scale).powi(2)).sum::<f64>().sqrt()
}
