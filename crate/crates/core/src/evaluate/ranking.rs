use super::EvalError;

/// Ascending-error ranks starting at 1; tied errors share the mean of the
/// positions they span.
pub fn rank_per_case(errors: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..errors.len()).collect();
    order.sort_by(|&a, &b| errors[a].total_cmp(&errors[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; errors.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && errors[order[end]] == errors[order[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Mean ranks and position frequencies of `k` contenders.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub n_contenders: usize,
    /// Mean over folds of the within-fold mean rank.
    pub mean_rank: Vec<f64>,
    /// `fold_mean_rank[f][c]`: mean rank of contender `c` on fold `f`.
    pub fold_mean_rank: Vec<Vec<f64>>,
    /// `frequency[c][p]`: percent of cases (pooled over folds) in which
    /// contender `c` held position `p + 1`. A tie spanning `m` positions
    /// contributes `1/m` of a case to each of them.
    pub frequency: Vec<Vec<f64>>,
}

fn tie_span(ranks: &[f64], rank: f64) -> Result<(usize, usize), EvalError> {
    let m = ranks.iter().filter(|&&r| r == rank).count();
    let lo = rank - (m as f64 - 1.0) / 2.0;
    let k = ranks.len();
    if lo.fract() != 0.0 || lo < 1.0 || lo as usize + m - 1 > k {
        return Err(EvalError::Ranking(format!(
            "rank {rank} is not a valid position among {k}"
        )));
    }
    Ok((lo as usize - 1, m))
}

/// Two-stage averaging: within each fold over its cases, then across folds.
/// `per_fold[f][case][contender]` are per-case ranks.
pub fn mean_rankings(per_fold: &[Vec<Vec<f64>>]) -> Result<RankTable, EvalError> {
    let k = per_fold
        .iter()
        .flatten()
        .next()
        .map(Vec::len)
        .ok_or_else(|| EvalError::Ranking("no cases".into()))?;
    if k < 2 {
        return Err(EvalError::TooFewContenders(k));
    }
    let mut fold_mean_rank = Vec::with_capacity(per_fold.len());
    let mut mass = vec![vec![0.0; k]; k];
    let mut n_cases = 0usize;
    for (f, cases) in per_fold.iter().enumerate() {
        if cases.is_empty() {
            return Err(EvalError::Ranking(format!("fold {} has no cases", f + 1)));
        }
        let mut sums = vec![0.0; k];
        for ranks in cases {
            if ranks.len() != k {
                return Err(EvalError::Ranking(format!(
                    "case with {} ranks, expected {k}",
                    ranks.len()
                )));
            }
            for (c, &r) in ranks.iter().enumerate() {
                sums[c] += r;
                let (lo, m) = tie_span(ranks, r)?;
                for slot in &mut mass[c][lo..lo + m] {
                    *slot += 1.0 / m as f64;
                }
            }
        }
        n_cases += cases.len();
        fold_mean_rank.push(sums.iter().map(|s| s / cases.len() as f64).collect::<Vec<_>>());
    }
    let mean_rank = (0..k)
        .map(|c| fold_mean_rank.iter().map(|f| f[c]).sum::<f64>() / fold_mean_rank.len() as f64)
        .collect();
    let frequency = mass
        .into_iter()
        .map(|row| row.into_iter().map(|v| 100.0 * v / n_cases as f64).collect())
        .collect();
    Ok(RankTable {
        n_contenders: k,
        mean_rank,
        fold_mean_rank,
        frequency,
    })
}
