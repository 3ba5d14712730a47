use super::EvalError;

/// 1-based ranks with ties averaged.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    super::rank_per_case(values)
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation; `None` when either variable is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<Option<f64>, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::Ranking(format!(
            "lengths {} and {} differ",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(EvalError::TooFewSamples(a.len()));
    }
    Ok(pearson(&average_ranks(a), &average_ranks(b)))
}

/// Symmetric matrix of pairwise Spearman correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major; `None` marks an undefined (zero-variance) entry.
    pub values: Vec<Option<f64>>,
}

impl CorrelationMatrix {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.names.len() + j]
    }
}

/// `columns[v]` holds the samples of variable `v`.
pub fn spearman_matrix<S: AsRef<str>>(names: &[S], columns: &[Vec<f64>]) -> Result<CorrelationMatrix, EvalError> {
    if names.len() != columns.len() {
        return Err(EvalError::Ranking(format!(
            "{} names for {} variables",
            names.len(),
            columns.len()
        )));
    }
    let n = columns.first().map_or(0, Vec::len);
    if n < 2 {
        return Err(EvalError::TooFewSamples(n));
    }
    if let Some(c) = columns.iter().position(|c| c.len() != n) {
        return Err(EvalError::Ranking(format!(
            "variable {} has {} samples, expected {n}",
            c,
            columns[c].len()
        )));
    }
    if columns.iter().flatten().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("correlation input".into()));
    }
    let ranks: Vec<Vec<f64>> = columns.iter().map(|c| average_ranks(c)).collect();
    let m = columns.len();
    let mut values = vec![None; m * m];
    for i in 0..m {
        for j in i..m {
            let r = if i == j {
                pearson(&ranks[i], &ranks[i]).map(|_| 1.0)
            } else {
                pearson(&ranks[i], &ranks[j])
            };
            values[i * m + j] = r;
            values[j * m + i] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_pairs() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let up = spearman(&a, &[10.0, 20.0, 25.0, 100.0]).unwrap().unwrap();
        let down = spearman(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap().unwrap();
        assert!((up - 1.0).abs() < 1e-12 && (down + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_variable_is_undefined() {
        let m = spearman_matrix(&["a", "b"], &[vec![1.0, 2.0, 3.0], vec![5.0; 3]]).unwrap();
        assert_eq!(m.get(0, 0), Some(1.0));
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(1, 1), None);
    }
}
