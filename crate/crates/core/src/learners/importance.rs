use super::{FittedModel, LearnError, Node};

/// Per-feature share of the total split gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceTable {
    pub fractions: Vec<f64>,
    /// True when the model has no splits; all fractions are then zero.
    pub degenerate: bool,
}

impl ImportanceTable {
    /// Feature indices from most to least important; ties by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.fractions.len()).collect();
        idx.sort_by(|&a, &b| self.fractions[b].total_cmp(&self.fractions[a]).then(a.cmp(&b)));
        idx
    }
}

/// Gain importance: the summed split gain of each feature over all trees,
/// normalized to sum to one.
pub fn gain_importance(model: &FittedModel) -> Result<ImportanceTable, LearnError> {
    if matches!(model, FittedModel::Linear(_)) {
        return Err(LearnError::NotTreeModel);
    }
    let mut totals = vec![0.0; model.n_features()];
    for tree in model.trees() {
        for node in tree.nodes() {
            if let Node::Split { feature, gain, .. } = *node {
                totals[feature] += gain;
            }
        }
    }
    let sum: f64 = totals.iter().sum();
    if sum <= 0.0 {
        return Ok(ImportanceTable {
            fractions: vec![0.0; totals.len()],
            degenerate: true,
        });
    }
    Ok(ImportanceTable {
        fractions: totals.iter().map(|t| t / sum).collect(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{RegressionTree, XgbModel, XgbParams};

    fn xgb_with(trees: Vec<RegressionTree>) -> FittedModel {
        FittedModel::Xgb(XgbModel {
            params: XgbParams::default(),
            n_features: 5,
            trees,
        })
    }

    #[test]
    fn single_split_feature_takes_all() {
        let t = RegressionTree::from_nodes(vec![
            Node::Split {
                feature: 3,
                threshold: 0.0,
                left: 1,
                right: 2,
                gain: 2.5,
            },
            Node::Leaf { value: 0.0 },
            Node::Leaf { value: 1.0 },
        ])
        .unwrap();
        let imp = gain_importance(&xgb_with(vec![t])).unwrap();
        assert_eq!(imp.fractions, vec![0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(!imp.degenerate);
        assert_eq!(imp.ranking()[0], 3);
    }

    #[test]
    fn no_splits_is_degenerate() {
        let imp = gain_importance(&xgb_with(vec![RegressionTree::constant(1.0)])).unwrap();
        assert!(imp.degenerate);
        assert!(imp.fractions.iter().all(|f| *f == 0.0));
    }
}
