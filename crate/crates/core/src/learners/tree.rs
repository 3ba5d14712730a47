//! Binary regression trees and the shared exact greedy builder.
//!
//! The builder keeps, for every feature, the in-sample rows sorted by that
//! feature's value. A node owns the same contiguous range `[lo, hi)` in every
//! list; splitting a node stably partitions each list's range so children
//! again own contiguous, still-sorted ranges. Split candidates are midpoints
//! between consecutive distinct values. Equal gains resolve to the lowest
//! feature index, then the lowest threshold.

use rand::seq::index::sample as sample_indices;
use rand::Rng;

use super::{check_training, FeatureMatrix, LearnError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        gain: f64,
    },
}

/// A binary tree stored in preorder; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Self, LearnError> {
        let tree = Self { nodes };
        tree.validate()?;
        Ok(tree)
    }

    pub fn constant(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_splits(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Split { .. })).count()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.len() - self.n_splits()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Largest feature index used by a split, if any.
    pub fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }

    /// Binary, acyclic, every node reachable exactly once, finite leaves.
    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: String| Err(LearnError::Format(m));
        if self.nodes.is_empty() {
            return bad("tree without nodes".into());
        }
        let mut referenced = vec![false; self.nodes.len()];
        referenced[0] = true;
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Leaf { value } => {
                    if !value.is_finite() {
                        return bad(format!("node {i}: non-finite leaf value"));
                    }
                }
                Node::Split {
                    left, right, threshold, ..
                } => {
                    for child in [left, right] {
                        if child <= i || child >= self.nodes.len() {
                            return bad(format!("node {i}: child {child} breaks preorder"));
                        }
                        if std::mem::replace(&mut referenced[child], true) {
                            return bad(format!("node {child} has two parents"));
                        }
                    }
                    if threshold.is_nan() {
                        return bad(format!("node {i}: NaN threshold"));
                    }
                }
            }
        }
        if let Some(i) = referenced.iter().position(|r| !r) {
            return bad(format!("node {i} is unreachable"));
        }
        Ok(())
    }
}

/// Split scoring shared by all tree learners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SplitRule {
    pub lambda: f64,
    pub gamma: f64,
    /// Multiplier on the score difference (1 for CART, ½ for xgboost).
    pub gain_scale: f64,
    /// Each child must carry at least this much `H`.
    pub min_child_h: f64,
    pub max_depth: Option<usize>,
}

impl SplitRule {
    pub fn cart(max_depth: Option<usize>, min_node: usize) -> Self {
        Self {
            lambda: 0.0,
            gamma: 0.0,
            gain_scale: 1.0,
            min_child_h: min_node as f64,
            max_depth,
        }
    }

    #[inline]
    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.lambda)
    }

    #[inline]
    pub fn gain(&self, gl: f64, hl: f64, gr: f64, hr: f64, g: f64, h: f64) -> f64 {
        self.gain_scale * (self.score(gl, hl) + self.score(gr, hr) - self.score(g, h)) - self.gamma
    }

    fn leaf(&self, g: f64, h: f64) -> f64 {
        g / (h + self.lambda)
    }
}

/// Per-feature row orderings for the whole training set, computed once and
/// reused across trees.
pub(crate) struct Presorted {
    order: Vec<Vec<u32>>,
    values: Vec<Vec<f64>>,
}

/// Row indices and matching feature values of one feature, in sorted order.
struct Column {
    rows: Vec<u32>,
    values: Vec<f64>,
}

impl Presorted {
    pub fn new(x: &FeatureMatrix) -> Self {
        let n = x.n_rows();
        let order: Vec<Vec<u32>> = (0..x.n_cols())
            .map(|f| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| x.get(a as usize, f).total_cmp(&x.get(b as usize, f)).then(a.cmp(&b)));
                idx
            })
            .collect();
        let values = order
            .iter()
            .enumerate()
            .map(|(f, o)| o.iter().map(|&r| x.get(r as usize, f)).collect())
            .collect();
        Self { order, values }
    }

    fn subset(&self, keep: &[bool], features: &[bool]) -> Vec<Column> {
        self.order
            .iter()
            .zip(&self.values)
            .zip(features)
            .map(|((o, v), &used)| {
                let mut col = Column {
                    rows: Vec::new(),
                    values: Vec::new(),
                };
                if used {
                    for (&r, &x) in o.iter().zip(v) {
                        if keep[r as usize] {
                            col.rows.push(r);
                            col.values.push(x);
                        }
                    }
                }
                col
            })
            .collect()
    }
}

/// How candidate features are chosen at each split.
pub(crate) enum FeatureChoice<'r, R: Rng> {
    Fixed(Vec<usize>),
    PerSplit { mtry: usize, rng: &'r mut R },
}

struct Builder<'a, 'r, R: Rng> {
    x: &'a FeatureMatrix,
    g: &'a [f64],
    h: &'a [f64],
    purity: Option<&'a [f64]>,
    rule: SplitRule,
    choice: FeatureChoice<'r, R>,
    lists: Vec<Column>,
    active: Vec<usize>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
    scratch_values: Vec<f64>,
    nodes: Vec<Node>,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
    left_len: usize,
}

impl<R: Rng> Builder<'_, '_, R> {
    fn candidates(&mut self) -> Vec<usize> {
        match &mut self.choice {
            FeatureChoice::Fixed(f) => f.clone(),
            FeatureChoice::PerSplit { mtry, rng } => {
                let mut f = sample_indices(*rng, self.x.n_cols(), *mtry).into_vec();
                f.sort_unstable();
                f
            }
        }
    }

    fn is_pure(&self, rows: &[u32]) -> bool {
        match self.purity {
            Some(t) => {
                let first = t[rows[0] as usize];
                rows.iter().all(|&r| t[r as usize] == first)
            }
            None => false,
        }
    }

    fn best_split(&self, features: &[usize], lo: usize, hi: usize, g_tot: f64, h_tot: f64) -> Option<Best> {
        let mut best: Option<Best> = None;
        for &f in features {
            let rows = &self.lists[f].rows[lo..hi];
            let vals = &self.lists[f].values[lo..hi];
            let (mut gl, mut hl) = (0.0, 0.0);
            for k in 0..rows.len() - 1 {
                let r = rows[k] as usize;
                gl += self.g[r];
                hl += self.h[r];
                let (v, next) = (vals[k], vals[k + 1]);
                if v == next {
                    continue;
                }
                let hr = h_tot - hl;
                if hl < self.rule.min_child_h || hr < self.rule.min_child_h {
                    continue;
                }
                let gain = self.rule.gain(gl, hl, g_tot - gl, hr, g_tot, h_tot);
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mut threshold = v + (next - v) / 2.0;
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(Best {
                        gain,
                        feature: f,
                        threshold,
                        left_len: k + 1,
                    });
                }
            }
        }
        best
    }

    fn partition(&mut self, split_feature: usize, lo: usize, hi: usize, left_len: usize) {
        let mid = lo + left_len;
        for &r in &self.lists[split_feature].rows[lo..mid] {
            self.goes_left[r as usize] = true;
        }
        for &r in &self.lists[split_feature].rows[mid..hi] {
            self.goes_left[r as usize] = false;
        }
        for &f in &self.active {
            if f == split_feature {
                continue;
            }
            let col = &mut self.lists[f];
            self.scratch.clear();
            self.scratch_values.clear();
            let mut w = lo;
            for k in lo..hi {
                let r = col.rows[k];
                let v = col.values[k];
                if self.goes_left[r as usize] {
                    col.rows[w] = r;
                    col.values[w] = v;
                    w += 1;
                } else {
                    self.scratch.push(r);
                    self.scratch_values.push(v);
                }
            }
            debug_assert_eq!(w, mid);
            col.rows[mid..hi].copy_from_slice(&self.scratch);
            col.values[mid..hi].copy_from_slice(&self.scratch_values);
        }
    }

    fn grow(&mut self, lo: usize, hi: usize, depth: usize) -> usize {
        let any = self.active[0];
        let (mut g_tot, mut h_tot) = (0.0, 0.0);
        for &r in &self.lists[any].rows[lo..hi] {
            g_tot += self.g[r as usize];
            h_tot += self.h[r as usize];
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: self.rule.leaf(g_tot, h_tot),
        });

        let depth_ok = self.rule.max_depth.is_none_or(|d| depth < d);
        if !depth_ok || hi - lo < 2 || self.is_pure(&self.lists[any].rows[lo..hi]) {
            return id;
        }
        let features = self.candidates();
        let Some(best) = self.best_split(&features, lo, hi, g_tot, h_tot) else {
            return id;
        };
        if !(best.gain > 0.0) {
            return id;
        }
        self.partition(best.feature, lo, hi, best.left_len);
        let mid = lo + best.left_len;
        let left = self.grow(lo, mid, depth + 1);
        let right = self.grow(mid, hi, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
            gain: best.gain,
        };
        id
    }
}

/// Grow one tree on the rows with `in_sample[r]`, using per-row statistics
/// `g`/`h`. `purity`, when given, stops splitting nodes whose values in it
/// are all equal.
#[allow(clippy::too_many_arguments)]
pub(crate) fn grow_tree<R: Rng>(
    x: &FeatureMatrix,
    presorted: &Presorted,
    in_sample: &[bool],
    g: &[f64],
    h: &[f64],
    purity: Option<&[f64]>,
    rule: SplitRule,
    choice: FeatureChoice<'_, R>,
) -> RegressionTree {
    let p = x.n_cols();
    let active: Vec<usize> = match &choice {
        FeatureChoice::Fixed(f) => f.clone(),
        FeatureChoice::PerSplit { .. } => (0..p).collect(),
    };
    let n_in = in_sample.iter().filter(|k| **k).count();
    if active.is_empty() || n_in == 0 {
        let (gs, hs) = (0..x.n_rows())
            .filter(|&r| in_sample[r])
            .fold((0.0, 0.0), |(a, b), r| (a + g[r], b + h[r]));
        let value = if n_in == 0 { 0.0 } else { rule.leaf(gs, hs) };
        return RegressionTree::constant(value);
    }
    let mut used = vec![false; p];
    for &f in &active {
        used[f] = true;
    }
    let lists = presorted.subset(in_sample, &used);
    let mut b = Builder {
        x,
        g,
        h,
        purity,
        rule,
        choice,
        lists,
        active,
        goes_left: vec![false; x.n_rows()],
        scratch: Vec::with_capacity(n_in),
        scratch_values: Vec::with_capacity(n_in),
        nodes: Vec::new(),
    };
    b.grow(0, n_in, 0);
    RegressionTree { nodes: b.nodes }
}

/// Settings for a single CART regression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_node: usize,
    /// Features eligible for splitting; `None` means all.
    pub candidate_features: Option<Vec<usize>>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_node: 1,
            candidate_features: None,
        }
    }
}

/// Fit a CART regression tree: greedy splits maximizing the reduction in
/// the sum of squared deviations, leaves predicting the node mean.
pub fn fit_tree(x: &FeatureMatrix, y: &[f64], config: &TreeConfig) -> Result<RegressionTree, LearnError> {
    check_training(x, y)?;
    let features = match &config.candidate_features {
        Some(f) => {
            if let Some(&bad) = f.iter().find(|&&c| c >= x.n_cols()) {
                return Err(LearnError::InvalidParams(format!(
                    "candidate feature {bad} out of range"
                )));
            }
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            f
        }
        None => (0..x.n_cols()).collect(),
    };
    let presorted = Presorted::new(x);
    let ones = vec![1.0; y.len()];
    let in_sample = vec![true; y.len()];
    Ok(grow_tree::<rand_chacha::ChaCha8Rng>(
        x,
        &presorted,
        &in_sample,
        y,
        &ones,
        Some(y),
        SplitRule::cart(config.max_depth, config.min_node.max(1)),
        FeatureChoice::Fixed(features),
    ))
}
