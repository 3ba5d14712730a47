//! Model files.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! magic        8 bytes  "PMMODEL\0"
//! version      u32      1
//! kind         u8       0 linear, 1 random forest, 2 gbm, 3 xgboost
//! n_features   u32
//! params       kind-specific, see `write_params`
//! body         linear: intercept f64, n_features x f64
//!              trees:  [init f64 (gbm only)] tree_count u32, trees
//! tree         node_count u32, nodes
//! node         tag u8; 0 leaf: value f64
//!                      1 split: feature u32, threshold f64, left u32, right u32, gain f64
//! ```
//!
//! Optional sizes (`mtry`, forest `max_depth`) use `u32::MAX` for "unset".

use std::fmt::Write as _;
use std::io::{Read, Write};

use super::{
    FittedModel, ForestModel, ForestParams, GbmModel, GbmParams, LearnError, LinearModel, Node, RegressionTree,
    XgbModel, XgbParams,
};

pub const MODEL_MAGIC: &[u8; 8] = b"PMMODEL\0";
pub const MODEL_VERSION: u32 = 1;
const UNSET: u32 = u32::MAX;

struct Out(Vec<u8>);

impl Out {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn size(&mut self, v: usize) {
        self.u32(u32::try_from(v).expect("size fits u32"));
    }
    fn opt(&mut self, v: Option<usize>) {
        self.u32(v.map_or(UNSET, |s| u32::try_from(s).expect("size fits u32")));
    }
    fn tree(&mut self, t: &RegressionTree) {
        self.size(t.nodes().len());
        for node in t.nodes() {
            match *node {
                Node::Leaf { value } => {
                    self.u8(0);
                    self.f64(value);
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    gain,
                } => {
                    self.u8(1);
                    self.size(feature);
                    self.f64(threshold);
                    self.size(left);
                    self.size(right);
                    self.f64(gain);
                }
            }
        }
    }
    fn trees(&mut self, trees: &[RegressionTree]) {
        self.size(trees.len());
        for t in trees {
            self.tree(t);
        }
    }
}

pub fn write_model<W: Write>(mut w: W, model: &FittedModel) -> std::io::Result<()> {
    let mut o = Out(Vec::new());
    o.0.extend_from_slice(MODEL_MAGIC);
    o.u32(MODEL_VERSION);
    let kind = match model {
        FittedModel::Linear(_) => 0,
        FittedModel::Forest(_) => 1,
        FittedModel::Gbm(_) => 2,
        FittedModel::Xgb(_) => 3,
    };
    o.u8(kind);
    o.size(model.n_features());
    match model {
        FittedModel::Linear(m) => {
            o.f64(m.intercept);
            for c in &m.coefficients {
                o.f64(*c);
            }
        }
        FittedModel::Forest(m) => {
            let p = &m.params;
            o.size(p.n_trees);
            o.opt(p.mtry);
            o.size(p.min_node);
            o.u8(p.bootstrap as u8);
            o.opt(p.max_depth);
            o.u64(p.seed);
            o.trees(&m.trees);
        }
        FittedModel::Gbm(m) => {
            let p = &m.params;
            o.size(p.n_trees);
            o.size(p.depth);
            o.f64(p.shrinkage);
            o.size(p.min_obs_node);
            o.f64(p.bag_fraction);
            o.u64(p.seed);
            o.f64(m.init);
            o.trees(&m.trees);
        }
        FittedModel::Xgb(m) => {
            let p = &m.params;
            o.size(p.n_rounds);
            o.f64(p.eta);
            o.size(p.max_depth);
            o.f64(p.lambda);
            o.f64(p.gamma);
            o.f64(p.min_child_weight);
            o.f64(p.base_score);
            o.trees(&m.trees);
        }
    }
    w.write_all(&o.0)
}

struct In<R> {
    r: R,
}

impl<R: Read> In<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N], LearnError> {
        let mut b = [0u8; N];
        self.r
            .read_exact(&mut b)
            .map_err(|e| LearnError::Format(format!("truncated model: {e}")))?;
        Ok(b)
    }
    fn u8(&mut self) -> Result<u8, LearnError> {
        Ok(self.bytes::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32, LearnError> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64, LearnError> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn f64(&mut self) -> Result<f64, LearnError> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    fn size(&mut self) -> Result<usize, LearnError> {
        Ok(self.u32()? as usize)
    }
    fn opt(&mut self) -> Result<Option<usize>, LearnError> {
        let v = self.u32()?;
        Ok((v != UNSET).then_some(v as usize))
    }
    fn tree(&mut self, n_features: usize) -> Result<RegressionTree, LearnError> {
        let count = self.size()?;
        let mut nodes = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            nodes.push(match self.u8()? {
                0 => Node::Leaf { value: self.f64()? },
                1 => {
                    let feature = self.size()?;
                    if feature >= n_features {
                        return Err(LearnError::Format(format!(
                            "split on feature {feature} of {n_features}"
                        )));
                    }
                    Node::Split {
                        feature,
                        threshold: self.f64()?,
                        left: self.size()?,
                        right: self.size()?,
                        gain: self.f64()?,
                    }
                }
                tag => return Err(LearnError::Format(format!("unknown node tag {tag}"))),
            });
        }
        RegressionTree::from_nodes(nodes)
    }
    fn trees(&mut self, n_features: usize, expected: usize) -> Result<Vec<RegressionTree>, LearnError> {
        let count = self.size()?;
        if count != expected {
            return Err(LearnError::Format(format!(
                "{count} trees stored, parameters say {expected}"
            )));
        }
        (0..count).map(|_| self.tree(n_features)).collect()
    }
}

pub fn read_model<R: Read>(r: R) -> Result<FittedModel, LearnError> {
    let mut i = In { r };
    if &i.bytes::<8>()? != MODEL_MAGIC {
        return Err(LearnError::Format("bad magic".into()));
    }
    let version = i.u32()?;
    if version != MODEL_VERSION {
        return Err(LearnError::Format(format!("unsupported version {version}")));
    }
    let kind = i.u8()?;
    let n_features = i.size()?;
    let model = match kind {
        0 => {
            let intercept = i.f64()?;
            let coefficients = (0..n_features).map(|_| i.f64()).collect::<Result<_, _>>()?;
            FittedModel::Linear(LinearModel {
                intercept,
                coefficients,
            })
        }
        1 => {
            let params = ForestParams {
                n_trees: i.size()?,
                mtry: i.opt()?,
                min_node: i.size()?,
                bootstrap: i.u8()? != 0,
                max_depth: i.opt()?,
                seed: i.u64()?,
            };
            let trees = i.trees(n_features, params.n_trees)?;
            FittedModel::Forest(ForestModel {
                params,
                n_features,
                trees,
            })
        }
        2 => {
            let params = GbmParams {
                n_trees: i.size()?,
                depth: i.size()?,
                shrinkage: i.f64()?,
                min_obs_node: i.size()?,
                bag_fraction: i.f64()?,
                seed: i.u64()?,
            };
            let init = i.f64()?;
            let trees = i.trees(n_features, params.n_trees)?;
            FittedModel::Gbm(GbmModel {
                params,
                n_features,
                init,
                trees,
            })
        }
        3 => {
            let params = XgbParams {
                n_rounds: i.size()?,
                eta: i.f64()?,
                max_depth: i.size()?,
                lambda: i.f64()?,
                gamma: i.f64()?,
                min_child_weight: i.f64()?,
                base_score: i.f64()?,
            };
            let trees = i.trees(n_features, params.n_rounds)?;
            FittedModel::Xgb(XgbModel {
                params,
                n_features,
                trees,
            })
        }
        k => return Err(LearnError::Format(format!("unknown model kind {k}"))),
    };
    let mut rest = [0u8; 1];
    if i.r.read(&mut rest).map_err(|e| LearnError::Format(e.to_string()))? != 0 {
        return Err(LearnError::Format("trailing bytes".into()));
    }
    Ok(model)
}

fn dump_trees(out: &mut String, trees: &[RegressionTree], names: Option<&[&str]>) {
    for (t, tree) in trees.iter().enumerate() {
        let _ = writeln!(out, "tree {t}");
        for (i, node) in tree.nodes().iter().enumerate() {
            match *node {
                Node::Leaf { value } => {
                    let _ = writeln!(out, "  {i}: leaf {value}");
                }
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    gain,
                } => {
                    let label = names
                        .and_then(|n| n.get(feature))
                        .map_or_else(|| format!("x[{feature}]"), |s| format!("[{s}]"));
                    let _ = writeln!(out, "  {i}: {label} <= {threshold} ? {left} : {right}  gain={gain}");
                }
            }
        }
    }
}

/// Human-readable listing of a model, optionally labelling features.
pub fn dump_text(model: &FittedModel, names: Option<&[&str]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} n_features={}", model.algorithm(), model.n_features());
    match model {
        FittedModel::Linear(m) => {
            let _ = writeln!(out, "intercept {}", m.intercept);
            for (k, c) in m.coefficients.iter().enumerate() {
                let label = names
                    .and_then(|n| n.get(k))
                    .map_or_else(|| format!("x[{k}]"), |s| s.to_string());
                let _ = writeln!(out, "coef {label} {c}");
            }
        }
        FittedModel::Forest(m) => {
            let p = &m.params;
            let _ = writeln!(
                out,
                "params n_trees={} mtry={:?} min_node={} bootstrap={} max_depth={:?} seed={}",
                p.n_trees, p.mtry, p.min_node, p.bootstrap, p.max_depth, p.seed
            );
            dump_trees(&mut out, &m.trees, names);
        }
        FittedModel::Gbm(m) => {
            let p = &m.params;
            let _ = writeln!(
                out,
                "params n_trees={} depth={} shrinkage={} min_obs_node={} bag_fraction={} seed={}",
                p.n_trees, p.depth, p.shrinkage, p.min_obs_node, p.bag_fraction, p.seed
            );
            let _ = writeln!(out, "init {}", m.init);
            dump_trees(&mut out, &m.trees, names);
        }
        FittedModel::Xgb(m) => {
            let p = &m.params;
            let _ = writeln!(
                out,
                "params n_rounds={} eta={} max_depth={} lambda={} gamma={} min_child_weight={} base_score={}",
                p.n_rounds, p.eta, p.max_depth, p.lambda, p.gamma, p.min_child_weight, p.base_score
            );
            dump_trees(&mut out, &m.trees, names);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{fit_gbm, fit_random_forest, fit_xgb, FeatureMatrix};

    fn data() -> (FeatureMatrix, Vec<f64>) {
        let rows: Vec<[f64; 2]> = (0..40).map(|i| [i as f64, ((i * 13) % 7) as f64]).collect();
        let y = rows.iter().map(|r| r[0] * 0.5 + r[1]).collect();
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn round_trip_all_kinds() {
        let (x, y) = data();
        let models = vec![
            FittedModel::Linear(crate::learners::fit_linear(&x, &y).unwrap()),
            FittedModel::Forest(
                fit_random_forest(
                    &x,
                    &y,
                    &ForestParams {
                        n_trees: 3,
                        ..Default::default()
                    },
                )
                .unwrap(),
            ),
            FittedModel::Gbm(
                fit_gbm(
                    &x,
                    &y,
                    &GbmParams {
                        n_trees: 4,
                        ..Default::default()
                    },
                )
                .unwrap(),
            ),
            FittedModel::Xgb(
                fit_xgb(
                    &x,
                    &y,
                    &XgbParams {
                        n_rounds: 2,
                        ..Default::default()
                    },
                )
                .unwrap(),
            ),
        ];
        for m in models {
            let mut buf = Vec::new();
            write_model(&mut buf, &m).unwrap();
            let back = read_model(buf.as_slice()).unwrap();
            assert_eq!(back, m);
            assert!(read_model(&buf[..buf.len() - 1]).is_err());
            let text = dump_text(&m, Some(&["a", "b"]));
            assert!(text.starts_with(&format!("model {} n_features=2", m.algorithm())));
        }
    }

    #[test]
    fn rejects_bad_header() {
        assert!(read_model(&b"NOTAMODEL"[..]).is_err());
        let mut buf = Vec::new();
        write_model(
            &mut buf,
            &FittedModel::Linear(LinearModel {
                intercept: 1.0,
                coefficients: vec![],
            }),
        )
        .unwrap();
        buf[12] = 9;
        assert!(read_model(buf.as_slice()).is_err());
    }
}
