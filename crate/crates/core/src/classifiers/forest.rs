use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_binary, check_finite, check_width};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::rng::{derived_rng, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RfConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Defaults to `ceil(sqrt(width))` when unset.
    pub features_per_split: Option<usize>,
}

impl Default for RfConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 10,
            features_per_split: None,
        }
    }
}

/// Tree node in preorder; a split's left child is the next node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        right: usize,
    },
    Leaf {
        probability: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    /// Bootstrap multiplicity of every training row.
    #[serde(skip)]
    pub in_bag: Vec<u32>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { probability } => return probability,
                Node::Split {
                    feature,
                    threshold,
                    right,
                } => i = if row[feature] <= threshold { i + 1 } else { right },
            }
        }
    }

    pub fn out_of_bag(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_bag
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == 0).then_some(i))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { right, .. } => 1 + walk(nodes, i + 1).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfModel {
    pub trees: Vec<Tree>,
    pub n_trees: usize,
    pub max_depth: usize,
    pub features_per_split: usize,
    pub rng_seed: u64,
    pub width: usize,
}

fn gini(pos: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a FeatureMatrix,
    y: &'a [u8],
    max_depth: usize,
    mtry: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    /// Best Gini split over the sampled features; ties resolve to the lowest
    /// feature index, then the lowest threshold.
    fn best_split(&self, idx: &[usize], features: &[usize]) -> Option<(usize, f64)> {
        let n = idx.len() as f64;
        let total_pos = idx.iter().filter(|&&i| self.y[i] == 1).count() as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut vals: Vec<(f64, u8)> = Vec::with_capacity(idx.len());
        for &f in features {
            vals.clear();
            vals.extend(idx.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0.0;
            for k in 0..vals.len() - 1 {
                left_pos += f64::from(vals[k].1);
                let (a, b) = (vals[k].0, vals[k + 1].0);
                if a == b {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = n - nl;
                let imp = (nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr)) / n;
                let mut thr = 0.5 * (a + b);
                if thr >= b {
                    thr = a;
                }
                if best.is_none_or(|(bi, _, _)| imp < bi - 1e-12) {
                    best = Some((imp, f, thr));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut Rng) {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let leaf = Node::Leaf {
            probability: pos as f64 / idx.len() as f64,
        };
        if depth >= self.max_depth || pos == 0 || pos == idx.len() || idx.len() < 2 {
            self.nodes.push(leaf);
            return;
        }
        let mut features = sample(rng, self.x.n_cols(), self.mtry).into_vec();
        features.sort_unstable();
        let Some((feature, threshold)) = self.best_split(&idx, &features) else {
            self.nodes.push(leaf);
            return;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.into_iter().partition(|&i| self.x.get(i, feature) <= threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Split {
            feature,
            threshold,
            right: 0,
        });
        self.grow(left, depth + 1, rng);
        let right_at = self.nodes.len();
        if let Node::Split { right, .. } = &mut self.nodes[at] {
            *right = right_at;
        }
        self.grow(right, depth + 1, rng);
    }
}

/// Bagged Gini trees. Tree `t` draws its bootstrap and feature subsets from
/// its own stream derived from `(seed, t)`.
pub fn rf_fit(x: &FeatureMatrix, labels: &[u8], cfg: &RfConfig, seed: u64) -> Result<RfModel> {
    check_binary(labels, x.n_rows())?;
    check_finite(x)?;
    if cfg.n_trees == 0 {
        return Err(Error::Config("rf: n_trees must be >= 1".into()));
    }
    let width = x.n_cols();
    if width == 0 {
        return Err(Error::InvalidArgument("random forest needs at least one feature".into()));
    }
    let mtry = cfg
        .features_per_split
        .unwrap_or_else(|| (width as f64).sqrt().ceil() as usize)
        .clamp(1, width);
    let n = x.n_rows();
    let trees = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(seed, "rf-tree", t as u64);
            let mut in_bag = vec![0u32; n];
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            for &i in &idx {
                in_bag[i] += 1;
            }
            let mut b = Builder {
                x,
                y: labels,
                max_depth: cfg.max_depth,
                mtry,
                nodes: Vec::new(),
            };
            b.grow(idx, 0, &mut rng);
            Tree {
                nodes: b.nodes,
                in_bag,
            }
        })
        .collect();
    Ok(RfModel {
        trees,
        n_trees: cfg.n_trees,
        max_depth: cfg.max_depth,
        features_per_split: mtry,
        rng_seed: seed,
        width,
    })
}

/// Mean leaf probability over the trees.
pub fn rf_predict_proba(model: &RfModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    check_width(x, model.width)?;
    let n = model.trees.len() as f64;
    Ok(x
        .rows()
        .map(|r| model.trees.iter().map(|t| t.predict(r)).sum::<f64>() / n)
        .collect())
}
