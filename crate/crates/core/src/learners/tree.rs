//! Multi-objective decision trees: one tree for all labels, split on the
//! label-averaged Gini impurity, leaves hold per-label relevance proportions.

use serde::{Deserialize, Serialize};

use super::LearnerConfig;
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::labels::MarginalVector;

// Gains at or below this are rounding noise, not an impurity reduction.
const MIN_GAIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    /// Instances with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        marginals: MarginalVector,
        support: usize,
    },
}

impl TreeNode {
    /// The leaf reached by `x`, as `(marginals, support)`.
    pub fn route(&self, x: &[f64]) -> (&MarginalVector, usize) {
        let mut node = self;
        loop {
            match node {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
                TreeNode::Leaf { marginals, support } => return (marginals, *support),
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<MarginalVector> {
        if let Some(max) = self.max_feature() {
            if x.len() <= max {
                return Err(Error::DimensionMismatch {
                    expected: max + 1,
                    actual: x.len(),
                });
            }
        }
        Ok(self.route(x).0.clone())
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Split { feature, left, right, .. } => {
                Some((*feature).max(left.max_feature().unwrap_or(0)).max(right.max_feature().unwrap_or(0)))
            }
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn leaves(&self) -> Vec<(&MarginalVector, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                TreeNode::Split { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
                TreeNode::Leaf { marginals, support } => out.push((marginals, *support)),
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
            TreeNode::Leaf { .. } => 0,
        }
    }
}

struct Builder<'a> {
    data: &'a Dataset,
    config: &'a LearnerConfig,
    num_labels: usize,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Sum over labels of `2 c (n - c) / n`, i.e. `n * K` times the label-averaged Gini.
fn weighted_impurity(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    counts.iter().map(|&c| 2.0 * c as f64 * (n - c) as f64 / nf).sum()
}

impl Builder<'_> {
    fn label_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.num_labels];
        for &i in rows {
            for (k, c) in counts.iter_mut().enumerate() {
                *c += usize::from(self.data.labels()[i].get(k));
            }
        }
        counts
    }

    fn leaf(&self, rows: &[usize], counts: &[usize]) -> TreeNode {
        let n = rows.len() as f64;
        let probs = counts
            .iter()
            .map(|&c| {
                if self.config.leaf_smoothing {
                    (c as f64 + 1.0) / (n + 2.0)
                } else {
                    c as f64 / n
                }
            })
            .collect();
        TreeNode::Leaf {
            marginals: MarginalVector::new(probs).expect("proportions lie in [0, 1]"),
            support: rows.len(),
        }
    }

    fn best_split(&self, rows: &[usize], counts: &[usize]) -> Option<BestSplit> {
        let x = self.data.features();
        let n = rows.len();
        let min_leaf = self.config.tree_min_leaf;
        let parent = weighted_impurity(counts, n);
        let mut best: Option<BestSplit> = None;
        let mut order = rows.to_vec();
        let mut left = vec![0usize; self.num_labels];
        for feature in 0..x.ncols() {
            order.sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]));
            left.iter_mut().for_each(|c| *c = 0);
            for pos in 1..n {
                let prev = order[pos - 1];
                for (k, c) in left.iter_mut().enumerate() {
                    *c += usize::from(self.data.labels()[prev].get(k));
                }
                let (lo, hi) = (x[[prev, feature]], x[[order[pos], feature]]);
                if lo == hi || pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let right: Vec<usize> = counts.iter().zip(&left).map(|(t, l)| t - l).collect();
                let children = weighted_impurity(&left, pos) + weighted_impurity(&right, n - pos);
                let gain = (parent - children) / (n * self.num_labels) as f64;
                if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mid = lo + (hi - lo) / 2.0;
                    // Adjacent floats can round the midpoint up onto `hi`.
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(BestSplit { feature, threshold, gain });
                }
            }
        }
        best
    }

    fn build(&self, rows: Vec<usize>, depth: usize) -> TreeNode {
        let counts = self.label_counts(&rows);
        let depth_reached = self.config.tree_max_depth.is_some_and(|max| depth >= max);
        if rows.len() < 2 * self.config.tree_min_leaf || depth_reached {
            return self.leaf(&rows, &counts);
        }
        let Some(split) = self.best_split(&rows, &counts) else {
            return self.leaf(&rows, &counts);
        };
        let x = self.data.features();
        let (left, right): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&i| x[[i, split.feature]] <= split.threshold);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.build(left, depth + 1)),
            right: Box::new(self.build(right, depth + 1)),
        }
    }
}

/// Grows one tree greedily on all rows of `data`.
pub fn train_modt(data: &Dataset, config: &LearnerConfig) -> Result<TreeNode> {
    config.validate()?;
    if data.has_missing() {
        return Err(Error::invalid("tree training features contain missing values"));
    }
    let builder = Builder {
        data,
        config,
        num_labels: data.num_labels(),
    };
    Ok(builder.build((0..data.num_instances()).collect(), 0))
}
