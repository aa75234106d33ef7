//! CART-style binary decision tree over the 10-feature rows, scoring
//! each row with its leaf's positive fraction.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureRow};
use crate::error::{Error, Result};
use crate::survey::Cohort;

/// Split quality measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Criterion::Gini => write!(f, "gini"),
            Criterion::Entropy => write!(f, "entropy"),
        }
    }
}

/// The four stopping/quality hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl TreeParams {
    pub fn new(
        criterion: Criterion,
        max_depth: usize,
        min_samples_leaf: usize,
        min_samples_split: usize,
    ) -> Result<Self> {
        if max_depth < 1 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if min_samples_leaf < 1 {
            return Err(Error::Config("min_samples_leaf must be at least 1".into()));
        }
        if min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be at least 2".into()));
        }
        Ok(TreeParams {
            criterion,
            max_depth,
            min_samples_leaf,
            min_samples_split,
        })
    }
}

/// One node of the fitted tree. Rows route left when
/// `feature value <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        positive_fraction: f64,
        sample_count: usize,
    },
}

/// A fitted tree: node array plus root id, serializable to JSON for
/// audit reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub root: usize,
    pub params: TreeParams,
}

/// Impurity of a two-class count pair.
///
/// gini = `1 - p0^2 - p1^2`; entropy = `-sum p_i log2 p_i` with
/// `0 log 0 = 0`.
pub fn impurity(class_counts: (usize, usize), criterion: Criterion) -> f64 {
    let (neg, pos) = class_counts;
    let n = (neg + pos) as f64;
    assert!(n >= 1.0, "impurity needs at least one sample");
    let p0 = neg as f64 / n;
    let p1 = pos as f64 / n;
    match criterion {
        Criterion::Gini => 1.0 - p0 * p0 - p1 * p1,
        Criterion::Entropy => {
            let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
            term(p0) + term(p1)
        }
    }
}

/// Greedy recursive partitioning.
///
/// At each node the (feature, threshold) pair with the largest impurity
/// decrease wins, candidate thresholds being midpoints between consecutive
/// distinct sorted feature values; ties go to the lowest feature index,
/// then the lowest threshold. Growth stops at `max_depth`, below
/// `min_samples_split`, on a pure node, or when no split leaves both
/// children with `min_samples_leaf` rows.
pub fn fit(train: &Dataset, params: &TreeParams) -> Result<DecisionTree> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut nodes = Vec::new();
    let indices: Vec<usize> = (0..train.len()).collect();
    let root = build(&mut nodes, train, indices, 0, params);
    Ok(DecisionTree {
        nodes,
        root,
        params: *params,
    })
}

fn build(
    nodes: &mut Vec<Node>,
    data: &Dataset,
    indices: Vec<usize>,
    depth: usize,
    params: &TreeParams,
) -> usize {
    let pos = indices
        .iter()
        .filter(|&&i| data.rows[i].is_positive())
        .count();
    let neg = indices.len() - pos;

    let stop = depth >= params.max_depth
        || indices.len() < params.min_samples_split
        || pos == 0
        || neg == 0;
    let split = if stop {
        None
    } else {
        best_split(data, &indices, (neg, pos), params)
    };

    match split {
        None => {
            nodes.push(Node::Leaf {
                positive_fraction: pos as f64 / indices.len() as f64,
                sample_count: indices.len(),
            });
            nodes.len() - 1
        }
        Some((feature, threshold)) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = indices
                .into_iter()
                .partition(|&i| data.rows[i].feature(feature) <= threshold);
            let left = build(nodes, data, left_rows, depth + 1, params);
            let right = build(nodes, data, right_rows, depth + 1, params);
            nodes.push(Node::Split {
                feature,
                threshold,
                left,
                right,
            });
            nodes.len() - 1
        }
    }
}

fn best_split(
    data: &Dataset,
    indices: &[usize],
    counts: (usize, usize),
    params: &TreeParams,
) -> Option<(usize, f64, )> {
    let n = indices.len();
    let parent = impurity(counts, params.criterion);
    let total_pos = counts.1;

    let mut best: Option<(usize, f64)> = None;
    let mut best_gain = f64::NEG_INFINITY;

    for feature in 0..Dataset::FEATURE_NAMES.len() {
        let mut ordered: Vec<(f64, bool)> = indices
            .iter()
            .map(|&i| (data.rows[i].feature(feature), data.rows[i].is_positive()))
            .collect();
        ordered.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_n = 0usize;
        let mut left_pos = 0usize;
        for w in 0..n - 1 {
            left_n += 1;
            if ordered[w].1 {
                left_pos += 1;
            }
            let (value, next) = (ordered[w].0, ordered[w + 1].0);
            if value == next {
                continue;
            }
            let right_n = n - left_n;
            if left_n < params.min_samples_leaf || right_n < params.min_samples_leaf {
                continue;
            }
            let right_pos = total_pos - left_pos;
            let weighted = (left_n as f64
                * impurity((left_n - left_pos, left_pos), params.criterion)
                + right_n as f64 * impurity((right_n - right_pos, right_pos), params.criterion))
                / n as f64;
            let gain = parent - weighted;
            if gain > best_gain {
                best_gain = gain;
                best = Some((feature, (value + next) / 2.0));
            }
        }
    }
    best
}

/// Positive fraction of the leaf this row routes to.
pub fn predict_score(model: &DecisionTree, row: &FeatureRow) -> f64 {
    let mut id = model.root;
    loop {
        match &model.nodes[id] {
            Node::Leaf {
                positive_fraction, ..
            } => return *positive_fraction,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                id = if row.feature(*feature) <= *threshold {
                    *left
                } else {
                    *right
                };
            }
        }
    }
}

/// Thresholded prediction: positive iff the score strictly exceeds
/// `threshold`.
pub fn predict_label(model: &DecisionTree, row: &FeatureRow, threshold: f64) -> Cohort {
    if predict_score(model, row) > threshold {
        Cohort::Pilot
    } else {
        Cohort::NonPilot
    }
}

/// Fraction of rows whose thresholded prediction matches the label.
pub fn accuracy(model: &DecisionTree, data: &Dataset, threshold: f64) -> f64 {
    let correct = data
        .rows
        .iter()
        .filter(|row| predict_label(model, row, threshold) == row.label)
        .count();
    correct as f64 / data.len() as f64
}

impl DecisionTree {
    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, self.root)
    }

    pub fn leaves(&self) -> Vec<(f64, usize)> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf {
                    positive_fraction,
                    sample_count,
                } => Some((*positive_fraction, *sample_count)),
                Node::Split { .. } => None,
            })
            .collect()
    }
}
