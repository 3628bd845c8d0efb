//! Least-squares regression trees with best-first leaf growth.

use serde::{Deserialize, Serialize};

/// Flattened tree node. Node 0 is the root; children reference later slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// A binary regression tree stored as a flat node array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn num_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Index of the leaf node a feature vector routes to. Routing goes left
    /// when `features[feature] < threshold`.
    pub fn leaf_index(&self, features: &[f64]) -> usize {
        let mut node = 0;
        loop {
            match &self.nodes[node] {
                TreeNode::Leaf { .. } => return node,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features[*feature] < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn predict(&self, features: &[f64]) -> f64 {
        match &self.nodes[self.leaf_index(features)] {
            TreeNode::Leaf { value } => *value,
            TreeNode::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }
}

pub(crate) struct TreeParams {
    pub max_leaf_nodes: usize,
    /// Minimum total instance weight on each side of a split (equals the
    /// row count when all weights are 1).
    pub min_leaf_weight: f64,
}

/// Gains below this are treated as no improvement; keeps float noise from
/// splitting constant-target nodes.
const MIN_SPLIT_GAIN: f64 = 1e-12;

#[derive(Clone, Copy)]
struct Split {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct PendingLeaf {
    slot: usize,
    rows: Vec<usize>,
    best: Option<Split>,
}

fn weighted_mean(rows: &[usize], targets: &[f64], weights: &[f64]) -> f64 {
    let mut sw = 0.0;
    let mut swy = 0.0;
    for &r in rows {
        sw += weights[r];
        swy += weights[r] * targets[r];
    }
    swy / sw
}

fn best_split(
    rows: &[usize],
    features: &[Vec<f64>],
    targets: &[f64],
    weights: &[f64],
    feature_ids: &[usize],
    params: &TreeParams,
) -> Option<Split> {
    let mut sw = 0.0;
    let mut swy = 0.0;
    for &r in rows {
        sw += weights[r];
        swy += weights[r] * targets[r];
    }
    let base = swy * swy / sw;

    let mut best: Option<Split> = None;
    let mut column: Vec<(f64, f64, f64)> = Vec::with_capacity(rows.len());
    for &f in feature_ids {
        column.clear();
        column.extend(rows.iter().map(|&r| (features[r][f], targets[r], weights[r])));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut swl = 0.0;
        let mut swyl = 0.0;
        for i in 0..column.len() - 1 {
            swl += column[i].2;
            swyl += column[i].1 * column[i].2;
            let (lo, hi) = (column[i].0, column[i + 1].0);
            if lo == hi {
                continue;
            }
            let threshold = lo + (hi - lo) / 2.0;
            if !(threshold > lo) {
                // Adjacent representable values; no midpoint exists.
                continue;
            }
            let swr = sw - swl;
            if swl < params.min_leaf_weight || swr < params.min_leaf_weight {
                continue;
            }
            let swyr = swy - swyl;
            let gain = swyl * swyl / swl + swyr * swyr / swr - base;
            if gain <= MIN_SPLIT_GAIN {
                continue;
            }
            // Strictly-greater keeps the lowest feature id and lowest
            // threshold on ties (features and thresholds scan ascending).
            if best.map_or(true, |b| gain > b.gain) {
                best = Some(Split {
                    gain,
                    feature: f,
                    threshold,
                });
            }
        }
    }
    best
}

/// Fit a least-squares tree to `targets`, growing leaves best-first until
/// `max_leaf_nodes` is reached or no leaf has a usable split. Leaf values
/// are the weighted mean target of the rows routed there.
pub(crate) fn fit_tree(
    features: &[Vec<f64>],
    targets: &[f64],
    weights: &[f64],
    feature_ids: &[usize],
    params: &TreeParams,
) -> RegressionTree {
    let all_rows: Vec<usize> = (0..targets.len()).collect();
    let mut nodes = vec![TreeNode::Leaf {
        value: weighted_mean(&all_rows, targets, weights),
    }];
    let root_best = best_split(&all_rows, features, targets, weights, feature_ids, params);
    let mut pending = vec![PendingLeaf {
        slot: 0,
        rows: all_rows,
        best: root_best,
    }];
    let mut num_leaves = 1;

    while num_leaves < params.max_leaf_nodes {
        // Highest gain first; earlier-created leaf on ties.
        let chosen = pending
            .iter()
            .enumerate()
            .filter_map(|(i, leaf)| leaf.best.map(|b| (i, b.gain)))
            .fold(None::<(usize, f64)>, |acc, (i, gain)| match acc {
                Some((_, best_gain)) if best_gain >= gain => acc,
                _ => Some((i, gain)),
            });
        let Some((idx, _)) = chosen else { break };
        let leaf = pending.swap_remove(idx);
        let split = leaf.best.expect("chosen leaf has a split");

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = leaf
            .rows
            .iter()
            .partition(|&&r| features[r][split.feature] < split.threshold);

        let left_slot = nodes.len();
        let right_slot = nodes.len() + 1;
        nodes.push(TreeNode::Leaf {
            value: weighted_mean(&left_rows, targets, weights),
        });
        nodes.push(TreeNode::Leaf {
            value: weighted_mean(&right_rows, targets, weights),
        });
        nodes[leaf.slot] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_slot,
            right: right_slot,
        };
        num_leaves += 1;

        for (slot, rows) in [(left_slot, left_rows), (right_slot, right_rows)] {
            let best = best_split(&rows, features, targets, weights, feature_ids, params);
            pending.push(PendingLeaf { slot, rows, best });
        }
    }

    RegressionTree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(max_leaves: usize) -> TreeParams {
        TreeParams {
            max_leaf_nodes: max_leaves,
            min_leaf_weight: 1.0,
        }
    }

    fn column(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn constant_targets_never_split() {
        let features = column(&[1.0, 2.0, 3.0, 4.0]);
        let targets = vec![0.5; 4];
        let weights = vec![1.0; 4];
        let tree = fit_tree(&features, &targets, &weights, &[0], &params(10));
        assert_eq!(tree.num_leaves(), 1);
        assert_eq!(tree.predict(&[2.5]), 0.5);
    }

    #[test]
    fn single_split_partitions_a_step_function() {
        let features = column(&[0.0, 1.0, 2.0, 3.0]);
        let targets = vec![-1.0, -1.0, 1.0, 1.0];
        let weights = vec![1.0; 4];
        let tree = fit_tree(&features, &targets, &weights, &[0], &params(2));
        assert_eq!(tree.num_leaves(), 2);
        assert_eq!(tree.predict(&[0.5]), -1.0);
        assert_eq!(tree.predict(&[2.9]), 1.0);
        // Split lands at the midpoint of the step.
        match tree.nodes[0] {
            TreeNode::Split { threshold, .. } => assert_eq!(threshold, 1.5),
            _ => panic!("root should split"),
        }
    }

    #[test]
    fn min_leaf_weight_blocks_unbalanced_splits() {
        let features = column(&[0.0, 1.0, 2.0, 3.0]);
        let targets = vec![10.0, 0.0, 0.0, 0.0];
        let weights = vec![1.0; 4];
        let tree = fit_tree(&features, &targets, &weights, &[0], &TreeParams {
            max_leaf_nodes: 4,
            min_leaf_weight: 2.0,
        });
        // The only gainful cut isolates row 0; with min weight 2 the next
        // best is the middle cut.
        for node in &tree.nodes {
            if let TreeNode::Split { threshold, .. } = node {
                assert_eq!(*threshold, 1.5);
            }
        }
    }

    #[test]
    fn ties_prefer_the_lowest_feature() {
        // Feature 1 duplicates feature 0; both give identical gains.
        let features: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&v| vec![v, v])
            .collect();
        let targets = vec![-1.0, -1.0, 1.0, 1.0];
        let weights = vec![1.0; 4];
        let tree = fit_tree(&features, &targets, &weights, &[0, 1], &params(2));
        match tree.nodes[0] {
            TreeNode::Split { feature, .. } => assert_eq!(feature, 0),
            _ => panic!("root should split"),
        }
    }

    #[test]
    fn leaf_values_are_weighted_means() {
        let features = column(&[0.0, 1.0, 2.0, 3.0]);
        let targets = vec![1.0, 3.0, 10.0, 20.0];
        let weights = vec![1.0, 3.0, 1.0, 1.0];
        let tree = fit_tree(&features, &targets, &weights, &[0], &params(2));
        // Routed rows agree with stored leaf values.
        for (row, feat) in features.iter().enumerate() {
            let leaf = tree.leaf_index(feat);
            let members: Vec<usize> = features
                .iter()
                .enumerate()
                .filter(|(_, f)| tree.leaf_index(f) == leaf)
                .map(|(i, _)| i)
                .collect();
            let expect = weighted_mean(&members, &targets, &weights);
            match tree.nodes[leaf] {
                TreeNode::Leaf { value } => assert_eq!(value, expect, "row {row}"),
                _ => unreachable!(),
            }
        }
    }
}
