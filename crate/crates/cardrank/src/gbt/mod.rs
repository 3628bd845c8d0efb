//! Gradient boosted regression trees with squared loss.
//!
//! The model is an additive ensemble: a constant initial estimate (the
//! weighted target mean) plus shrinkage-scaled trees, each fit by least
//! squares to the residuals left by its predecessors. For squared loss the
//! per-tree line-search weight is 1 with the optimal constants absorbed
//! into the leaf values, so `tree_weights` are all 1.

mod tree;

pub use tree::{RegressionTree, TreeNode};

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-width regression training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    targets: Vec<f64>,
    weights: Vec<f64>,
}

impl Dataset {
    /// Build a dataset with unit instance weights.
    pub fn new(features: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; targets.len()];
        Self::with_weights(features, targets, weights)
    }

    pub fn with_weights(
        features: Vec<Vec<f64>>,
        targets: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if features.len() != targets.len() || features.len() != weights.len() {
            return Err(Error::InvalidConfig(format!(
                "dataset arrays disagree: {} feature rows, {} targets, {} weights",
                features.len(),
                targets.len(),
                weights.len()
            )));
        }
        let width = features.first().map_or(0, Vec::len);
        for row in &features {
            if row.len() != width {
                return Err(Error::InvalidConfig(format!(
                    "feature rows have mixed widths ({} vs {width})",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("feature matrix"));
            }
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("targets"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NonFinite("instance weights"));
        }
        Ok(Dataset {
            features,
            targets,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Merge rows with identical feature vectors into one weighted row whose
    /// target is the weighted mean of the members.
    ///
    /// For least-squares tree fitting this is an exact transformation (up to
    /// the float rounding of the pre-averaged targets): identical rows always
    /// route to the same leaf, so split gains and leaf values are unchanged.
    /// Label streams repeat each (query, card) feature vector once per QPV,
    /// so this typically shrinks training sets by orders of magnitude.
    pub fn compacted(&self) -> Dataset {
        let mut groups: std::collections::BTreeMap<Vec<u64>, (f64, f64)> =
            std::collections::BTreeMap::new();
        for ((row, &y), &w) in self.features.iter().zip(&self.targets).zip(&self.weights) {
            let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
            let entry = groups.entry(key).or_insert((0.0, 0.0));
            entry.0 += w * y;
            entry.1 += w;
        }
        let mut features = Vec::with_capacity(groups.len());
        let mut targets = Vec::with_capacity(groups.len());
        let mut weights = Vec::with_capacity(groups.len());
        for (key, (swy, sw)) in groups {
            if sw == 0.0 {
                continue;
            }
            features.push(key.into_iter().map(f64::from_bits).collect());
            targets.push(swy / sw);
            weights.push(sw);
        }
        Dataset {
            features,
            targets,
            weights,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    pub num_trees: usize,
    /// Leaf-node budget per tree, grown best-first.
    pub max_leaf_nodes: usize,
    pub shrinkage: f64,
    /// Minimum total instance weight per leaf (row count at unit weights).
    pub min_samples_per_leaf: usize,
    /// Fraction of features drawn per tree; 1.0 disables subsampling.
    pub feature_subsample: f64,
    pub seed: u64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig {
            num_trees: 67,
            max_leaf_nodes: 10,
            shrinkage: 0.1,
            min_samples_per_leaf: 20,
            feature_subsample: 1.0,
            seed: 0,
        }
    }
}

impl GbtConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidConfig(what));
        if self.max_leaf_nodes < 2 {
            return bad(format!(
                "max_leaf_nodes must be at least 2, got {}",
                self.max_leaf_nodes
            ));
        }
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return bad(format!("shrinkage must be in (0, 1], got {}", self.shrinkage));
        }
        if self.min_samples_per_leaf < 1 {
            return bad("min_samples_per_leaf must be at least 1".into());
        }
        if !(self.feature_subsample > 0.0 && self.feature_subsample <= 1.0) {
            return bad(format!(
                "feature_subsample must be in (0, 1], got {}",
                self.feature_subsample
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Squared,
}

/// A trained boosted-tree ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub config: GbtConfig,
    pub num_features: usize,
    pub initial_estimate: f64,
    pub shrinkage: f64,
    pub trees: Vec<RegressionTree>,
    pub tree_weights: Vec<f64>,
    pub loss: Loss,
}

/// Fit the ensemble. Deterministic given (data, config): all randomness
/// (feature subsampling) flows from `config.seed`.
pub fn fit_gbt(data: &Dataset, config: &GbtConfig) -> Result<GbtModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("cannot train on an empty dataset"));
    }

    let total_weight: f64 = data.weights.iter().sum();
    if total_weight <= 0.0 {
        return Err(Error::InvalidConfig("total instance weight is zero".into()));
    }
    let initial_estimate = data
        .features
        .iter()
        .zip(&data.targets)
        .zip(&data.weights)
        .map(|((_, &y), &w)| w * y)
        .sum::<f64>()
        / total_weight;

    let mut residuals: Vec<f64> = data.targets.iter().map(|&y| y - initial_estimate).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let num_features = data.num_features();
    let params = tree::TreeParams {
        max_leaf_nodes: config.max_leaf_nodes,
        min_leaf_weight: config.min_samples_per_leaf as f64,
    };

    let mut trees = Vec::with_capacity(config.num_trees);
    let mut tree_weights = Vec::with_capacity(config.num_trees);
    for _ in 0..config.num_trees {
        let feature_ids: Vec<usize> = if config.feature_subsample < 1.0 {
            let m = ((config.feature_subsample * num_features as f64).ceil() as usize)
                .clamp(1, num_features);
            let mut ids = rand::seq::index::sample(&mut rng, num_features, m).into_vec();
            ids.sort_unstable();
            ids
        } else {
            (0..num_features).collect()
        };
        let tree = tree::fit_tree(&data.features, &residuals, &data.weights, &feature_ids, &params);
        for (row, residual) in data.features.iter().zip(residuals.iter_mut()) {
            *residual -= config.shrinkage * tree.predict(row);
        }
        trees.push(tree);
        tree_weights.push(1.0);
    }

    Ok(GbtModel {
        config: *config,
        num_features,
        initial_estimate,
        shrinkage: config.shrinkage,
        trees,
        tree_weights,
        loss: Loss::Squared,
    })
}

impl GbtModel {
    /// Score a feature vector: initial estimate plus the shrinkage-scaled
    /// sum of weighted tree outputs.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.num_features {
            return Err(Error::FeatureWidthMismatch {
                expected: self.num_features,
                found: features.len(),
            });
        }
        let mut score = self.initial_estimate;
        for (tree, beta) in self.trees.iter().zip(&self.tree_weights) {
            score += self.shrinkage * beta * tree.predict(features);
        }
        Ok(score)
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let file = ModelFile {
            version: MODEL_FILE_VERSION,
            model: self.clone(),
        };
        serde_json::to_writer(writer, &file)?;
        Ok(())
    }

    pub fn load<R: Read>(reader: R) -> Result<Self> {
        let file: ModelFile = serde_json::from_reader(reader)?;
        if file.version != MODEL_FILE_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported model file version {} (expected {MODEL_FILE_VERSION})",
                file.version
            )));
        }
        if file.model.trees.len() != file.model.tree_weights.len() {
            return Err(Error::ModelFormat(
                "trees and tree_weights disagree in length".into(),
            ));
        }
        Ok(file.model)
    }
}

const MODEL_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    #[serde(flatten)]
    model: GbtModel,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_squared(n: usize) -> Dataset {
        let features: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![-1.0 + 2.0 * i as f64 / (n - 1) as f64])
            .collect();
        let targets: Vec<f64> = features.iter().map(|row| row[0] * row[0]).collect();
        Dataset::new(features, targets).unwrap()
    }

    fn training_mse(model: &GbtModel, data: &Dataset, num_trees: usize) -> f64 {
        let mut sum = 0.0;
        let mut sw = 0.0;
        for ((row, &y), &w) in data
            .features()
            .iter()
            .zip(data.targets())
            .zip(data.weights())
        {
            let mut pred = model.initial_estimate;
            for (tree, beta) in model.trees.iter().take(num_trees).zip(&model.tree_weights) {
                pred += model.shrinkage * beta * tree.predict(row);
            }
            sum += w * (y - pred) * (y - pred);
            sw += w;
        }
        sum / sw
    }

    #[test]
    fn constant_targets_degenerate_to_the_mean() {
        let features: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        let targets = vec![3.25; 50];
        let data = Dataset::new(features, targets).unwrap();
        let model = fit_gbt(&data, &GbtConfig { min_samples_per_leaf: 1, ..GbtConfig::default() }).unwrap();
        assert!((model.predict(&[1.0, 2.0]).unwrap() - 3.25).abs() < 1e-12);
        for tree in &model.trees {
            assert_eq!(tree.num_leaves(), 1);
            match tree.nodes[0] {
                TreeNode::Leaf { value } => assert!(value.abs() < 1e-12),
                _ => panic!(),
            }
        }
    }

    #[test]
    fn training_loss_is_non_increasing() {
        let data = grid_squared(120);
        let config = GbtConfig { min_samples_per_leaf: 5, seed: 9, ..GbtConfig::default() };
        let model = fit_gbt(&data, &config).unwrap();
        let mut previous = training_mse(&model, &data, 0);
        for k in 1..=model.trees.len() {
            let current = training_mse(&model, &data, k);
            assert!(current <= previous + 1e-12, "tree {k}: {previous} -> {current}");
            previous = current;
        }
    }

    #[test]
    fn squared_fit_reaches_low_mse_on_parabola() {
        let data = grid_squared(200);
        let config = GbtConfig { min_samples_per_leaf: 1, ..GbtConfig::default() };
        let model = fit_gbt(&data, &config).unwrap();
        assert_eq!(model.trees.len(), 67);
        let mse = training_mse(&model, &data, model.trees.len());
        assert!(mse < 1e-3, "final training MSE {mse}");
    }

    #[test]
    fn leaf_values_equal_mean_residuals_stagewise() {
        let data = grid_squared(90);
        let config = GbtConfig { num_trees: 12, min_samples_per_leaf: 3, ..GbtConfig::default() };
        let model = fit_gbt(&data, &config).unwrap();
        let mut residuals: Vec<f64> = data
            .targets()
            .iter()
            .map(|&y| y - model.initial_estimate)
            .collect();
        for tree in &model.trees {
            let mut leaf_members: std::collections::BTreeMap<usize, Vec<usize>> =
                std::collections::BTreeMap::new();
            for (i, row) in data.features().iter().enumerate() {
                leaf_members.entry(tree.leaf_index(row)).or_default().push(i);
            }
            for (leaf, members) in leaf_members {
                let mut swy = 0.0;
                let mut sw = 0.0;
                for &m in &members {
                    swy += data.weights()[m] * residuals[m];
                    sw += data.weights()[m];
                }
                match tree.nodes[leaf] {
                    TreeNode::Leaf { value } => assert_eq!(value, swy / sw),
                    _ => panic!("leaf_index must return leaves"),
                }
            }
            for (i, row) in data.features().iter().enumerate() {
                residuals[i] -= model.shrinkage * tree.predict(row);
            }
        }
    }

    #[test]
    fn full_capacity_single_tree_zeroes_residuals() {
        let data = grid_squared(16);
        let config = GbtConfig {
            num_trees: 1,
            max_leaf_nodes: 16,
            shrinkage: 1.0,
            min_samples_per_leaf: 1,
            ..GbtConfig::default()
        };
        let model = fit_gbt(&data, &config).unwrap();
        // Replay the residual updates the fit performs.
        let mut residuals: Vec<f64> = data
            .targets()
            .iter()
            .map(|&y| y - model.initial_estimate)
            .collect();
        for (i, row) in data.features().iter().enumerate() {
            residuals[i] -= model.shrinkage * model.trees[0].predict(row);
        }
        assert!(residuals.iter().all(|&r| r == 0.0), "{residuals:?}");
    }

    #[test]
    fn fit_is_deterministic_for_a_seed() {
        let data = grid_squared(80);
        let config = GbtConfig {
            feature_subsample: 1.0,
            seed: 1234,
            min_samples_per_leaf: 2,
            ..GbtConfig::default()
        };
        let a = fit_gbt(&data, &config).unwrap();
        let b = fit_gbt(&data, &config).unwrap();
        assert_eq!(a, b);
        let mut ja = Vec::new();
        let mut jb = Vec::new();
        a.save(&mut ja).unwrap();
        b.save(&mut jb).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn zero_trees_predicts_the_initial_estimate() {
        let data = grid_squared(10);
        let config = GbtConfig { num_trees: 0, ..GbtConfig::default() };
        let model = fit_gbt(&data, &config).unwrap();
        assert_eq!(model.predict(&[0.3]).unwrap(), model.initial_estimate);
    }

    #[test]
    fn hand_built_single_stump_routes_and_scales() {
        let json = r#"{
            "version": 1,
            "config": {"num_trees":1,"max_leaf_nodes":10,"shrinkage":0.1,
                       "min_samples_per_leaf":1,"feature_subsample":1.0,"seed":0},
            "num_features": 3,
            "initial_estimate": 0.0,
            "shrinkage": 0.1,
            "trees": [{"nodes": [
                {"kind":"split","feature":0,"threshold":0.5,"left":1,"right":2},
                {"kind":"leaf","value":-1.0},
                {"kind":"leaf","value":1.0}
            ]}],
            "tree_weights": [1.0],
            "loss": "squared"
        }"#;
        let model = GbtModel::load(json.as_bytes()).unwrap();
        assert_eq!(model.predict(&[0.2, 9.0, 9.0]).unwrap(), -0.1);
        assert_eq!(model.predict(&[0.7, 0.0, 0.0]).unwrap(), 0.1);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let data = grid_squared(10);
        let model = fit_gbt(&data, &GbtConfig { num_trees: 2, min_samples_per_leaf: 1, ..GbtConfig::default() }).unwrap();
        assert!(matches!(
            model.predict(&[0.0, 1.0]),
            Err(Error::FeatureWidthMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn non_finite_data_is_rejected_before_training() {
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![0.0]).is_err());
        assert!(Dataset::new(vec![vec![0.0]], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn tiny_leaf_budget_is_rejected() {
        let data = grid_squared(10);
        let config = GbtConfig { max_leaf_nodes: 1, ..GbtConfig::default() };
        assert!(fit_gbt(&data, &config).is_err());
    }

    #[test]
    fn model_file_round_trip_is_bit_exact() {
        let data = grid_squared(64);
        let config = GbtConfig { min_samples_per_leaf: 2, seed: 5, ..GbtConfig::default() };
        let model = fit_gbt(&data, &config).unwrap();
        let mut buf = Vec::new();
        model.save(&mut buf).unwrap();
        let back = GbtModel::load(&buf[..]).unwrap();
        assert_eq!(back, model);
        for i in 0..50 {
            let x = vec![-1.0 + i as f64 * 0.04];
            assert_eq!(model.predict(&x).unwrap(), back.predict(&x).unwrap());
        }
    }

    #[test]
    fn compacted_dataset_produces_the_same_model() {
        // Duplicate feature rows with differing targets: compaction merges
        // them into weighted means and the fitted trees are unchanged.
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for i in 0..30 {
            let x = (i % 10) as f64;
            features.push(vec![x]);
            let jitter = [0.31, -0.17, 0.07][i / 10];
            targets.push(x * 0.5 + jitter);
        }
        let raw = Dataset::new(features, targets).unwrap();
        let compact = raw.compacted();
        assert_eq!(compact.len(), 10);
        let config = GbtConfig { num_trees: 20, min_samples_per_leaf: 3, ..GbtConfig::default() };
        let a = fit_gbt(&raw, &config).unwrap();
        let b = fit_gbt(&compact, &config).unwrap();
        for i in 0..10 {
            let x = vec![i as f64];
            let pa = a.predict(&x).unwrap();
            let pb = b.predict(&x).unwrap();
            assert!((pa - pb).abs() < 1e-12, "{pa} vs {pb}");
        }
    }
}
