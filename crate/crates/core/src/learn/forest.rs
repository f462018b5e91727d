use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ForestParams;
use super::dataset::LabeledDataset;
use super::sample::{bootstrap_counts, random_undersample};
use super::seed::{derive_seed, Stream};
use super::tree::{fit_prepared, ColumnData, Criterion, DecisionTree, TreeParams};
use crate::error::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<DecisionTree>,
}

impl ForestModel {
    /// Mean of the trees' leaf probabilities.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        (sum / self.trees.len() as f64).clamp(0.0, 1.0)
    }
}

/// Balanced random forest: every tree sees its own class-ratio undersample
/// of the data, bootstrapped, with per-node feature subsampling.
pub fn fit_forest(data: &LabeledDataset, params: &ForestParams, seed: u64) -> Result<ForestModel> {
    data.require_both_classes()?;
    let tree_params = TreeParams {
        criterion: Criterion::Gini,
        max_depth: params.max_depth.0,
        min_samples_leaf: params.min_samples_leaf,
        min_leaf_weight: 0.0,
        max_features: params.max_features,
    };
    let tree_seeds: Vec<u64> = (0..params.n_trees as u64).map(|t| derive_seed(seed, Stream::Tree, t)).collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let sample = random_undersample(&data.labels, params.sampling_strategy, &mut rng)?;
            let sub_labels: Vec<u8> = sample.iter().map(|&i| data.labels[i]).collect();
            let class_w = params.class_weight.weights(&sub_labels);
            let counts =
                if params.bootstrap { bootstrap_counts(sample.len(), &mut rng) } else { vec![1; sample.len()] };
            let (mut rows, mut y, mut w) = (Vec::new(), Vec::new(), Vec::new());
            for (k, &i) in sample.iter().enumerate() {
                if counts[k] > 0 {
                    rows.push(i);
                    y.push(f64::from(data.labels[i]));
                    w.push(f64::from(counts[k]) * class_w[usize::from(data.labels[i])]);
                }
            }
            let prepared = ColumnData::new(&data.features, &rows);
            Ok(fit_prepared(&prepared, &y, &w, &tree_params, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel { params: *params, tree_seeds, trees })
}
