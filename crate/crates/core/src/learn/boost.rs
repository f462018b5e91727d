use serde::{Deserialize, Serialize};

use super::config::BoostParams;
use super::dataset::LabeledDataset;
use super::seed::task_rng;
use super::seed::Stream;
use super::tree::{fit_prepared, ColumnData, Criterion, DecisionTree, MaxFeatures, TreeParams};
use crate::error::Result;

pub fn sigmoid(f: f64) -> f64 {
    if f >= 0.0 {
        1.0 / (1.0 + (-f).exp())
    } else {
        let e = f.exp();
        e / (1.0 + e)
    }
}

/// Weighted mean binomial deviance, `-2 * log-likelihood`, computed from raw
/// scores so it stays finite when probabilities saturate.
pub fn binomial_deviance(labels: &[u8], scores: &[f64], weights: &[f64]) -> f64 {
    let (mut total, mut w_sum) = (0.0, 0.0);
    for ((&y, &f), &w) in labels.iter().zip(scores).zip(weights) {
        let margin = if y == 1 { f } else { -f };
        // log(1 + exp(-margin))
        let loss = if margin > 0.0 { (-margin).exp().ln_1p() } else { -margin + margin.exp().ln_1p() };
        total += w * 2.0 * loss;
        w_sum += w;
    }
    total / w_sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub params: BoostParams,
    /// Initial log-odds score.
    pub f0: f64,
    pub trees: Vec<DecisionTree>,
    /// Training deviance before the first stage and after each stage.
    pub train_deviance: Vec<f64>,
}

impl BoostModel {
    pub fn raw_score(&self, row: &[f64]) -> f64 {
        self.f0 + self.params.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        sigmoid(self.raw_score(row))
    }
}

/// Stage-wise boosting on the binomial deviance. Each stage fits a
/// squared-error tree to the residuals `y - p`, then replaces every leaf value
/// with the Newton step `sum(w * r) / sum(w * p * (1 - p))` over its rows.
pub fn fit_boost(data: &LabeledDataset, params: &BoostParams, seed: u64) -> Result<BoostModel> {
    data.require_both_classes()?;
    let n = data.len();
    let class_w = params.class_weight.weights(&data.labels);
    let w: Vec<f64> = data.labels.iter().map(|&y| class_w[usize::from(y)]).collect();
    let y: Vec<f64> = data.labels.iter().map(|&l| f64::from(l)).collect();
    let w_pos: f64 = w.iter().zip(&y).map(|(w, y)| w * y).sum();
    let w_neg: f64 = w.iter().zip(&y).map(|(w, y)| w * (1.0 - y)).sum();
    let f0 = (w_pos / w_neg).ln();

    let rows: Vec<usize> = (0..n).collect();
    let prepared = ColumnData::new(&data.features, &rows);
    let tree_params = TreeParams {
        criterion: Criterion::SquaredError,
        max_depth: params.max_depth.0,
        min_samples_leaf: params.min_samples_leaf,
        min_leaf_weight: 0.0,
        max_features: MaxFeatures::All,
    };
    let mut rng = task_rng(seed, Stream::Tree, 0);
    let mut scores = vec![f0; n];
    let mut train_deviance = vec![binomial_deviance(&data.labels, &scores, &w)];
    let mut trees = Vec::with_capacity(params.n_stages);
    let mut residual = vec![0.0; n];
    let mut leaf_of = vec![0usize; n];
    for _ in 0..params.n_stages {
        for i in 0..n {
            residual[i] = y[i] - sigmoid(scores[i]);
        }
        let mut tree = fit_prepared(&prepared, &residual, &w, &tree_params, &mut rng);
        let mut num = vec![0.0; tree.nodes().len()];
        let mut den = vec![0.0; tree.nodes().len()];
        for i in 0..n {
            let leaf = tree.leaf_index(data.features.row(i));
            let p = sigmoid(scores[i]);
            leaf_of[i] = leaf;
            num[leaf] += w[i] * residual[i];
            den[leaf] += w[i] * p * (1.0 - p);
        }
        let step = |leaf: usize| if den[leaf].abs() < 1e-150 { 0.0 } else { num[leaf] / den[leaf] };
        for leaf in 0..num.len() {
            tree.set_leaf_value(leaf, step(leaf));
        }
        for i in 0..n {
            scores[i] += params.learning_rate * step(leaf_of[i]);
        }
        train_deviance.push(binomial_deviance(&data.labels, &scores, &w));
        trees.push(tree);
    }
    Ok(BoostModel { params: *params, f0, trees, train_deviance })
}
