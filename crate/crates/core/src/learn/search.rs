use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ModelParams, TrainConfig};
use super::dataset::LabeledDataset;
use super::model::TrainedModel;
use super::sample::stratified_kfold;
use super::seed::{task_rng, Stream};
use crate::error::{Error, Result};
use crate::eval::auc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub params: ModelParams,
    /// Validation AUC per fold; `None` marks a skipped single-class fold.
    pub fold_auc: Vec<Option<f64>>,
    pub mean_auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: ModelParams,
    pub best_auc: f64,
    pub table: Vec<CvRow>,
}

/// Stratified k-fold search over `grid`, scored by mean validation AUC. The
/// first grid point wins ties. Folds whose training or validation side holds
/// a single class are skipped; a point with every fold skipped is excluded.
pub fn grid_search_cv(data: &LabeledDataset, grid: &[ModelParams], k: usize, seed: u64) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(Error::config("hyperparameter grid is empty"));
    }
    for p in grid {
        p.validate()?;
    }
    let folds = stratified_kfold(&data.labels, k, &mut task_rng(seed, Stream::Folds, 0))?;
    let splits: Vec<Option<(LabeledDataset, LabeledDataset)>> = folds
        .iter()
        .enumerate()
        .map(|(f, valid)| {
            let train: Vec<usize> =
                folds.iter().enumerate().filter(|(g, _)| *g != f).flat_map(|(_, v)| v.iter().copied()).collect();
            let (tr, va) = (data.subset(&train), data.subset(valid));
            if tr.require_both_classes().is_err() || va.require_both_classes().is_err() {
                log::warn!("cross-validation fold {f} holds a single class and is skipped");
                None
            } else {
                Some((tr, va))
            }
        })
        .collect();

    let table = grid
        .par_iter()
        .map(|params| {
            let config = TrainConfig { model: *params, seed, cv_folds: k };
            let fold_auc = splits
                .iter()
                .map(|s| match s {
                    None => Ok(None),
                    Some((tr, va)) => {
                        let m = TrainedModel::fit(tr, &config)?;
                        Ok(Some(auc(&m.predict_dataset(va)?, &va.labels)?))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let scored: Vec<f64> = fold_auc.iter().flatten().copied().collect();
            let mean_auc = (!scored.is_empty()).then(|| scored.iter().sum::<f64>() / scored.len() as f64);
            Ok(CvRow { params: *params, fold_auc, mean_auc })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(usize, f64)> = None;
    for (i, row) in table.iter().enumerate() {
        if let Some(a) = row.mean_auc {
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((i, a));
            }
        }
    }
    let (i, best_auc) = best.ok_or_else(|| Error::data("every cross-validation fold was skipped"))?;
    Ok(GridSearchResult { best: table[i].params, best_auc, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Block, FeatureRegistry};
    use crate::learn::config::{ForestParams, MaxDepth};
    use crate::learn::dataset::Matrix;
    use crate::learn::MaxFeatures;

    fn data() -> LabeledDataset {
        let rows: Vec<Vec<f64>> = (0..80u32).map(|i| vec![f64::from(i % 2), f64::from((i * 37) % 17)]).collect();
        let labels: Vec<u8> = (0..80).map(|i| (i % 2) as u8).collect();
        LabeledDataset::new(
            FeatureRegistry::from_names(&["signal".into(), "noise".into()], Block::Text).unwrap(),
            (0..80).map(|i| i.to_string()).collect(),
            Matrix::from_rows(&rows).unwrap(),
            labels,
        )
        .unwrap()
    }

    fn forest(depth: usize) -> ModelParams {
        ModelParams::Forest(ForestParams {
            n_trees: 5,
            max_depth: MaxDepth(Some(depth)),
            max_features: MaxFeatures::All,
            ..ForestParams::default()
        })
    }

    #[test]
    fn singleton_grid() {
        let r = grid_search_cv(&data(), &[forest(2)], 5, 0).unwrap();
        assert_eq!(r.best, forest(2));
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.table[0].fold_auc.len(), 5);
    }

    #[test]
    fn separable_beats_stump() {
        let r = grid_search_cv(&data(), &[forest(0), forest(1)], 4, 1).unwrap();
        assert_eq!(r.best, forest(1));
        assert_eq!(r.best_auc, 1.0);
        for f in 0..4 {
            assert!(r.table[1].fold_auc[f] > r.table[0].fold_auc[f]);
        }
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(grid_search_cv(&data(), &[], 5, 0).is_err());
    }
}
