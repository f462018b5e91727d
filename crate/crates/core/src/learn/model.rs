use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boost::{fit_boost, BoostModel};
use super::config::{ModelKind, ModelParams, TrainConfig};
use super::dataset::{LabeledDataset, Matrix};
use super::forest::{fit_forest, ForestModel};
use super::tree::DecisionTree;
use crate::error::{Error, Result};
use crate::features::{FeatureRegistry, FeatureVector};

pub const MODEL_FORMAT: &str = "memepop-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnsembleModel {
    Forest(ForestModel),
    Boost(BoostModel),
}

impl EnsembleModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            EnsembleModel::Forest(_) => ModelKind::Forest,
            EnsembleModel::Boost(_) => ModelKind::Boost,
        }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        match self {
            EnsembleModel::Forest(m) => &m.trees,
            EnsembleModel::Boost(m) => &m.trees,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            EnsembleModel::Forest(m) => m.predict_row(row),
            EnsembleModel::Boost(m) => m.predict_row(row),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceStatus {
    Ok,
    /// The model never split, so every importance is zero.
    NoSplits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importances {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    pub status: ImportanceStatus,
}

impl Importances {
    /// `(name, value)` pairs, largest first; ties keep registry order.
    pub fn ranked(&self) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> = self.names.iter().cloned().zip(self.values.iter().copied()).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        v
    }
}

/// A fitted ensemble together with the columns it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format: String,
    pub version: u32,
    pub registry: FeatureRegistry,
    pub config: TrainConfig,
    pub model: EnsembleModel,
}

impl TrainedModel {
    pub fn fit(data: &LabeledDataset, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        let model = match &config.model {
            ModelParams::Forest(p) => EnsembleModel::Forest(fit_forest(data, p, config.seed)?),
            ModelParams::Boost(p) => EnsembleModel::Boost(fit_boost(data, p, config.seed)?),
        };
        Ok(TrainedModel {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            registry: data.registry.clone(),
            config: *config,
            model,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    pub fn predict_proba(&self, v: &FeatureVector) -> Result<f64> {
        self.registry.check_names(v.names.iter().map(String::as_str))?;
        Ok(self.model.predict_row(&v.values))
    }

    pub fn predict_matrix(&self, registry: &FeatureRegistry, x: &Matrix) -> Result<Vec<f64>> {
        self.registry.check_names(registry.names())?;
        Ok((0..x.rows()).into_par_iter().map(|i| self.model.predict_row(x.row(i))).collect())
    }

    pub fn predict_dataset(&self, data: &LabeledDataset) -> Result<Vec<f64>> {
        self.predict_matrix(&data.registry, &data.features)
    }

    /// Total impurity decrease per feature across all trees, scaled to sum 1.
    pub fn feature_importances(&self) -> Importances {
        let mut values = vec![0.0; self.registry.len()];
        for t in self.model.trees() {
            for (v, imp) in values.iter_mut().zip(t.importances()) {
                *v += imp.max(0.0);
            }
        }
        let total: f64 = values.iter().sum();
        let status = if total > 0.0 {
            values.iter_mut().for_each(|v| *v /= total);
            ImportanceStatus::Ok
        } else {
            values.iter_mut().for_each(|v| *v = 0.0);
            ImportanceStatus::NoSplits
        };
        Importances { names: self.registry.names().map(String::from).collect(), values, status }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: TrainedModel = serde_json::from_str(text)?;
        if m.format != MODEL_FORMAT {
            return Err(Error::data(format!("not a model file (format `{}`)", m.format)));
        }
        if m.version != MODEL_VERSION {
            return Err(Error::data(format!(
                "model file version {} is not supported (expected {MODEL_VERSION})",
                m.version
            )));
        }
        for t in m.model.trees() {
            t.validate()?;
            if t.n_features() != m.registry.len() {
                return Err(Error::data("model trees disagree with the feature registry"));
            }
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Block;
    use crate::learn::config::{BoostParams, ForestParams, MaxDepth};

    fn data() -> LabeledDataset {
        let rows: Vec<Vec<f64>> =
            (0..50).map(|i| vec![f64::from(i % 10), 3.0, f64::from((i * 7) % 13) / 13.0]).collect();
        let labels: Vec<u8> = (0..50).map(|i| u8::from(i % 10 >= 7)).collect();
        LabeledDataset::new(
            FeatureRegistry::from_names(&["a".into(), "const".into(), "noise".into()], Block::Image).unwrap(),
            (0..50).map(|i| format!("p{i}")).collect(),
            Matrix::from_rows(&rows).unwrap(),
            labels,
        )
        .unwrap()
    }

    fn configs() -> Vec<TrainConfig> {
        vec![
            TrainConfig::new(
                ModelParams::Forest(ForestParams {
                    n_trees: 8,
                    max_depth: MaxDepth(Some(3)),
                    ..ForestParams::default()
                }),
                5,
            ),
            TrainConfig::new(ModelParams::Boost(BoostParams { n_stages: 12, ..BoostParams::default() }), 5),
        ]
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let d = data();
        for c in configs() {
            let m = TrainedModel::fit(&d, &c).unwrap();
            let back = TrainedModel::from_json(&m.to_json().unwrap()).unwrap();
            assert_eq!(back, m);
            let a = m.predict_dataset(&d).unwrap();
            let b = back.predict_dataset(&d).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
            assert!(a.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn importances_normalized_and_constant_column_zero() {
        let d = data();
        for c in configs() {
            let imp = TrainedModel::fit(&d, &c).unwrap().feature_importances();
            assert_eq!(imp.status, ImportanceStatus::Ok);
            assert!((imp.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert_eq!(imp.values[1], 0.0);
        }
    }

    #[test]
    fn perfectly_split_feature_gets_all_importance() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![f64::from(i)]).collect();
        let d = LabeledDataset::new(
            FeatureRegistry::from_names(&["x".into()], Block::Text).unwrap(),
            (0..8).map(|i| i.to_string()).collect(),
            Matrix::from_rows(&rows).unwrap(),
            vec![0, 0, 0, 0, 1, 1, 1, 1],
        )
        .unwrap();
        let imp = TrainedModel::fit(&d, &configs()[0]).unwrap().feature_importances();
        assert_eq!(imp.values, [1.0]);
    }

    #[test]
    fn stumps_report_no_splits() {
        let d = data();
        let c = TrainConfig::new(
            ModelParams::Boost(BoostParams { n_stages: 3, max_depth: MaxDepth(Some(0)), ..BoostParams::default() }),
            0,
        );
        let imp = TrainedModel::fit(&d, &c).unwrap().feature_importances();
        assert_eq!(imp.status, ImportanceStatus::NoSplits);
        assert!(imp.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn registry_mismatch_names_column() {
        let d = data();
        let m = TrainedModel::fit(&d, &configs()[1]).unwrap();
        let v = FeatureVector { names: vec!["a".into(), "oops".into(), "noise".into()], values: vec![0.0; 3] };
        let err = m.predict_proba(&v).unwrap_err();
        assert!(matches!(err, Error::RegistryMismatch { index: 1, .. }), "{err}");
        let ok = FeatureVector { names: vec!["a".into(), "const".into(), "noise".into()], values: vec![9.0, 3.0, 0.1] };
        let p = m.predict_proba(&ok).unwrap();
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn rejects_foreign_files() {
        let d = data();
        let mut m = TrainedModel::fit(&d, &configs()[1]).unwrap();
        m.version = 99;
        assert!(TrainedModel::from_json(&m.to_json().unwrap()).is_err());
        assert!(TrainedModel::from_json("{}").is_err());
    }
}
