//! Decision trees, balanced random forests, and gradient boosting.

mod boost;
mod config;
mod dataset;
mod forest;
mod model;
mod sample;
mod search;
mod seed;
mod tree;

pub use boost::{binomial_deviance, fit_boost, sigmoid, BoostModel};
pub use config::{
    BoostGrid, BoostParams, ForestGrid, ForestParams, MaxDepth, ModelKind, ModelParams, ParamGrid, TrainConfig,
};
pub use dataset::{LabeledDataset, Matrix};
pub use forest::{fit_forest, ForestModel};
pub use model::{EnsembleModel, ImportanceStatus, Importances, TrainedModel, MODEL_FORMAT, MODEL_VERSION};
pub use sample::{bootstrap_counts, random_undersample, stratified_kfold, stratified_split, ClassWeight};
pub use search::{grid_search_cv, CvRow, GridSearchResult};
pub use seed::{derive_seed, task_rng, Stream};
pub use tree::{fit_prepared, fit_tree, ColumnData, Criterion, DecisionTree, MaxFeatures, Node, TreeParams};
