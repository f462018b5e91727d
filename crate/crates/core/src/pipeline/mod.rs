//! File-based stages that chain the corpus, feature, learning, and
//! evaluation modules.

mod config;
mod features_io;
mod stages;

pub use config::{PipelineConfig, DEFAULT_LABEL_QUANTILE};
pub use features_io::{
    read_features, read_manifest, write_features, Exclusion, FeatureManifest, FEATURES_FILE, FEATURES_FORMAT,
    FEATURES_VERSION, MANIFEST_FILE,
};
pub use stages::{
    evaluate, experiment_external, experiment_incremental, experiment_table3, featurize, image_candidates, ingest,
    load_corpus, load_grid, report, text_config, train, FeaturizeSummary, IngestSummary, ReportSummaryRow, SplitRecord,
    TrainSummary, CORPUS_FILE, CORPUS_STATS_FILE, CV_FILE, MODEL_FILE, SPLIT_FILE,
};
