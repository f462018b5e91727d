//! Metrics, reports, and the experiment suite.

mod experiments;
mod metrics;
mod report;

pub use experiments::{
    choose_threshold, evaluate_model, fit_and_evaluate, incremental_experiment, run_table3_suite, split_dataset,
    IncrementalResult, IncrementalRow, Table3Settings, DEFAULT_TEST_FRACTION, DEFAULT_VALIDATION_FRACTION,
    INCREMENTAL_SUBSETS,
};
pub use metrics::{
    auc, best_f1_threshold, classification_metrics, metrics_from_confusion, roc_points, trapezoid_area,
    ClassificationMetrics, Confusion, Metric, RocPoint,
};
pub use report::{
    color_means_table, color_profile_means, emit_report, evaluate_external_scores, importance_table, load_scores,
    read_scores, EvalReport, Fingerprint, ReportFiles, ThresholdPolicy, REPORT_FORMAT, REPORT_VERSION,
};
