use serde::{Deserialize, Serialize};

use super::metrics::best_f1_threshold;
use super::report::{EvalReport, Fingerprint, ThresholdPolicy};
use crate::error::Result;
use crate::features::Block;
use crate::learn::{
    random_undersample, stratified_split, task_rng, ForestParams, LabeledDataset, ModelParams, Stream, TrainConfig,
    TrainedModel,
};

pub const DEFAULT_TEST_FRACTION: f64 = 0.33;
pub const DEFAULT_VALIDATION_FRACTION: f64 = 0.2;

/// Seeded stratified train/test partition.
pub fn split_dataset(data: &LabeledDataset, test_fraction: f64, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = stratified_split(&data.labels, test_fraction, &mut task_rng(seed, Stream::Split, 0))?;
    Ok((data.subset(&train), data.subset(&test)))
}

fn blocks_of(data: &LabeledDataset) -> Vec<Block> {
    [Block::Text, Block::Image, Block::Metadata].into_iter().filter(|b| data.registry.block_count(*b) > 0).collect()
}

/// Operating threshold under `policy`. Tuning fits an auxiliary model on a
/// stratified slice of `train` and maximizes F1 on the held-out rest.
pub fn choose_threshold(train: &LabeledDataset, config: &TrainConfig, policy: ThresholdPolicy) -> Result<f64> {
    match policy {
        ThresholdPolicy::Fixed { threshold } => Ok(threshold),
        ThresholdPolicy::TunedF1 { validation_fraction } => {
            let (fit_idx, val_idx) = stratified_split(
                &train.labels,
                validation_fraction,
                &mut task_rng(config.seed, Stream::Validation, 0),
            )?;
            let (fit, val) = (train.subset(&fit_idx), train.subset(&val_idx));
            let aux = TrainedModel::fit(&fit, config)?;
            best_f1_threshold(&aux.predict_dataset(&val)?, &val.labels)
        }
    }
}

/// Trains on `train`, scores `test`, and assembles the report.
pub fn fit_and_evaluate(
    experiment: &str,
    train: &LabeledDataset,
    test: &LabeledDataset,
    config: &TrainConfig,
    policy: ThresholdPolicy,
) -> Result<(TrainedModel, EvalReport)> {
    let model = TrainedModel::fit(train, config)?;
    let threshold = choose_threshold(train, config, policy)?;
    let report = evaluate_model(experiment, &model, test, threshold, policy)?;
    let report = EvalReport { train_fingerprint: Some(Fingerprint::of_dataset(train)), ..report };
    Ok((model, report))
}

pub fn evaluate_model(
    experiment: &str,
    model: &TrainedModel,
    test: &LabeledDataset,
    threshold: f64,
    policy: ThresholdPolicy,
) -> Result<EvalReport> {
    let scores = model.predict_dataset(test)?;
    let mut r = EvalReport::from_scores(
        experiment,
        model.kind().as_str(),
        &test.ids,
        &test.labels,
        &scores,
        threshold,
        policy,
    )?;
    r.blocks = blocks_of(test);
    r.n_features = test.n_features();
    r.importances = Some(model.feature_importances());
    r.config = Some(model.config);
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table3Settings {
    pub test_fraction: f64,
    pub validation_fraction: f64,
    /// Minority-to-majority ratio used when undersampling whole splits.
    pub split_ratio: f64,
}

impl Default for Table3Settings {
    fn default() -> Self {
        Table3Settings {
            test_fraction: DEFAULT_TEST_FRACTION,
            validation_fraction: DEFAULT_VALIDATION_FRACTION,
            split_ratio: 1.0,
        }
    }
}

/// The three forest regimes: no undersampling, undersampled training set,
/// and undersampled training and test sets. The third changes the test
/// class balance and is flagged `distribution_shifted`.
pub fn run_table3_suite(
    data: &LabeledDataset,
    params: &ForestParams,
    seed: u64,
    settings: &Table3Settings,
) -> Result<Vec<EvalReport>> {
    let (train, test) = split_dataset(data, settings.test_fraction, seed)?;
    let tuned = ThresholdPolicy::TunedF1 { validation_fraction: settings.validation_fraction };
    let base = TrainConfig::new(ModelParams::Forest(*params), seed);
    // Per-tree undersampling cannot ask for fewer majority rows than the
    // already-rebalanced split holds.
    let rebalanced = TrainConfig::new(
        ModelParams::Forest(ForestParams {
            sampling_strategy: params.sampling_strategy.max(settings.split_ratio),
            ..*params
        }),
        seed,
    );

    let (_, a) = fit_and_evaluate("table3_no_undersample", &train, &test, &base, tuned)?;

    let train_u = train.subset(&random_undersample(
        &train.labels,
        settings.split_ratio,
        &mut task_rng(seed, Stream::Undersample, 0),
    )?);
    let (model_b, b) = fit_and_evaluate("table3_undersample_train", &train_u, &test, &rebalanced, tuned)?;

    let test_u = test.subset(&random_undersample(
        &test.labels,
        settings.split_ratio,
        &mut task_rng(seed, Stream::Undersample, 1),
    )?);
    let fixed = ThresholdPolicy::Fixed { threshold: 0.5 };
    let mut c = evaluate_model("table3_undersample_train_test", &model_b, &test_u, 0.5, fixed)?;
    c.train_fingerprint = Some(Fingerprint::of_dataset(&train_u));
    c.flags.push("distribution_shifted".into());
    Ok(vec![a, b, c])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalRow {
    pub subset: String,
    pub blocks: Vec<Block>,
    pub n_features: usize,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalResult {
    pub reports: Vec<EvalReport>,
    pub table: Vec<IncrementalRow>,
}

pub const INCREMENTAL_SUBSETS: [(&str, &[Block]); 4] = [
    ("text", &[Block::Text]),
    ("image", &[Block::Image]),
    ("text_image", &[Block::Text, Block::Image]),
    ("all", &[Block::Text, Block::Image, Block::Metadata]),
];

/// Same split and seed, four column subsets.
pub fn incremental_experiment(
    data: &LabeledDataset,
    params: &ModelParams,
    seed: u64,
    test_fraction: f64,
    policy: ThresholdPolicy,
) -> Result<IncrementalResult> {
    let (train, test) = split_dataset(data, test_fraction, seed)?;
    let config = TrainConfig::new(*params, seed);
    let mut reports = Vec::new();
    let mut table = Vec::new();
    for (name, blocks) in INCREMENTAL_SUBSETS {
        let (tr, te) = (train.select_blocks(blocks)?, test.select_blocks(blocks)?);
        let (_, report) = fit_and_evaluate(&format!("incremental_{name}"), &tr, &te, &config, policy)?;
        table.push(IncrementalRow {
            subset: name.into(),
            blocks: blocks.to_vec(),
            n_features: tr.n_features(),
            auc: report.auc,
        });
        reports.push(report);
    }
    Ok(IncrementalResult { reports, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureRegistry, FeatureSpec};
    use crate::learn::{BoostParams, Matrix, MaxDepth};
    use rand::{Rng, SeedableRng};

    fn data(n: usize) -> LabeledDataset {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let spec = |name: &str, block| FeatureSpec { name: name.into(), block };
        let registry = FeatureRegistry::new(vec![
            spec("t0", Block::Text),
            spec("t1", Block::Text),
            spec("i0", Block::Image),
            spec("m0", Block::Metadata),
        ])
        .unwrap();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n {
            let z: f64 = rng.random();
            let y = u8::from(z > 0.8);
            rows.push(vec![
                z + rng.random::<f64>() * 0.6,
                rng.random(),
                z + rng.random::<f64>() * 0.8,
                z + rng.random::<f64>(),
            ]);
            labels.push(y);
        }
        LabeledDataset::new(
            registry,
            (0..n).map(|i| format!("p{i}")).collect(),
            Matrix::from_rows(&rows).unwrap(),
            labels,
        )
        .unwrap()
    }

    fn forest() -> ForestParams {
        ForestParams { n_trees: 15, max_depth: MaxDepth(Some(5)), sampling_strategy: 0.5, ..ForestParams::default() }
    }

    #[test]
    fn table3_three_valid_reports() {
        let reports = run_table3_suite(&data(400), &forest(), 9, &Table3Settings::default()).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            r.validate().unwrap();
            assert!(r.auc > 0.7, "{} {}", r.experiment, r.auc);
        }
        assert_eq!(reports[0].test_fingerprint, reports[1].test_fingerprint);
        let c = &reports[2];
        assert_eq!(c.flags, ["distribution_shifted"]);
        assert_eq!(2 * c.test_fingerprint.positives, c.test_fingerprint.rows);
        assert_eq!(c.metrics.threshold, 0.5);
    }

    #[test]
    fn incremental_shares_split_and_is_deterministic() {
        let d = data(300);
        let params = ModelParams::Boost(BoostParams { n_stages: 20, ..BoostParams::default() });
        let policy = ThresholdPolicy::Fixed { threshold: 0.5 };
        let r = incremental_experiment(&d, &params, 2, 0.33, policy).unwrap();
        let counts: Vec<usize> = r.table.iter().map(|t| t.n_features).collect();
        assert_eq!(counts, [2, 1, 3, 4]);
        assert!(r.reports.windows(2).all(
            |w| w[0].test_fingerprint == w[1].test_fingerprint && w[0].train_fingerprint == w[1].train_fingerprint
        ));
        assert_eq!(r, incremental_experiment(&d, &params, 2, 0.33, policy).unwrap());
    }

    #[test]
    fn missing_block_is_config_error() {
        let d = data(100).select_columns(&[0, 1, 2]);
        let err = incremental_experiment(
            &d,
            &ModelParams::Forest(forest()),
            1,
            0.33,
            ThresholdPolicy::Fixed { threshold: 0.5 },
        )
        .unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Config);
    }
}
