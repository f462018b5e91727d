use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::features_io::{
    read_features, write_features, Exclusion, FeatureManifest, FEATURES_FORMAT, FEATURES_VERSION,
};
use crate::corpus::{
    clean_records, encode_metadata_features, label_posts, metadata_feature_names, parse_records, read_corpus,
    subreddit_correlation, write_corpus, CorpusHeader, CorpusStats, LabeledPost, RecordError, Schema,
};
use crate::error::{Error, Result};
use crate::eval::{
    color_means_table, color_profile_means, emit_report, evaluate_external_scores, evaluate_model,
    incremental_experiment, load_scores, run_table3_suite, EvalReport, Fingerprint, IncrementalResult, Table3Settings,
    ThresholdPolicy, DEFAULT_VALIDATION_FRACTION,
};
use crate::features::{Block, FeatureRegistry, FeatureSpec};
use crate::image::{
    encode_image_features, image_feature_names, load_annotations, ColorPalette, ImageConfig, RasterImage,
    VggAnnotation, VggCategoryMap, IMAGE_FEATURE_COUNT, VGG_BLOCK_LEN,
};
use crate::learn::{
    grid_search_cv, GridSearchResult, LabeledDataset, Matrix, ModelKind, ModelParams, ParamGrid, TrainConfig,
    TrainedModel,
};
use crate::text::{
    build_vocabulary, encode_text_features, process_text, word_frequency_report, Lexicon, Precomputed, ProcessedText,
    StopWords, TextConfig, Vocabulary, WordCategoryTable, WordCounts, VOCABULARY_SIZE,
};

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const CORPUS_STATS_FILE: &str = "corpus_stats.json";
pub const MODEL_FILE: &str = "model.json";
pub const SPLIT_FILE: &str = "split.json";
pub const CV_FILE: &str = "cv.json";

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub parsed: usize,
    pub rejected: usize,
    pub removed_by_cleaning: usize,
    pub records: usize,
    pub dank: usize,
    pub label_quantile: f64,
    pub label_threshold: f64,
    pub stats: Option<CorpusStats>,
    pub errors: Vec<RecordError>,
}

/// Parse, clean, and label the archive; writes the corpus file and its
/// statistics.
pub fn ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    cfg.require_paths(&[("archive", &cfg.archive)])?;
    cfg.check_optional_paths()?;
    let out = cfg.output_dir()?;
    let q = cfg.label_quantile()?;
    let schema = match &cfg.schema {
        Some(p) => Schema::load(p)?,
        None => Schema::default(),
    };
    let archive = cfg.archive.as_deref().expect("checked above");
    let file = std::fs::File::open(archive).map_err(|e| Error::io(archive, e))?;
    let parsed = parse_records(file, &schema)?;
    for e in &parsed.errors {
        log::warn!("{}: {e}", archive.display());
    }
    let n_parsed = parsed.posts.len();
    let cleaned = clean_records(parsed.posts);
    let removed = n_parsed - cleaned.len();
    if cleaned.is_empty() {
        return Err(Error::data(format!("{}: no records survived parsing and cleaning", archive.display())));
    }
    let (posts, threshold) = label_posts(cleaned, q)?;
    let stats = match subreddit_correlation(&posts) {
        Ok(s) => Some(s),
        Err(e) => {
            log::warn!("{e}");
            None
        }
    };
    create_dir(out)?;
    let mut buf = Vec::new();
    write_corpus(&mut buf, &CorpusHeader::new(q, threshold, posts.len()), &posts)?;
    write_file(&out.join(CORPUS_FILE), buf)?;
    let summary = IngestSummary {
        parsed: n_parsed,
        rejected: parsed.errors.len(),
        removed_by_cleaning: removed,
        records: posts.len(),
        dank: posts.iter().filter(|p| p.dank == 1).count(),
        label_quantile: q,
        label_threshold: threshold,
        stats,
        errors: parsed.errors,
    };
    write_file(&out.join(CORPUS_STATS_FILE), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

pub fn load_corpus(dir: &Path) -> Result<(CorpusHeader, Vec<LabeledPost>)> {
    let path = dir.join(CORPUS_FILE);
    let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    read_corpus(file)
}

pub fn text_config(cfg: &PipelineConfig) -> Result<TextConfig> {
    Ok(TextConfig {
        stopwords: match &cfg.stopwords {
            Some(p) => StopWords::load(p)?,
            None => StopWords::default(),
        },
        lexicon: match &cfg.lexicon {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::bundled(),
        },
        categories: match &cfg.word_categories {
            Some(p) => WordCategoryTable::load(p)?,
            None => WordCategoryTable::default(),
        },
    })
}

fn image_config(cfg: &PipelineConfig) -> Result<(ColorPalette, VggCategoryMap)> {
    let palette = match &cfg.palette {
        Some(p) => ColorPalette::load(p)?,
        None => ColorPalette::default(),
    };
    let vgg = match &cfg.vgg_categories {
        Some(p) => VggCategoryMap::load(p)?,
        None => VggCategoryMap::default(),
    };
    Ok((palette, vgg))
}

/// Candidate image files for a post: the media reference's file name under
/// `images_dir` (or the reference itself, relative to `base`), then
/// `<id>.<ext>` for each static image extension.
pub fn image_candidates(post: &LabeledPost, images_dir: Option<&Path>, base: &Path) -> Vec<PathBuf> {
    let media = post.post.media_ref.split(['?', '#']).next().unwrap_or("");
    let remote = media.contains("://");
    let file_name = media.rsplit('/').next().unwrap_or("");
    let mut out = Vec::new();
    match images_dir {
        Some(dir) => {
            if !file_name.is_empty() {
                out.push(dir.join(file_name));
            }
            for ext in crate::corpus::IMAGE_EXTENSIONS {
                out.push(dir.join(format!("{}.{ext}", post.post.id)));
            }
        }
        None if !remote && !media.is_empty() => out.push(base.join(media)),
        None => {}
    }
    out
}

fn reason(e: Error) -> String {
    match e {
        Error::Data(m) | Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn run_ocr(command: &[String], image: &Path) -> Result<String> {
    let (program, args) = command.split_first().ok_or_else(|| Error::config("ocr_command is empty"))?;
    let args: Vec<String> = args.iter().map(|a| a.replace("{image}", &image.to_string_lossy())).collect();
    let out = std::process::Command::new(program)
        .args(&args)
        .output()
        .map_err(|e| Error::config(format!("ocr command `{program}`: {e}")))?;
    if !out.status.success() {
        return Err(Error::data(format!("ocr command failed on {}", image.display())));
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturizeSummary {
    pub records: usize,
    pub excluded: usize,
    pub text_columns: usize,
    pub image_columns: usize,
    pub metadata_columns: usize,
    pub vgg_included: bool,
    pub vgg_missing: usize,
    pub vocabulary: Vec<String>,
}

struct Staged {
    post: LabeledPost,
    image: RasterImage,
    annotation: Option<VggAnnotation>,
    text: ProcessedText,
}

fn pad_vocabulary(vocab: Vocabulary) -> Vocabulary {
    let mut stems: Vec<String> = vocab.stems().map(String::from).collect();
    let mut i = 0;
    while stems.len() < VOCABULARY_SIZE {
        let placeholder = format!("unused_{i}");
        if !stems.contains(&placeholder) {
            stems.push(placeholder);
        }
        i += 1;
    }
    if stems.len() == vocab.len() {
        vocab
    } else {
        Vocabulary::from_stems(stems)
    }
}

/// Builds the text, image, and metadata blocks for every corpus record whose
/// image can be decoded.
pub fn featurize(cfg: &PipelineConfig) -> Result<FeaturizeSummary> {
    cfg.check_optional_paths()?;
    let out = cfg.output_dir()?;
    let (_, posts) = load_corpus(out)?;
    let text_cfg = text_config(cfg)?;
    let (palette, vgg_map) = image_config(cfg)?;
    let file_annotations = match &cfg.annotations {
        Some(p) => load_annotations(p)?,
        None => HashMap::new(),
    };
    let external_sentiment = match &cfg.sentiment_scores {
        Some(p) => load_scores(p)?,
        None => HashMap::new(),
    };
    let base = out.to_path_buf();
    let images_dir = cfg.images_dir.as_deref();

    let staged: Vec<std::result::Result<Staged, Exclusion>> = posts
        .into_par_iter()
        .map(|lp| {
            let exclude = |reason: String| Exclusion { id: lp.post.id.clone(), reason };
            let candidates = image_candidates(&lp, images_dir, &base);
            let Some(path) = candidates.iter().find(|p| p.is_file()) else {
                return Err(exclude("image file not found".into()));
            };
            let image = match RasterImage::open(path) {
                Ok(img) if img.pixel_count() > 0 => img,
                Ok(_) => return Err(exclude("image has no pixels".into())),
                Err(e) => return Err(exclude(reason(e))),
            };
            let annotation = match (&lp.post.vgg_labels, &lp.post.vgg_probs) {
                (Some(l), Some(p)) => Some(VggAnnotation::new(l, p).map_err(|e| exclude(reason(e)))?),
                _ => file_annotations.get(&lp.post.id).cloned(),
            };
            let raw_text = match (&lp.post.raw_text, &cfg.ocr_command) {
                (None, Some(cmd)) => Some(run_ocr(cmd, path).map_err(|e| exclude(reason(e)))?),
                (t, _) => t.clone(),
            };
            let pre = Precomputed {
                stems: lp.post.processed_words.as_deref(),
                sentiment: lp.post.sentiment.or_else(|| external_sentiment.get(&lp.post.id).copied()),
            };
            let text = process_text(&lp.post.title, raw_text.as_deref(), pre, &text_cfg);
            Ok(Staged { post: lp, image, annotation, text })
        })
        .collect();

    let mut excluded = Vec::new();
    let mut kept = Vec::new();
    for s in staged {
        match s {
            Ok(s) => kept.push(s),
            Err(x) => {
                log::warn!("excluding {}: {}", x.id, x.reason);
                excluded.push(x);
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::data("no corpus record has a decodable image"));
    }

    let counts = kept
        .par_iter()
        .map(|s| {
            let mut c = WordCounts::new();
            c.add_all(&s.text.stems);
            c
        })
        .reduce(WordCounts::new, WordCounts::merge);
    let build = build_vocabulary(&counts, VOCABULARY_SIZE);
    if let Some(w) = &build.warning {
        log::warn!("{w}; padding the vocabulary with placeholder stems");
    }
    let vocabulary = pad_vocabulary(build.vocabulary);
    let vgg = vgg_map.resolve(kept.iter().filter_map(|s| s.annotation.as_ref()))?;
    let vgg_included = kept.iter().any(|s| s.annotation.is_some());
    if !vgg_included {
        log::warn!("no record carries a VGG annotation; image block reduced to color and HSV columns");
    }
    let image_cfg = ImageConfig { palette, vgg };

    let text_names = crate::text::text_feature_names(&vocabulary, &text_cfg.categories);
    let mut image_names = image_feature_names(&image_cfg)?;
    let image_keep = if vgg_included { IMAGE_FEATURE_COUNT } else { IMAGE_FEATURE_COUNT - VGG_BLOCK_LEN };
    image_names.truncate(image_keep);
    let meta_names = metadata_feature_names();
    let mut columns = Vec::new();
    for (names, block) in [(&text_names, Block::Text), (&image_names, Block::Image), (&meta_names, Block::Metadata)] {
        columns.extend(names.iter().map(|n| FeatureSpec { name: n.clone(), block }));
    }
    let registry = FeatureRegistry::new(columns)?;

    let rows = kept
        .par_iter()
        .map(|s| {
            let mut v = encode_text_features(&s.text, &vocabulary, &text_cfg.categories)?.values;
            let img = encode_image_features(&s.image, s.annotation.as_ref(), &image_cfg)?;
            v.extend_from_slice(&img.vector.values[..image_keep]);
            v.extend(encode_metadata_features(&s.post).values);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let ids: Vec<String> = kept.iter().map(|s| s.post.post.id.clone()).collect();
    let labels: Vec<u8> = kept.iter().map(|s| s.post.dank).collect();
    let data = LabeledDataset::new(registry.clone(), ids, Matrix::from_rows(&rows)?, labels)?;

    let vgg_missing = kept.iter().filter(|s| s.annotation.is_none()).count();
    let manifest = FeatureManifest {
        format: FEATURES_FORMAT.into(),
        version: FEATURES_VERSION,
        registry,
        vocabulary: vocabulary.clone(),
        vocabulary_warning: build.warning,
        vgg_standalone: image_cfg.vgg.standalone().to_vec(),
        vgg_included,
        vgg_missing,
        records: data.len(),
        positives: data.positives(),
        excluded: excluded.clone(),
    };
    write_features(out, &manifest, &data)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["stem", "count"])?;
    for (stem, c) in word_frequency_report(&counts) {
        w.write_record([stem, c.to_string()])?;
    }
    write_file(&out.join("word_frequency.csv"), w.into_inner().map_err(|e| Error::data(e.to_string()))?)?;

    Ok(FeaturizeSummary {
        records: data.len(),
        excluded: excluded.len(),
        text_columns: data.registry.block_count(Block::Text),
        image_columns: data.registry.block_count(Block::Image),
        metadata_columns: data.registry.block_count(Block::Metadata),
        vgg_included,
        vgg_missing,
        vocabulary: vocabulary.stems().map(String::from).collect(),
    })
}

/// Train/test assignment written by [`train`] and reused by later stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub seed: u64,
    pub test_fraction: f64,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub train_fingerprint: Fingerprint,
    pub test_fingerprint: Fingerprint,
}

impl SplitRecord {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Rebuilds both sides from `data`, failing on ids it does not hold.
    pub fn apply(&self, data: &LabeledDataset) -> Result<(LabeledDataset, LabeledDataset)> {
        let pos: HashMap<&str, usize> = data.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let pick = |ids: &[String]| -> Result<Vec<usize>> {
            ids.iter()
                .map(|id| {
                    pos.get(id.as_str())
                        .copied()
                        .ok_or_else(|| Error::data(format!("split refers to unknown id `{id}`")))
                })
                .collect()
        };
        Ok((data.subset(&pick(&self.train_ids)?), data.subset(&pick(&self.test_ids)?)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub model: ModelKind,
    pub config: TrainConfig,
    pub train_rows: usize,
    pub test_rows: usize,
    pub cv: Option<GridSearchResult>,
}

pub fn load_grid(cfg: &PipelineConfig) -> Result<ParamGrid> {
    match &cfg.grid {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", p.display())))
        }
        None => Ok(ParamGrid::default()),
    }
}

fn load_dataset(cfg: &PipelineConfig) -> Result<LabeledDataset> {
    Ok(read_features(cfg.output_dir()?)?.1)
}

/// Best grid point for `base` on `train` when grid search is enabled,
/// otherwise `base` itself.
fn tuned_params(
    cfg: &PipelineConfig,
    train: &LabeledDataset,
    base: ModelParams,
) -> Result<(ModelParams, Option<GridSearchResult>)> {
    if !cfg.grid_search.unwrap_or(false) {
        return Ok((base, None));
    }
    let grid = load_grid(cfg)?.expand(&base);
    let result = grid_search_cv(train, &grid, cfg.cv_folds.unwrap_or(5), cfg.seed()?)?;
    write_file(&cfg.output_dir()?.join(CV_FILE), serde_json::to_string_pretty(&result)?)?;
    Ok((result.best, Some(result)))
}

/// Splits, optionally grid-searches, fits, and saves the model and split.
pub fn train(cfg: &PipelineConfig) -> Result<TrainSummary> {
    cfg.check_optional_paths()?;
    let mut config = cfg.train_config()?;
    let out = cfg.output_dir()?;
    let data = load_dataset(cfg)?;
    let test_fraction = cfg.test_fraction()?;
    let (train, test) = crate::eval::split_dataset(&data, test_fraction, config.seed)?;
    let (params, cv) = tuned_params(cfg, &train, config.model)?;
    config.model = params;
    let model = TrainedModel::fit(&train, &config)?;
    model.save(&out.join(MODEL_FILE))?;
    let split = SplitRecord {
        seed: config.seed,
        test_fraction,
        train_ids: train.ids.clone(),
        test_ids: test.ids.clone(),
        train_fingerprint: Fingerprint::of_dataset(&train),
        test_fingerprint: Fingerprint::of_dataset(&test),
    };
    write_file(&out.join(SPLIT_FILE), serde_json::to_string_pretty(&split)?)?;
    Ok(TrainSummary { model: model.kind(), config, train_rows: train.len(), test_rows: test.len(), cv })
}

fn policy(cfg: &PipelineConfig) -> ThresholdPolicy {
    match cfg.threshold {
        Some(threshold) => ThresholdPolicy::Fixed { threshold },
        None => ThresholdPolicy::TunedF1 { validation_fraction: DEFAULT_VALIDATION_FRACTION },
    }
}

fn emit(out: &Path, report: &EvalReport) -> Result<()> {
    report.validate()?;
    emit_report(report, out, &report.experiment)?;
    Ok(())
}

/// Scores the saved model on the saved test split.
pub fn evaluate(cfg: &PipelineConfig) -> Result<EvalReport> {
    let out = cfg.output_dir()?;
    let model = TrainedModel::load(&out.join(MODEL_FILE))?;
    let data = load_dataset(cfg)?;
    let split = SplitRecord::load(&out.join(SPLIT_FILE))?;
    let (train, test) = split.apply(&data)?;
    let policy = policy(cfg);
    let threshold = crate::eval::choose_threshold(&train, &model.config, policy)?;
    let mut report = evaluate_model("evaluate", &model, &test, threshold, policy)?;
    report.train_fingerprint = Some(Fingerprint::of_dataset(&train));
    emit(out, &report)?;
    Ok(report)
}

pub fn experiment_table3(cfg: &PipelineConfig) -> Result<Vec<EvalReport>> {
    cfg.check_optional_paths()?;
    let seed = cfg.seed()?;
    let out = cfg.output_dir()?;
    let data = load_dataset(cfg)?;
    let settings = Table3Settings { test_fraction: cfg.test_fraction()?, ..Table3Settings::default() };
    let base = cfg.model_params(ModelKind::Forest);
    let (train, _) = crate::eval::split_dataset(&data, settings.test_fraction, seed)?;
    let (params, _) = tuned_params(cfg, &train, base)?;
    let ModelParams::Forest(forest) = params else { unreachable!("forest grid yields forest params") };
    let reports = run_table3_suite(&data, &forest, seed, &settings)?;
    for r in &reports {
        emit(out, r)?;
    }
    Ok(reports)
}

pub fn experiment_incremental(cfg: &PipelineConfig) -> Result<IncrementalResult> {
    cfg.check_optional_paths()?;
    let out = cfg.output_dir()?;
    let data = load_dataset(cfg)?;
    let params = cfg.model_params(cfg.model_kind());
    let result = incremental_experiment(&data, &params, cfg.seed()?, cfg.test_fraction()?, policy(cfg))?;
    for r in &result.reports {
        emit(out, r)?;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["subset", "n_features", "auc"])?;
    for row in &result.table {
        w.write_record([row.subset.clone(), row.n_features.to_string(), row.auc.to_string()])?;
    }
    write_file(&out.join("incremental.csv"), w.into_inner().map_err(|e| Error::data(e.to_string()))?)?;
    Ok(result)
}

/// Scores an external prediction file on the saved test split, or on every
/// row when no split has been saved.
pub fn experiment_external(cfg: &PipelineConfig) -> Result<EvalReport> {
    cfg.require_paths(&[("scores", &cfg.scores)])?;
    let out = cfg.output_dir()?;
    let scores = load_scores(cfg.scores.as_deref().expect("checked above"))?;
    let data = load_dataset(cfg)?;
    let split_path = out.join(SPLIT_FILE);
    let test = if split_path.exists() { SplitRecord::load(&split_path)?.apply(&data)?.1 } else { data };
    let report = evaluate_external_scores(&scores, &test, cfg.threshold.unwrap_or(0.5))?;
    emit(out, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummaryRow {
    pub experiment: String,
    pub model: String,
    pub n_features: usize,
    pub auc: f64,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub threshold: f64,
    pub test_rows: usize,
    pub test_positives: usize,
    pub flags: Vec<String>,
}

/// Collects every report in the output directory into `summary.csv` and
/// writes the color-profile means table when features exist.
pub fn report(cfg: &PipelineConfig) -> Result<Vec<ReportSummaryRow>> {
    let out = cfg.output_dir()?;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(out)
        .map_err(|e| Error::io(out, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".report.json"))
        .collect();
    paths.sort();
    let rows: Vec<ReportSummaryRow> = paths
        .iter()
        .map(|p| {
            let r = EvalReport::load(p)?;
            Ok(ReportSummaryRow {
                experiment: r.experiment,
                model: r.model,
                n_features: r.n_features,
                auc: r.auc,
                accuracy: r.metrics.accuracy.value(),
                precision: r.metrics.precision.value(),
                recall: r.metrics.recall.value(),
                f1: r.metrics.f1.value(),
                threshold: r.metrics.threshold,
                test_rows: r.test_fingerprint.rows,
                test_positives: r.test_fingerprint.positives,
                flags: r.flags,
            })
        })
        .collect::<Result<_>>()?;
    let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |x| x.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "model",
        "n_features",
        "auc",
        "accuracy",
        "precision",
        "recall",
        "f1",
        "threshold",
        "test_rows",
        "test_positives",
        "flags",
    ])?;
    for r in &rows {
        w.write_record([
            r.experiment.clone(),
            r.model.clone(),
            r.n_features.to_string(),
            r.auc.to_string(),
            opt(r.accuracy),
            opt(r.precision),
            opt(r.recall),
            opt(r.f1),
            r.threshold.to_string(),
            r.test_rows.to_string(),
            r.test_positives.to_string(),
            r.flags.join(";"),
        ])?;
    }
    write_file(&out.join("summary.csv"), w.into_inner().map_err(|e| Error::data(e.to_string()))?)?;
    if out.join(super::features_io::MANIFEST_FILE).exists() {
        let data = load_dataset(cfg)?;
        write_file(&out.join("color_means.csv"), color_means_table(&color_profile_means(&data))?)?;
    }
    Ok(rows)
}
