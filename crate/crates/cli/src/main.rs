use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use memepop::learn::{MaxDepth, ModelKind};
use memepop::pipeline::{self, PipelineConfig};
use memepop::synthetic::{write_synthetic_archive, SyntheticSpec};
use memepop::{Error, ErrorKind};

#[derive(Parser)]
#[command(name = "memepop", version, about = "Predict meme popularity from image, text, and post metadata")]
struct Cli {
    /// TOML file supplying any of the options below; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(flatten)]
    opts: Options,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, clean, and label the archive.
    Ingest,
    /// Extract text, image, and metadata features.
    Featurize,
    /// Split, optionally grid-search, and fit a model.
    Train,
    /// Score the saved model on the saved test split.
    Evaluate,
    #[command(subcommand)]
    Experiment(Experiment),
    /// Collect every report in the output directory into a summary.
    Report,
    /// Write a seeded synthetic archive for trying the pipeline.
    Synth(SynthArgs),
}

#[derive(Subcommand)]
enum Experiment {
    /// Undersampling comparison on a random forest.
    Table3,
    /// Text, image, text+image, and all-feature models.
    Incremental,
    /// Evaluate an external score file on the test split.
    External,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to write the archive into.
    dir: PathBuf,
    #[arg(long, default_value_t = 400)]
    posts: usize,
}

#[derive(Args, Default)]
struct Options {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    archive: Option<PathBuf>,
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    #[arg(long, global = true)]
    images_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    annotations: Option<PathBuf>,
    #[arg(long, global = true)]
    sentiment_scores: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    word_categories: Option<PathBuf>,
    #[arg(long, global = true)]
    palette: Option<PathBuf>,
    #[arg(long, global = true)]
    vgg_categories: Option<PathBuf>,
    #[arg(long, global = true)]
    grid: Option<PathBuf>,
    /// External score file (post_id, score) for `experiment external`.
    #[arg(long, global = true)]
    scores: Option<PathBuf>,
    /// OCR program and arguments; `{image}` is replaced by the image path.
    #[arg(long, global = true, num_args = 1.., value_delimiter = ' ')]
    ocr_command: Option<Vec<String>>,
    #[arg(long, global = true)]
    label_quantile: Option<f64>,
    #[arg(long, global = true)]
    model: Option<ModelKind>,
    #[arg(long, global = true)]
    test_fraction: Option<f64>,
    #[arg(long, global = true)]
    cv_folds: Option<usize>,
    #[arg(long, global = true)]
    grid_search: Option<bool>,
    /// Fixed decision threshold; omit to tune one on a validation slice.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true)]
    n_trees: Option<usize>,
    #[arg(long, global = true)]
    sampling_strategy: Option<f64>,
    #[arg(long, global = true)]
    n_stages: Option<usize>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    /// Tree depth for the selected model; an integer or `none`.
    #[arg(long, global = true)]
    max_depth: Option<String>,
}

impl Options {
    fn into_config(self, base: &PipelineConfig) -> Result<PipelineConfig, Error> {
        let max_depth = self
            .max_depth
            .as_deref()
            .map(|s| match s {
                "none" => Ok(MaxDepth(None)),
                n => n
                    .parse()
                    .map(|d| MaxDepth(Some(d)))
                    .map_err(|_| Error::config(format!("--max-depth: expected an integer or `none`, got `{n}`"))),
            })
            .transpose()?;
        let kind = self.model.or(base.model).unwrap_or(ModelKind::Forest);
        let forest = (self.n_trees.is_some()
            || self.sampling_strategy.is_some()
            || (max_depth.is_some() && kind == ModelKind::Forest))
            .then(|| {
                let mut p = base.forest.unwrap_or_default();
                if let Some(n) = self.n_trees {
                    p.n_trees = n;
                }
                if let Some(r) = self.sampling_strategy {
                    p.sampling_strategy = r;
                }
                if let (Some(d), ModelKind::Forest) = (max_depth, kind) {
                    p.max_depth = d;
                }
                p
            });
        let boost = (self.n_stages.is_some()
            || self.learning_rate.is_some()
            || (max_depth.is_some() && kind == ModelKind::Boost))
            .then(|| {
                let mut p = base.boost.unwrap_or_default();
                if let Some(n) = self.n_stages {
                    p.n_stages = n;
                }
                if let Some(lr) = self.learning_rate {
                    p.learning_rate = lr;
                }
                if let (Some(d), ModelKind::Boost) = (max_depth, kind) {
                    p.max_depth = d;
                }
                p
            });
        Ok(PipelineConfig {
            seed: self.seed,
            output_dir: self.output_dir,
            archive: self.archive,
            schema: self.schema,
            images_dir: self.images_dir,
            annotations: self.annotations,
            sentiment_scores: self.sentiment_scores,
            stopwords: self.stopwords,
            lexicon: self.lexicon,
            word_categories: self.word_categories,
            palette: self.palette,
            vgg_categories: self.vgg_categories,
            grid: self.grid,
            scores: self.scores,
            ocr_command: self.ocr_command,
            label_quantile: self.label_quantile,
            model: self.model,
            test_fraction: self.test_fraction,
            cv_folds: self.cv_folds,
            grid_search: self.grid_search,
            threshold: self.threshold,
            forest,
            boost,
        })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| format!("{x:.4}"))
}

fn print_report(r: &memepop::eval::EvalReport) {
    println!(
        "{:<32} auc={:.4} acc={} prec={} rec={} f1={} threshold={:.4} test_rows={}",
        r.experiment,
        r.auc,
        opt(r.metrics.accuracy.value()),
        opt(r.metrics.precision.value()),
        opt(r.metrics.recall.value()),
        opt(r.metrics.f1.value()),
        r.metrics.threshold,
        r.test_fingerprint.rows,
    );
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Command::Synth(args) = &cli.command {
        let spec = SyntheticSpec { posts: args.posts, seed: cli.opts.seed.unwrap_or(7), ..SyntheticSpec::default() };
        let out = write_synthetic_archive(&args.dir, &spec)?;
        println!("archive     {}", out.archive.display());
        println!("images_dir  {}", out.images_dir.display());
        println!("annotations {}", out.annotations.display());
        return Ok(());
    }
    let file = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    let flags = cli.opts.into_config(&file)?;
    let cfg = file.overlay(flags);
    cfg.seed()?;
    cfg.output_dir()?;
    cfg.check_optional_paths()?;

    match cli.command {
        Command::Ingest => {
            let s = pipeline::ingest(&cfg)?;
            println!(
                "records={} dank={} parsed={} rejected={} removed_by_cleaning={} threshold={}",
                s.records, s.dank, s.parsed, s.rejected, s.removed_by_cleaning, s.label_threshold
            );
            if let Some(stats) = &s.stats {
                println!("median ups vs subscribers across subreddits: r={}", opt(stats.pearson_r.value()));
            }
        }
        Command::Featurize => {
            let s = pipeline::featurize(&cfg)?;
            println!(
                "records={} excluded={} text={} image={} metadata={} vgg_missing={}",
                s.records, s.excluded, s.text_columns, s.image_columns, s.metadata_columns, s.vgg_missing
            );
        }
        Command::Train => {
            let s = pipeline::train(&cfg)?;
            println!("model={} train_rows={} test_rows={}", s.config.model.label(), s.train_rows, s.test_rows);
            if let Some(cv) = &s.cv {
                println!("cv best mean auc={:.4} over {} grid points", cv.best_auc, cv.table.len());
            }
        }
        Command::Evaluate => print_report(&pipeline::evaluate(&cfg)?),
        Command::Experiment(Experiment::Table3) => pipeline::experiment_table3(&cfg)?.iter().for_each(print_report),
        Command::Experiment(Experiment::Incremental) => {
            pipeline::experiment_incremental(&cfg)?.reports.iter().for_each(print_report)
        }
        Command::Experiment(Experiment::External) => print_report(&pipeline::experiment_external(&cfg)?),
        Command::Report => {
            for r in pipeline::report(&cfg)? {
                println!("{:<32} auc={:.4} f1={} flags={}", r.experiment, r.auc, opt(r.f1), r.flags.join(";"));
            }
        }
        Command::Synth(_) => unreachable!("handled above"),
    }
    Ok(())
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Internal => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, _) => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
        Err(_) => ExitCode::from(exit_code(ErrorKind::Internal)),
    }
}
