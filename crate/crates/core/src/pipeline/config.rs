use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::{BoostParams, ForestParams, ModelKind, ModelParams, TrainConfig};

pub const DEFAULT_LABEL_QUANTILE: f64 = 0.95;

/// Every setting a pipeline stage may read. All fields are optional so a
/// config file and command-line flags can be layered with [`overlay`].
///
/// [`overlay`]: PipelineConfig::overlay
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,

    pub archive: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub images_dir: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub sentiment_scores: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub word_categories: Option<PathBuf>,
    pub palette: Option<PathBuf>,
    pub vgg_categories: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub scores: Option<PathBuf>,

    /// Program and arguments run for posts without in-image text; `{image}`
    /// is replaced by the image path and stdout becomes the text.
    pub ocr_command: Option<Vec<String>>,

    pub label_quantile: Option<f64>,
    pub model: Option<ModelKind>,
    pub test_fraction: Option<f64>,
    pub cv_folds: Option<usize>,
    pub grid_search: Option<bool>,
    /// Fixed operating threshold; when absent the threshold is tuned.
    pub threshold: Option<f64>,
    pub forest: Option<ForestParams>,
    pub boost: Option<BoostParams>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("pipeline config: {e}")))
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        for p in self.paths_mut().into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    fn paths_mut(&mut self) -> [&mut Option<PathBuf>; 13] {
        [
            &mut self.output_dir,
            &mut self.archive,
            &mut self.schema,
            &mut self.images_dir,
            &mut self.annotations,
            &mut self.sentiment_scores,
            &mut self.stopwords,
            &mut self.lexicon,
            &mut self.word_categories,
            &mut self.palette,
            &mut self.vgg_categories,
            &mut self.grid,
            &mut self.scores,
        ]
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(mut self, top: PipelineConfig) -> Self {
        overlay_fields!(
            self,
            top,
            seed,
            output_dir,
            archive,
            schema,
            images_dir,
            annotations,
            sentiment_scores,
            stopwords,
            lexicon,
            word_categories,
            palette,
            vgg_categories,
            grid,
            scores,
            ocr_command,
            label_quantile,
            model,
            test_fraction,
            cv_folds,
            grid_search,
            threshold,
            forest,
            boost
        );
        self
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::config("a seed is required (set `seed` or pass --seed)"))
    }

    pub fn output_dir(&self) -> Result<&Path> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| Error::config("an output directory is required (set `output_dir` or pass --output-dir)"))
    }

    pub fn label_quantile(&self) -> Result<f64> {
        let q = self.label_quantile.unwrap_or(DEFAULT_LABEL_QUANTILE);
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::config(format!("label_quantile {q} must lie in (0, 1)")));
        }
        Ok(q)
    }

    pub fn test_fraction(&self) -> Result<f64> {
        let f = self.test_fraction.unwrap_or(crate::eval::DEFAULT_TEST_FRACTION);
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::config(format!("test_fraction {f} must lie in (0, 1)")));
        }
        Ok(f)
    }

    pub fn model_kind(&self) -> ModelKind {
        self.model.unwrap_or(ModelKind::Forest)
    }

    pub fn model_params(&self, kind: ModelKind) -> ModelParams {
        match kind {
            ModelKind::Forest => ModelParams::Forest(self.forest.unwrap_or_default()),
            ModelKind::Boost => ModelParams::Boost(self.boost.unwrap_or_default()),
        }
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let mut c = TrainConfig::new(self.model_params(self.model_kind()), self.seed()?);
        if let Some(k) = self.cv_folds {
            c.cv_folds = k;
        }
        c.validate()?;
        Ok(c)
    }

    /// Fails with a config error naming the first listed path that does not
    /// exist.
    pub fn require_paths(&self, which: &[(&str, &Option<PathBuf>)]) -> Result<()> {
        for (name, p) in which {
            match p {
                None => return Err(Error::config(format!("`{name}` is required for this command"))),
                Some(p) if !p.exists() => {
                    return Err(Error::config(format!("{name} path does not exist: {}", p.display())))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Every optional input path that is set must exist.
    pub fn check_optional_paths(&self) -> Result<()> {
        let opts = [
            ("schema", &self.schema),
            ("images_dir", &self.images_dir),
            ("annotations", &self.annotations),
            ("sentiment_scores", &self.sentiment_scores),
            ("stopwords", &self.stopwords),
            ("lexicon", &self.lexicon),
            ("word_categories", &self.word_categories),
            ("palette", &self.palette),
            ("vgg_categories", &self.vgg_categories),
            ("grid", &self.grid),
        ];
        for (name, p) in opts {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(Error::config(format!("{name} path does not exist: {}", p.display())));
                }
            }
        }
        Ok(())
    }
}
