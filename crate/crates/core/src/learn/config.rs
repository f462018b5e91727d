use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sample::ClassWeight;
use super::tree::MaxFeatures;
use crate::error::{Error, Result};

/// Depth limit written as an integer or `"none"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DepthRepr", into = "DepthRepr")]
pub struct MaxDepth(pub Option<usize>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DepthRepr {
    Int(usize),
    Word(String),
}

impl TryFrom<DepthRepr> for MaxDepth {
    type Error = String;

    fn try_from(r: DepthRepr) -> std::result::Result<Self, String> {
        match r {
            DepthRepr::Int(n) => Ok(MaxDepth(Some(n))),
            DepthRepr::Word(w) if w.eq_ignore_ascii_case("none") => Ok(MaxDepth(None)),
            DepthRepr::Word(w) => Err(format!("max_depth must be an integer or \"none\", got `{w}`")),
        }
    }
}

impl From<MaxDepth> for DepthRepr {
    fn from(d: MaxDepth) -> Self {
        match d.0 {
            Some(n) => DepthRepr::Int(n),
            None => DepthRepr::Word("none".into()),
        }
    }
}

impl fmt::Display for MaxDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Forest,
    Boost,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Forest => "forest",
            ModelKind::Boost => "boost",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forest" | "random_forest" | "rf" => Ok(ModelKind::Forest),
            "boost" | "gradient_boosting" | "gb" => Ok(ModelKind::Boost),
            _ => Err(Error::config(format!("unknown model kind `{s}` (expected forest or boost)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: MaxDepth,
    pub min_samples_leaf: usize,
    /// Minority-to-majority ratio of each tree's undersample.
    pub sampling_strategy: f64,
    pub max_features: MaxFeatures,
    pub class_weight: ClassWeight,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: MaxDepth(None),
            min_samples_leaf: 1,
            sampling_strategy: 1.0,
            max_features: MaxFeatures::Sqrt,
            class_weight: ClassWeight::Balanced,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub max_depth: MaxDepth,
    pub min_samples_leaf: usize,
    pub class_weight: ClassWeight,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_stages: 100,
            learning_rate: 0.1,
            max_depth: MaxDepth(Some(3)),
            min_samples_leaf: 1,
            class_weight: ClassWeight::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Forest(ForestParams),
    Boost(BoostParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Forest(_) => ModelKind::Forest,
            ModelParams::Boost(_) => ModelKind::Boost,
        }
    }

    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Forest => ModelParams::Forest(ForestParams::default()),
            ModelKind::Boost => ModelParams::Boost(BoostParams::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Forest(p) => {
                if p.n_trees == 0 {
                    return Err(Error::config("a forest needs at least one tree"));
                }
                if !(p.sampling_strategy > 0.0 && p.sampling_strategy <= 1.0) {
                    return Err(Error::config(format!("sampling_strategy {} must lie in (0, 1]", p.sampling_strategy)));
                }
                if p.min_samples_leaf == 0 {
                    return Err(Error::config("min_samples_leaf must be at least 1"));
                }
            }
            ModelParams::Boost(p) => {
                if !(p.learning_rate > 0.0 && p.learning_rate <= 1.0) {
                    return Err(Error::config(format!("learning_rate {} must lie in (0, 1]", p.learning_rate)));
                }
                if p.min_samples_leaf == 0 {
                    return Err(Error::config("min_samples_leaf must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// Short human-readable summary, used in CV tables.
    pub fn label(&self) -> String {
        match self {
            ModelParams::Forest(p) => format!(
                "forest trees={} depth={} min_leaf={} r={}",
                p.n_trees, p.max_depth, p.min_samples_leaf, p.sampling_strategy
            ),
            ModelParams::Boost(p) => {
                format!("boost stages={} lr={} depth={}", p.n_stages, p.learning_rate, p.max_depth)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub model: ModelParams,
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
}

fn default_folds() -> usize {
    5
}

impl TrainConfig {
    pub fn new(model: ModelParams, seed: u64) -> Self {
        TrainConfig { model, seed, cv_folds: default_folds() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cv_folds < 2 {
            return Err(Error::config(format!("cv_folds must be at least 2, got {}", self.cv_folds)));
        }
        self.model.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestGrid {
    pub n_trees: Vec<usize>,
    pub max_depth: Vec<MaxDepth>,
    pub min_samples_leaf: Vec<usize>,
    pub sampling_strategy: Vec<f64>,
}

impl Default for ForestGrid {
    fn default() -> Self {
        ForestGrid {
            n_trees: vec![100, 300],
            max_depth: vec![MaxDepth(Some(8)), MaxDepth(Some(12)), MaxDepth(None)],
            min_samples_leaf: vec![1, 5, 20],
            sampling_strategy: vec![0.1, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostGrid {
    pub n_stages: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub max_depth: Vec<MaxDepth>,
}

impl Default for BoostGrid {
    fn default() -> Self {
        BoostGrid {
            n_stages: vec![100, 300],
            learning_rate: vec![0.05, 0.1],
            max_depth: vec![MaxDepth(Some(2)), MaxDepth(Some(3))],
        }
    }
}

/// Hyperparameter grid; points are enumerated with the first field varying
/// slowest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamGrid {
    pub forest: ForestGrid,
    pub boost: BoostGrid,
}

impl ParamGrid {
    /// Grid points for `kind`; fields not on the grid come from `base`.
    pub fn expand(&self, base: &ModelParams) -> Vec<ModelParams> {
        let mut out = Vec::new();
        match base {
            ModelParams::Forest(b) => {
                let g = &self.forest;
                for &n_trees in &g.n_trees {
                    for &max_depth in &g.max_depth {
                        for &min_samples_leaf in &g.min_samples_leaf {
                            for &sampling_strategy in &g.sampling_strategy {
                                out.push(ModelParams::Forest(ForestParams {
                                    n_trees,
                                    max_depth,
                                    min_samples_leaf,
                                    sampling_strategy,
                                    ..*b
                                }));
                            }
                        }
                    }
                }
            }
            ModelParams::Boost(b) => {
                let g = &self.boost;
                for &n_stages in &g.n_stages {
                    for &learning_rate in &g.learning_rate {
                        for &max_depth in &g.max_depth {
                            out.push(ModelParams::Boost(BoostParams { n_stages, learning_rate, max_depth, ..*b }));
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_sizes() {
        let g = ParamGrid::default();
        assert_eq!(g.expand(&ModelParams::default_for(ModelKind::Forest)).len(), 54);
        assert_eq!(g.expand(&ModelParams::default_for(ModelKind::Boost)).len(), 8);
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            seed = 7
            [model]
            kind = "forest"
            n_trees = 10
            max_depth = "none"
            sampling_strategy = 0.5
        "#;
        let c: TrainConfig = toml::from_str(text).unwrap();
        assert_eq!(c.cv_folds, 5);
        match c.model {
            ModelParams::Forest(p) => {
                assert_eq!(p.n_trees, 10);
                assert_eq!(p.max_depth, MaxDepth(None));
                assert_eq!(p.max_features, MaxFeatures::Sqrt);
            }
            ModelParams::Boost(_) => panic!(),
        }
        let back: TrainConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let grid: ParamGrid = toml::from_str("[forest]\nmax_depth = [4, \"none\"]\n").unwrap();
        assert_eq!(grid.forest.max_depth, [MaxDepth(Some(4)), MaxDepth(None)]);
        assert!(toml::from_str::<ParamGrid>("[forest]\nmax_depth = [\"deep\"]\n").is_err());
    }

    #[test]
    fn validation() {
        let mut c = TrainConfig::new(ModelParams::default_for(ModelKind::Boost), 1);
        c.validate().unwrap();
        c.cv_folds = 1;
        assert!(c.validate().is_err());
        let bad = ModelParams::Forest(ForestParams { sampling_strategy: 0.0, ..ForestParams::default() });
        assert!(bad.validate().is_err());
    }
}
