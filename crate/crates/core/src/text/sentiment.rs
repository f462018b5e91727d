use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_LEXICON: &str = include_str!("../../config/lexicon_en.tsv");

/// Neutral score for text with no known words.
pub const NEUTRAL_SENTIMENT: f64 = 0.5;

/// Stem to valence in [-1, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    valence: HashMap<String, f64>,
}

impl Lexicon {
    /// Parses two tab- or comma-separated columns: stem, valence.
    pub fn parse(text: &str) -> Result<Self> {
        let mut valence = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (stem, value) = line
                .split_once('\t')
                .or_else(|| line.split_once(','))
                .ok_or_else(|| Error::config(format!("lexicon line {}: expected two columns", i + 1)))?;
            let v: f64 = value.trim().parse().map_err(|e| Error::config(format!("lexicon line {}: {e}", i + 1)))?;
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::config(format!("lexicon line {}: valence {v} outside [-1,1]", i + 1)));
            }
            valence.insert(stem.trim().to_string(), v);
        }
        Ok(Lexicon { valence })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        Lexicon { valence: pairs.into_iter().map(|(s, v)| (s.into(), v.clamp(-1.0, 1.0))).collect() }
    }

    pub fn get(&self, stem: &str) -> Option<f64> {
        self.valence.get(stem).copied()
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }

    /// The same lexicon with every valence negated.
    pub fn reversed(&self) -> Self {
        Lexicon { valence: self.valence.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }
}

impl Lexicon {
    /// The valence table shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon parses")
    }
}

/// Mean valence of the stems found in `lexicon`, mapped from [-1,1] to [0,1].
pub fn sentiment_score(stems: &[String], lexicon: &Lexicon) -> f64 {
    let (sum, n) = stems.iter().filter_map(|s| lexicon.get(s)).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        return NEUTRAL_SENTIMENT;
    }
    ((sum / n as f64 + 1.0) / 2.0).clamp(0.0, 1.0)
}
