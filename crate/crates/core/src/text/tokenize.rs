use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../../config/stopwords_en.txt");

pub const MIN_TOKEN_CHARS: usize = 3;

/// Words dropped by [`tokenize`]. Lines starting with `#` are comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase().replace(['\'', '’'], ""))
            .collect();
        StopWords { words }
    }

    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path).map(|t| Self::parse(&t)).map_err(|e| Error::io(path, e))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '’' | '‘' | '`')
}

/// Lowercases, deletes apostrophes, turns every other non-alphanumeric
/// character into a separator, and drops short tokens and stopwords.
pub fn tokenize(text: &str, stopwords: &StopWords) -> Vec<String> {
    let mut cleaned = String::with_capacity(text.len());
    for c in text.chars() {
        if is_apostrophe(c) {
            continue;
        }
        if c.is_alphanumeric() {
            cleaned.extend(c.to_lowercase().filter(|l| l.is_alphanumeric() && !l.is_uppercase()));
        } else {
            cleaned.push(' ');
        }
    }
    cleaned
        .split_whitespace()
        .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS && !stopwords.contains(t))
        .map(str::to_string)
        .collect()
}
