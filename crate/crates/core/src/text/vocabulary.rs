use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Stem occurrence counts. Partial counts merge associatively, so corpora
/// can be counted in parallel chunks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordCounts {
    counts: HashMap<String, u64>,
}

impl WordCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_all<'a, I: IntoIterator<Item = &'a String>>(&mut self, stems: I) {
        for s in stems {
            *self.counts.entry(s.clone()).or_insert(0) += 1;
        }
    }

    pub fn merge(mut self, other: WordCounts) -> WordCounts {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// All stems, most frequent first; equal counts in lexicographic order.
    pub fn ranked(&self) -> Vec<(String, u64)> {
        let mut v: Vec<(String, u64)> = self.counts.iter().map(|(k, &c)| (k.clone(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v
    }
}

impl<'a> FromIterator<&'a [String]> for WordCounts {
    fn from_iter<T: IntoIterator<Item = &'a [String]>>(iter: T) -> Self {
        let mut wc = WordCounts::new();
        for stems in iter {
            wc.add_all(stems);
        }
        wc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub stem: String,
    pub count: u64,
}

/// The most frequent stems of a corpus, one presence column each.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Vocabulary {
    pub entries: Vec<VocabEntry>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn stems(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.stem.as_str())
    }

    pub fn from_stems<I: IntoIterator<Item = S>, S: Into<String>>(stems: I) -> Self {
        Vocabulary { entries: stems.into_iter().map(|s| VocabEntry { stem: s.into(), count: 0 }).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyBuild {
    pub vocabulary: Vocabulary,
    /// Set when the corpus had fewer than `k` distinct stems.
    pub warning: Option<String>,
}

pub const VOCABULARY_SIZE: usize = 28;

pub fn build_vocabulary(counts: &WordCounts, k: usize) -> VocabularyBuild {
    let ranked = counts.ranked();
    let warning =
        (ranked.len() < k).then(|| format!("corpus has {} distinct stems, fewer than the requested {k}", ranked.len()));
    VocabularyBuild {
        vocabulary: Vocabulary {
            entries: ranked.into_iter().take(k).map(|(stem, count)| VocabEntry { stem, count }).collect(),
        },
        warning,
    }
}

/// Full descending frequency table, for word-cloud style plots.
pub fn word_frequency_report(counts: &WordCounts) -> Vec<(String, u64)> {
    counts.ranked()
}
