use serde::{Deserialize, Serialize};

use super::categories::{word_category_flags, WordCategoryTable};
use super::porter::porter_stem;
use super::sentiment::{sentiment_score, Lexicon};
use super::tokenize::{tokenize, StopWords, MIN_TOKEN_CHARS};
use super::vocabulary::{Vocabulary, VOCABULARY_SIZE};
use crate::error::{Error, Result};
use crate::features::FeatureVector;

pub const WORD_CATEGORY_COUNT: usize = 7;
pub const TEXT_FEATURE_COUNT: usize = WORD_CATEGORY_COUNT + VOCABULARY_SIZE + 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessedText {
    pub stems: Vec<String>,
    pub word_count: usize,
    /// Characters in the title.
    pub text_length: usize,
    pub sentiment: f64,
}

/// Stopwords, lexicon, and category table used to process one corpus.
#[derive(Debug, Clone, Default)]
pub struct TextConfig {
    pub stopwords: StopWords,
    pub lexicon: Lexicon,
    pub categories: WordCategoryTable,
}

impl TextConfig {
    pub fn bundled() -> Self {
        TextConfig {
            stopwords: StopWords::default(),
            lexicon: Lexicon::bundled(),
            categories: WordCategoryTable::default(),
        }
    }
}

/// Optional values supplied by the archive instead of being computed.
#[derive(Debug, Clone, Copy, Default)]
pub struct Precomputed<'a> {
    pub stems: Option<&'a [String]>,
    pub sentiment: Option<f64>,
}

/// Stems for the concatenation of title and in-image text.
pub fn stem_text(title: &str, raw_text: Option<&str>, stopwords: &StopWords) -> Vec<String> {
    let joined = match raw_text {
        Some(t) => format!("{title} {t}"),
        None => title.to_string(),
    };
    tokenize(&joined, stopwords)
        .iter()
        .map(|t| porter_stem(t))
        .filter(|s| s.chars().count() >= MIN_TOKEN_CHARS)
        .collect()
}

pub fn process_text(title: &str, raw_text: Option<&str>, pre: Precomputed<'_>, config: &TextConfig) -> ProcessedText {
    let stems = match pre.stems {
        Some(s) => s.to_vec(),
        None => stem_text(title, raw_text, &config.stopwords),
    };
    let sentiment =
        pre.sentiment.map(|s| s.clamp(0.0, 1.0)).unwrap_or_else(|| sentiment_score(&stems, &config.lexicon));
    ProcessedText { word_count: stems.len(), text_length: title.chars().count(), sentiment, stems }
}

pub fn text_feature_names(vocab: &Vocabulary, table: &WordCategoryTable) -> Vec<String> {
    let mut names: Vec<String> = table.categories().iter().map(|c| format!("text.cat.{}", c.name)).collect();
    names.extend(vocab.stems().map(|s| format!("text.word.{s}")));
    names.extend(["text.text_length", "text.word_count", "text.sentiment"].map(String::from));
    names
}

/// `[category flags | vocabulary presence flags | text_length, word_count, sentiment]`.
pub fn encode_text_features(
    text: &ProcessedText,
    vocab: &Vocabulary,
    table: &WordCategoryTable,
) -> Result<FeatureVector> {
    if vocab.len() != VOCABULARY_SIZE {
        return Err(Error::config(format!("vocabulary has {} entries, expected {VOCABULARY_SIZE}", vocab.len())));
    }
    if table.len() != WORD_CATEGORY_COUNT {
        return Err(Error::config(format!(
            "word category table has {} categories, expected {WORD_CATEGORY_COUNT}",
            table.len()
        )));
    }
    let mut values: Vec<f64> = word_category_flags(&text.stems, table).into_iter().map(f64::from).collect();
    values.extend(vocab.stems().map(|v| f64::from(u8::from(text.stems.iter().any(|s| s == v)))));
    values.extend([text.text_length as f64, text.word_count as f64, text.sentiment]);
    Ok(FeatureVector { names: text_feature_names(vocab, table), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab28() -> Vocabulary {
        Vocabulary::from_stems((0..28).map(|i| format!("w{i:02}")).chain(std::iter::empty()))
    }

    #[test]
    fn empty_input_defaults() {
        let cfg = TextConfig::bundled();
        let pt = process_text("", Some(""), Precomputed::default(), &cfg);
        assert!(pt.stems.is_empty());
        assert_eq!((pt.word_count, pt.text_length, pt.sentiment), (0, 0, 0.5));
        let v = encode_text_features(&pt, &vocab28(), &cfg.categories).unwrap();
        assert_eq!(v.len(), 38);
        assert!(v.values[..35].iter().all(|&x| x == 0.0));
        assert_eq!(&v.values[35..], &[0.0, 0.0, 0.5]);
    }

    #[test]
    fn precomputed_words_pass_through() {
        let cfg = TextConfig::bundled();
        let stored: Vec<String> = ["we'r", "tp", "quarantin"].iter().map(|s| s.to_string()).collect();
        let pre = Precomputed { stems: Some(&stored), sentiment: Some(0.9) };
        let pt = process_text("ignored title", Some("ignored"), pre, &cfg);
        assert_eq!(pt.stems, stored);
        assert_eq!(pt.sentiment, 0.9);
        assert_eq!(pt.text_length, 13);
    }

    #[test]
    fn title_and_image_text_combined() {
        let cfg = TextConfig::bundled();
        let pt = process_text("Me irl", Some("quarantine day 40"), Precomputed::default(), &cfg);
        assert_eq!(pt.stems, ["irl", "quarantin", "day"]);
        assert_eq!(pt.word_count, 3);
        assert_eq!(pt.text_length, 6);
    }

    #[test]
    fn vocabulary_column_is_set() {
        let cfg = TextConfig::bundled();
        let vocab = vocab28();
        let pt = ProcessedText { stems: vec!["w05".into()], word_count: 1, text_length: 3, sentiment: 0.5 };
        let v = encode_text_features(&pt, &vocab, &cfg.categories).unwrap();
        assert_eq!(v.values[7 + 5], 1.0);
        assert_eq!(v.names[7 + 5], "text.word.w05");
        assert_eq!(v.values[7..35].iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn wrong_vocabulary_size_is_config_error() {
        let cfg = TextConfig::bundled();
        let pt = process_text("", None, Precomputed::default(), &cfg);
        let err = encode_text_features(&pt, &Vocabulary::from_stems(["a"]), &cfg.categories).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Config);
    }

    proptest! {
        #[test]
        fn always_38_with_binary_prefix(title in "\\PC{0,40}", body in "[a-z ]{0,60}") {
            let cfg = TextConfig::bundled();
            let pt = process_text(&title, Some(&body), Precomputed::default(), &cfg);
            for s in &pt.stems {
                prop_assert!(s.chars().count() >= 3);
            }
            let v = encode_text_features(&pt, &vocab28(), &cfg.categories).unwrap();
            prop_assert_eq!(v.len(), TEXT_FEATURE_COUNT);
            prop_assert!(v.values[..35].iter().all(|&x| x == 0.0 || x == 1.0));
        }
    }
}
