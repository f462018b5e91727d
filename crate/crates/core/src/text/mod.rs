//! Caption and in-image text features.

mod categories;
mod encode;
mod porter;
mod sentiment;
mod tokenize;
mod vocabulary;

pub use categories::{word_category_flags, WordCategory, WordCategoryTable};
pub use encode::{
    encode_text_features, process_text, stem_text, text_feature_names, Precomputed, ProcessedText, TextConfig,
    TEXT_FEATURE_COUNT, WORD_CATEGORY_COUNT,
};
pub use porter::porter_stem;
pub use sentiment::{sentiment_score, Lexicon, NEUTRAL_SENTIMENT};
pub use tokenize::{tokenize, StopWords, MIN_TOKEN_CHARS};
pub use vocabulary::{
    build_vocabulary, word_frequency_report, VocabEntry, Vocabulary, VocabularyBuild, WordCounts, VOCABULARY_SIZE,
};
