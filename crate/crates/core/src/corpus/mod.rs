//! Loading, cleaning, and labeling the archived corpus.

mod clean;
mod label;
mod metadata;
mod parse;
mod post;
mod schema;
mod stats;
mod store;

pub use clean::{clean_records, is_static_image, IMAGE_EXTENSIONS};
pub use label::{
    assign_dank_labels, label_posts, normalize_ups, quantile_sorted, time_of_day_bin, DankLabels,
    CENTRAL_DAYLIGHT_OFFSET_SECS, TIME_BINS,
};
pub use metadata::{encode_metadata_features, metadata_feature_names};
pub use parse::{parse_records, ParseOutcome, RecordError};
pub use post::{LabeledPost, MemePost, Subreddit};
pub use schema::{FieldMap, RecordFormat, Schema};
pub use stats::{median, pearson, subreddit_correlation, CorpusStats, Correlation, SubredditSummary};
pub use store::{read_corpus, write_corpus, CorpusHeader, CORPUS_FORMAT, CORPUS_SCHEMA_VERSION};
