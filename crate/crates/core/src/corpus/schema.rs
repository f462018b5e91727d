use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    /// One JSON object per line.
    Jsonl,
    /// Delimited text with a header row.
    Csv,
}

/// Source column name for each [`MemePost`](super::MemePost) field.
///
/// For JSON input a dotted name such as `thumbnail.height` is looked up
/// literally first and then as a nested path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldMap {
    pub id: String,
    pub created_utc: String,
    pub ups: String,
    pub is_nsfw: String,
    pub subreddit: String,
    pub subscribers: String,
    pub thumb_height: String,
    pub thumb_width: String,
    pub title: String,
    pub media_ref: String,
    pub raw_text: Option<String>,
    pub processed_words: Option<String>,
    pub vgg_labels: Option<String>,
    pub vgg_probs: Option<String>,
    pub sentiment: Option<String>,
    pub dead_link: Option<String>,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id: "id".into(),
            created_utc: "created_utc".into(),
            ups: "ups".into(),
            is_nsfw: "is_nsfw".into(),
            subreddit: "subreddit".into(),
            subscribers: "subscribers".into(),
            thumb_height: "thumbnail.height".into(),
            thumb_width: "thumbnail.width".into(),
            title: "title".into(),
            media_ref: "media".into(),
            raw_text: Some("text".into()),
            processed_words: Some("processed_words".into()),
            vgg_labels: Some("VGG_features".into()),
            vgg_probs: Some("VGG_probs".into()),
            sentiment: None,
            dead_link: Some("dead_link".into()),
        }
    }
}

/// Describes how to read an archive file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schema {
    pub format: RecordFormat,
    /// Single-byte delimiter for [`RecordFormat::Csv`].
    pub delimiter: char,
    pub fields: FieldMap,
}

impl Default for Schema {
    fn default() -> Self {
        Schema { format: RecordFormat::Jsonl, delimiter: ',', fields: FieldMap::default() }
    }
}

impl Schema {
    pub fn csv() -> Self {
        Schema { format: RecordFormat::Csv, ..Schema::default() }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let schema: Schema = toml::from_str(s).map_err(|e| Error::config(format!("schema: {e}")))?;
        if !schema.delimiter.is_ascii() {
            return Err(Error::config("schema: delimiter must be a single ASCII character"));
        }
        Ok(schema)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_keeps_defaults() {
        let s = Schema::from_toml_str(
            r#"
            format = "csv"
            delimiter = "\t"
            [fields]
            subscribers = "subreddit_subscribers"
            "#,
        )
        .unwrap();
        assert_eq!(s.format, RecordFormat::Csv);
        assert_eq!(s.delimiter, '\t');
        assert_eq!(s.fields.subscribers, "subreddit_subscribers");
        assert_eq!(s.fields.ups, "ups");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Schema::from_toml_str("fromat = \"csv\"").is_err());
    }
}
