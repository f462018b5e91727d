use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five meme communities the archive was collected from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subreddit {
    #[serde(rename = "memes")]
    Memes,
    #[serde(rename = "me_irl")]
    MeIrl,
    #[serde(rename = "Meme_Economy")]
    MemeEconomy,
    #[serde(rename = "dank_meme")]
    DankMeme,
    #[serde(rename = "dankmeme")]
    Dankmeme,
}

impl Subreddit {
    pub const ALL: [Subreddit; 5] =
        [Subreddit::Memes, Subreddit::MeIrl, Subreddit::MemeEconomy, Subreddit::DankMeme, Subreddit::Dankmeme];

    pub fn name(self) -> &'static str {
        match self {
            Subreddit::Memes => "memes",
            Subreddit::MeIrl => "me_irl",
            Subreddit::MemeEconomy => "Meme_Economy",
            Subreddit::DankMeme => "dank_meme",
            Subreddit::Dankmeme => "dankmeme",
        }
    }

    pub fn index(self) -> usize {
        Subreddit::ALL.iter().position(|&s| s == self).unwrap()
    }
}

impl fmt::Display for Subreddit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subreddit {
    type Err = Error;

    /// Case-insensitive; an `r/` or `/r/` prefix is accepted.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let bare = trimmed.strip_prefix("/r/").or_else(|| trimmed.strip_prefix("r/")).unwrap_or(trimmed);
        let lower = bare.to_ascii_lowercase();
        Subreddit::ALL
            .iter()
            .copied()
            .find(|sr| sr.name().to_ascii_lowercase() == lower)
            .ok_or_else(|| Error::data(format!("unknown subreddit `{s}`")))
    }
}

/// One archived submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemePost {
    pub id: String,
    pub created_utc: i64,
    pub ups: u64,
    pub is_nsfw: bool,
    pub subreddit: Subreddit,
    pub subscribers: u64,
    pub thumb_height: f64,
    pub thumb_width: f64,
    pub title: String,
    pub media_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processed_words: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vgg_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vgg_probs: Option<Vec<f64>>,
    /// Externally supplied valence in [0,1]; replaces the lexicon score when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dead_link: bool,
}

impl MemePost {
    /// A post with every optional annotation absent.
    pub fn new(id: impl Into<String>, subreddit: Subreddit, created_utc: i64, ups: u64, subscribers: u64) -> Self {
        MemePost {
            id: id.into(),
            created_utc,
            ups,
            is_nsfw: false,
            subreddit,
            subscribers,
            thumb_height: 0.0,
            thumb_width: 0.0,
            title: String::new(),
            media_ref: String::new(),
            raw_text: None,
            processed_words: None,
            vgg_labels: None,
            vgg_probs: None,
            sentiment: None,
            dead_link: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::data("empty id"));
        }
        if self.subscribers < 1 {
            return Err(Error::data(format!("{}: subscribers must be >= 1", self.id)));
        }
        if !(self.thumb_height >= 0.0 && self.thumb_width >= 0.0) {
            return Err(Error::data(format!("{}: negative thumbnail size", self.id)));
        }
        if let Some(labels) = &self.vgg_labels {
            if labels.len() != 3 {
                return Err(Error::data(format!("{}: expected 3 vgg labels, got {}", self.id, labels.len())));
            }
        }
        if let Some(probs) = &self.vgg_probs {
            if probs.len() != 3 {
                return Err(Error::data(format!("{}: expected 3 vgg probabilities, got {}", self.id, probs.len())));
            }
            if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::data(format!("{}: vgg probability outside [0,1]", self.id)));
            }
        }
        if let Some(s) = self.sentiment {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::data(format!("{}: sentiment outside [0,1]", self.id)));
            }
        }
        Ok(())
    }
}

/// A post with its normalized popularity and label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPost {
    pub post: MemePost,
    pub ups_normed: f64,
    pub dank: u8,
    pub time_bin: u8,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subreddit_parsing_accepts_prefixes_and_case() {
        assert_eq!("r/memes".parse::<Subreddit>().unwrap(), Subreddit::Memes);
        assert_eq!("/r/Meme_Economy".parse::<Subreddit>().unwrap(), Subreddit::MemeEconomy);
        assert_eq!("meme_economy".parse::<Subreddit>().unwrap(), Subreddit::MemeEconomy);
        assert_eq!("dankmeme".parse::<Subreddit>().unwrap(), Subreddit::Dankmeme);
        assert_eq!("dank_meme".parse::<Subreddit>().unwrap(), Subreddit::DankMeme);
        assert!("funny".parse::<Subreddit>().is_err());
    }

    #[test]
    fn validate_rejects_bad_vgg_lengths() {
        let mut p = MemePost::new("a", Subreddit::Memes, 0, 1, 1);
        p.vgg_labels = Some(vec!["x".into(), "y".into()]);
        assert!(p.validate().is_err());
        p.vgg_labels = Some(vec!["x".into(), "y".into(), "z".into()]);
        p.vgg_probs = Some(vec![0.5, 0.2, 1.5]);
        assert!(p.validate().is_err());
        p.vgg_probs = Some(vec![0.5, 0.2, 0.1]);
        assert!(p.validate().is_ok());
    }
}
