use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::post::{LabeledPost, Subreddit};
use crate::error::{Error, Result};

/// A correlation coefficient, or the reason it does not exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum Correlation {
    Defined(f64),
    /// One of the series has zero variance.
    Undefined,
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined => None,
        }
    }
}

/// Pearson product-moment correlation of two equal-length series.
pub fn pearson(x: &[f64], y: &[f64]) -> Correlation {
    assert_eq!(x.len(), y.len(), "pearson: series lengths differ");
    let n = x.len() as f64;
    if x.len() < 2 {
        return Correlation::Undefined;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Correlation::Undefined;
    }
    Correlation::Defined((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Median of an unsorted slice; the mean of the two middle values for even lengths.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) { (v[mid - 1] + v[mid]) / 2.0 } else { v[mid] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubredditSummary {
    pub subreddit: Subreddit,
    pub records: usize,
    pub median_ups: f64,
    /// Median of the subscriber counts recorded on this subreddit's posts.
    pub subscribers: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub subreddits: Vec<SubredditSummary>,
    /// Correlation between per-subreddit median ups and subscribers.
    pub pearson_r: Correlation,
    pub total_records: usize,
    pub dank_count: usize,
}

/// Per-subreddit medians and their correlation with audience size.
pub fn subreddit_correlation(posts: &[LabeledPost]) -> Result<CorpusStats> {
    let mut groups: BTreeMap<Subreddit, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for lp in posts {
        let g = groups.entry(lp.post.subreddit).or_default();
        g.0.push(lp.post.ups as f64);
        g.1.push(lp.post.subscribers as f64);
    }
    if groups.len() < 2 {
        return Err(Error::data(format!("subscriber correlation needs at least 2 subreddits, found {}", groups.len())));
    }
    let subreddits: Vec<SubredditSummary> = groups
        .into_iter()
        .map(|(subreddit, (ups, subs))| SubredditSummary {
            subreddit,
            records: ups.len(),
            median_ups: median(&ups).unwrap(),
            subscribers: median(&subs).unwrap(),
        })
        .collect();
    let x: Vec<f64> = subreddits.iter().map(|s| s.median_ups).collect();
    let y: Vec<f64> = subreddits.iter().map(|s| s.subscribers).collect();
    Ok(CorpusStats {
        pearson_r: pearson(&x, &y),
        total_records: posts.len(),
        dank_count: posts.iter().filter(|p| p.dank == 1).count(),
        subreddits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::MemePost;
    use proptest::prelude::*;

    fn lp(sr: Subreddit, ups: u64, subs: u64) -> LabeledPost {
        LabeledPost {
            post: MemePost::new("p", sr, 0, ups, subs),
            ups_normed: ups as f64 / subs as f64,
            dank: 0,
            time_bin: 0,
        }
    }

    #[test]
    fn proportional_medians_correlate_perfectly() {
        let posts = vec![
            lp(Subreddit::Memes, 100, 20_000),
            lp(Subreddit::Memes, 300, 20_000),
            lp(Subreddit::MeIrl, 40, 4_000),
            lp(Subreddit::Dankmeme, 1, 100),
        ];
        let s = subreddit_correlation(&posts).unwrap();
        assert_eq!(s.subreddits[0].median_ups, 200.0);
        let r = s.pearson_r.value().unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn anti_linear_series() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [-1.0, -2.0, -3.0, -4.0];
        assert!((pearson(&x, &y).value().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_is_undefined() {
        let posts = vec![lp(Subreddit::Memes, 5, 100), lp(Subreddit::MeIrl, 5, 200)];
        assert_eq!(subreddit_correlation(&posts).unwrap().pearson_r, Correlation::Undefined);
    }

    #[test]
    fn single_subreddit_rejected() {
        assert!(subreddit_correlation(&[lp(Subreddit::Memes, 1, 2)]).is_err());
    }

    proptest! {
        #[test]
        fn self_correlation_is_one(xs in proptest::collection::vec(-1e6f64..1e6, 2..50)) {
            if let Correlation::Defined(r) = pearson(&xs, &xs) {
                prop_assert!((r - 1.0).abs() <= 1e-12);
            }
        }
    }
}
