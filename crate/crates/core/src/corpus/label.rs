use serde::{Deserialize, Serialize};

use super::post::{LabeledPost, MemePost};
use crate::error::{Error, Result};

/// Offset from UTC to US Central daylight time, in seconds. The collection
/// week (March 17-23, 2020) lies entirely inside daylight-saving time.
pub const CENTRAL_DAYLIGHT_OFFSET_SECS: i64 = -5 * 3600;

pub const TIME_BINS: usize = 6;

/// Four-hour bin of the local (US Central) hour of posting, `0..=5`.
pub fn time_of_day_bin(created_utc: i64) -> u8 {
    let local = created_utc + CENTRAL_DAYLIGHT_OFFSET_SECS;
    let hour = local.rem_euclid(86_400) / 3600;
    (hour / 4) as u8
}

/// Upvotes per subscriber.
pub fn normalize_ups(ups: u64, subscribers: u64) -> Result<f64> {
    if subscribers < 1 {
        return Err(Error::data("subscribers must be >= 1 (corrupt record)"));
    }
    Ok(ups as f64 / subscribers as f64)
}

/// Labels plus the threshold that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DankLabels {
    pub threshold: f64,
    pub labels: Vec<u8>,
}

impl DankLabels {
    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }
}

/// Quantile of `sorted` (ascending) by linear interpolation between order
/// statistics at position `q * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    if frac == 0.0 || sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Labels a value 1 when it strictly exceeds the `q`-quantile; ties at the
/// threshold are labeled 0.
pub fn assign_dank_labels(values: &[f64], q: f64) -> Result<DankLabels> {
    if values.is_empty() {
        return Err(Error::data("cannot label an empty list"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::config(format!("label quantile {q} outside (0,1)")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("non-finite popularity value"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let threshold = quantile_sorted(&sorted, q);
    let labels = values.iter().map(|&v| u8::from(v > threshold)).collect();
    Ok(DankLabels { threshold, labels })
}

/// Normalizes, bins, and labels a cleaned corpus.
pub fn label_posts(posts: Vec<MemePost>, q: f64) -> Result<(Vec<LabeledPost>, f64)> {
    let normed = posts
        .iter()
        .map(|p| normalize_ups(p.ups, p.subscribers).map_err(|e| Error::data(format!("{}: {e}", p.id))))
        .collect::<Result<Vec<_>>>()?;
    let labels = assign_dank_labels(&normed, q)?;
    let labeled = posts
        .into_iter()
        .zip(normed)
        .zip(labels.labels)
        .map(|((post, ups_normed), dank)| LabeledPost {
            time_bin: time_of_day_bin(post.created_utc),
            post,
            ups_normed,
            dank,
        })
        .collect();
    Ok((labeled, labels.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const H: i64 = 3600;
    // 2020-03-18T00:00:00Z
    const DAY: i64 = 1_584_489_600;

    #[test]
    fn time_bins_follow_central_offset() {
        assert_eq!(time_of_day_bin(DAY + 5 * H), 0);
        assert_eq!(time_of_day_bin(DAY + 6 * H + 30 * 60), 0);
        assert_eq!(time_of_day_bin(DAY + 23 * H), 4);
        assert_eq!(time_of_day_bin(DAY + 4 * H + 59 * 60), 5);
        assert_eq!(time_of_day_bin(DAY + 9 * H), 1);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_ups(0, 1_000_000).unwrap(), 0.0);
        assert_eq!(normalize_ups(100, 1_000_000).unwrap(), 1.0e-4);
        assert!(normalize_ups(5, 0).is_err());
    }

    #[test]
    fn one_to_hundred_top_five() {
        let values: Vec<f64> = (1..=100).map(f64::from).collect();
        let l = assign_dank_labels(&values, 0.95).unwrap();
        let pos: Vec<f64> = values.iter().zip(&l.labels).filter(|(_, &y)| y == 1).map(|(v, _)| *v).collect();
        assert_eq!(pos, vec![96.0, 97.0, 98.0, 99.0, 100.0]);
    }

    #[test]
    fn equal_values_have_no_positives() {
        let l = assign_dank_labels(&[0.3; 17], 0.95).unwrap();
        assert_eq!(l.positives(), 0);
    }

    #[test]
    fn archive_sized_corpus_count() {
        // Distinct values: 80,362 records give 4,019 positives.
        let values: Vec<f64> = (0..80_362).map(|i| i as f64).collect();
        let l = assign_dank_labels(&values, 0.95).unwrap();
        assert_eq!(l.positives(), 4019);
    }

    #[test]
    fn empty_and_bad_quantile_rejected() {
        assert!(assign_dank_labels(&[], 0.95).is_err());
        assert!(assign_dank_labels(&[1.0], 1.0).is_err());
        assert!(assign_dank_labels(&[1.0], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn positive_rate_bounded_and_separated(values in proptest::collection::vec(0u32..50, 1..300), q in 0.5f64..0.99) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let l = assign_dank_labels(&values, q).unwrap();
            let n = values.len() as f64;
            prop_assert!(l.positives() as f64 / n <= (1.0 - q) + 1.0 / n + 1e-12);
            let min_pos = values.iter().zip(&l.labels).filter(|(_, &y)| y == 1).map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
            for (v, &y) in values.iter().zip(&l.labels) {
                if y == 0 && *v == l.threshold {
                    prop_assert!(min_pos > *v);
                }
            }
        }

        #[test]
        fn normalize_is_scale_consistent(u in 0u64..1_000_000, s in 1u64..1_000_000, k in 1u64..1000) {
            let a = normalize_ups(u, s).unwrap();
            let b = normalize_ups(k * u, k * s).unwrap();
            prop_assert!((a - b).abs() <= f64::EPSILON * a.abs().max(1e-300) * 4.0);
        }

        #[test]
        fn time_bin_is_daily_periodic(t in 0i64..4_000_000_000, days in -30i64..30) {
            prop_assert_eq!(time_of_day_bin(t), time_of_day_bin(t + days * 86_400));
            prop_assert!(time_of_day_bin(t) < 6);
        }
    }
}
