use super::label::TIME_BINS;
use super::post::{LabeledPost, Subreddit};
use crate::features::FeatureVector;

/// Column names of the metadata block, in emission order.
pub fn metadata_feature_names() -> Vec<String> {
    let mut names = vec![
        "meta.subscribers".to_string(),
        "meta.is_nsfw".to_string(),
        "meta.thumb_height".to_string(),
        "meta.thumb_width".to_string(),
    ];
    names.extend(Subreddit::ALL.iter().map(|s| format!("meta.subreddit.{}", s.name())));
    names.extend((0..TIME_BINS).map(|b| format!("meta.time_bin.{b}")));
    names
}

/// Subscribers, nsfw flag, thumbnail size, and one-hot subreddit and time bin.
pub fn encode_metadata_features(post: &LabeledPost) -> FeatureVector {
    let names = metadata_feature_names();
    let p = &post.post;
    let mut values = vec![p.subscribers as f64, f64::from(u8::from(p.is_nsfw)), p.thumb_height, p.thumb_width];
    values.extend(Subreddit::ALL.iter().map(|&s| f64::from(u8::from(s == p.subreddit))));
    values.extend((0..TIME_BINS).map(|b| f64::from(u8::from(b == post.time_bin as usize))));
    FeatureVector { names, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{time_of_day_bin, MemePost};

    fn labeled(sr: Subreddit, utc: i64, nsfw: bool) -> LabeledPost {
        let mut p = MemePost::new("m", sr, utc, 10, 100);
        p.is_nsfw = nsfw;
        p.thumb_height = 140.0;
        p.thumb_width = 93.0;
        LabeledPost { time_bin: time_of_day_bin(utc), post: p, ups_normed: 0.1, dank: 0 }
    }

    #[test]
    fn nsfw_memes_at_local_two_am() {
        // 07:00 UTC = 02:00 Central
        let v = encode_metadata_features(&labeled(Subreddit::Memes, 1_584_489_600 + 7 * 3600, true));
        assert_eq!(v.len(), 15);
        assert_eq!(v.get("meta.is_nsfw"), Some(1.0));
        assert_eq!(v.get("meta.subreddit.memes"), Some(1.0));
        assert_eq!(v.get("meta.time_bin.0"), Some(1.0));
        let hot: f64 = v.values[4..].iter().sum();
        assert_eq!(hot, 2.0);
    }

    #[test]
    fn subreddit_change_moves_two_coordinates() {
        let a = encode_metadata_features(&labeled(Subreddit::Memes, 0, false));
        let b = encode_metadata_features(&labeled(Subreddit::MeIrl, 0, false));
        let diff = a.values.iter().zip(&b.values).filter(|(x, y)| x != y).count();
        assert_eq!(diff, 2);
    }

    #[test]
    fn one_hots_partition() {
        for sr in Subreddit::ALL {
            for h in 0..24 {
                let v = encode_metadata_features(&labeled(sr, h * 3600, false));
                assert_eq!(v.values[4..9].iter().sum::<f64>(), 1.0);
                assert_eq!(v.values[9..15].iter().sum::<f64>(), 1.0);
            }
        }
    }
}
