//! Seeded archive generator with a planted popularity signal.
//!
//! Output is a JSONL archive, a directory of small PNG thumbnails, and an
//! annotation CSV, all in the layout the pipeline reads. Popularity depends
//! on a warm versus cool image palette, a handful of title words, the VGG
//! category, and the posting hour, plus log-normal noise. A few records are
//! deliberately unusable: animated media, dead links, missing files, and
//! undecodable bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;

use crate::corpus::Subreddit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub posts: usize,
    pub seed: u64,
    pub image_size: u32,
    /// Scale of the planted effect relative to unit noise.
    pub signal: f64,
    /// Fraction of decodable posts that receive a VGG annotation.
    pub annotation_rate: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { posts: 400, seed: 7, image_size: 12, signal: 1.5, annotation_rate: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticArchive {
    pub archive: PathBuf,
    pub images_dir: PathBuf,
    pub annotations: PathBuf,
    pub posts: usize,
}

const POPULAR_WORDS: [&str; 6] = ["cat", "friday", "pizza", "wholesome", "legend", "finally"];
const PLAIN_WORDS: [&str; 14] = [
    "monday", "work", "school", "homework", "teacher", "boss", "meeting", "traffic", "alarm", "exam", "email",
    "laundry", "rent", "deadline",
];
const FILLER: [&str; 16] = [
    "when",
    "you",
    "the",
    "my",
    "feeling",
    "time",
    "nobody",
    "literally",
    "brain",
    "friend",
    "phone",
    "coffee",
    "weekend",
    "sleep",
    "dog",
    "internet",
];
const ANIMAL_LABELS: [&str; 5] = ["tabby", "pug", "golden_retriever", "hamster", "koala"];
const OTHER_LABELS: [&str; 8] =
    ["web_site", "comic_book", "menu", "envelope", "basketball", "barbell", "ski", "racket"];
const UNCATEGORIZED: [&str; 10] =
    ["lampshade", "mailbox", "umbrella", "teapot", "sunglasses", "wig", "mask", "bow_tie", "toilet_tissue", "banana"];

enum Defect {
    None,
    Animated,
    DeadLink,
    MissingFile,
    Undecodable,
}

fn defect(i: usize) -> Defect {
    match i % 50 {
        7 => Defect::Animated,
        19 => Defect::DeadLink,
        31 => Defect::MissingFile,
        43 => Defect::Undecodable,
        _ => Defect::None,
    }
}

fn subscribers_of(sr: Subreddit) -> f64 {
    match sr {
        Subreddit::Memes => 9_000_000.0,
        Subreddit::MeIrl => 4_000_000.0,
        Subreddit::MemeEconomy => 1_000_000.0,
        Subreddit::DankMeme => 60_000.0,
        Subreddit::Dankmeme => 150_000.0,
    }
}

fn thumbnail(rng: &mut ChaCha8Rng, size: u32, warm: bool) -> image::RgbImage {
    let base: [f64; 3] = if warm { [220.0, 90.0, 40.0] } else { [50.0, 90.0, 200.0] };
    let jitter = Normal::new(0.0, 25.0).expect("valid sd");
    image::RgbImage::from_fn(size, size, |_, _| {
        let px = base.map(|c| (c + jitter.sample(rng)).clamp(0.0, 255.0) as u8);
        image::Rgb(px)
    })
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

/// Writes `archive.jsonl`, `images/`, and `annotations.csv` under `dir`.
pub fn write_synthetic_archive(dir: &Path, spec: &SyntheticSpec) -> Result<SyntheticArchive> {
    if spec.posts == 0 || spec.image_size == 0 {
        return Err(Error::config("synthetic archive needs at least one post and a non-empty image"));
    }
    let images_dir = dir.join("images");
    std::fs::create_dir_all(&images_dir).map_err(write_err(&images_dir))?;
    let archive = dir.join("archive.jsonl");
    let annotations = dir.join("annotations.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, 1.0).expect("valid sd");
    let mut lines = Vec::new();
    let mut ann = csv::Writer::from_writer(Vec::new());
    ann.write_record(["id", "label1", "prob1", "label2", "prob2", "label3", "prob3"])?;

    for i in 0..spec.posts {
        let id = format!("s{i:05}");
        let sr = *Subreddit::ALL.choose(&mut rng).expect("non-empty");
        let subscribers = (subscribers_of(sr) * rng.random_range(0.9..1.1)).round() as u64;
        let warm = rng.random_bool(0.5);
        let popular_word = rng.random_bool(0.4);
        let animal = rng.random_bool(0.35);
        let hour = rng.random_range(0..24);
        let created_utc = 1_546_300_800 + rng.random_range(0..365) * 86_400 + hour * 3_600;

        let mut words: Vec<&str> = (0..3).map(|_| *FILLER.choose(&mut rng).expect("non-empty")).collect();
        words.push(
            if popular_word { POPULAR_WORDS.choose(&mut rng) } else { PLAIN_WORDS.choose(&mut rng) }
                .expect("non-empty"),
        );
        words.push(PLAIN_WORDS.choose(&mut rng).expect("non-empty"));
        let title = words.join(" ");
        let text = rng.random_bool(0.7).then(|| {
            let w: Vec<&str> = (0..4).map(|_| *PLAIN_WORDS.choose(&mut rng).expect("non-empty")).collect();
            w.join(" ")
        });

        let evening = (17..23).contains(&hour);
        let z = spec.signal
            * (0.9 * warm as u8 as f64
                + 0.7 * popular_word as u8 as f64
                + 0.6 * animal as u8 as f64
                + 0.3 * evening as u8 as f64)
            + noise.sample(&mut rng);
        let ratio = 1e-4 * z.exp();
        let ups = (ratio * subscribers as f64).round().max(0.0) as u64;

        let kind = defect(i);
        let ext = if matches!(kind, Defect::Animated) { "gif" } else { "png" };
        let media = format!("https://i.example.org/{id}.{ext}");
        let img = thumbnail(&mut rng, spec.image_size, warm);
        let img_path = images_dir.join(format!("{id}.png"));
        match kind {
            Defect::MissingFile | Defect::Animated | Defect::DeadLink => {}
            Defect::Undecodable => std::fs::write(&img_path, b"not a png").map_err(write_err(&img_path))?,
            Defect::None => img.save(&img_path).map_err(|e| Error::data(format!("{}: {e}", img_path.display())))?,
        }

        if matches!(kind, Defect::None) && rng.random_bool(spec.annotation_rate) {
            let first =
                if animal { ANIMAL_LABELS.choose(&mut rng) } else { OTHER_LABELS.choose(&mut rng) }.expect("non-empty");
            let second = UNCATEGORIZED.choose(&mut rng).expect("non-empty");
            let mut third = UNCATEGORIZED.choose(&mut rng).expect("non-empty");
            while third == second {
                third = UNCATEGORIZED.choose(&mut rng).expect("non-empty");
            }
            let p1 = rng.random_range(0.4..0.9);
            let p2 = rng.random_range(0.0..(1.0 - p1) * 0.7);
            let p3 = rng.random_range(0.0..(1.0 - p1 - p2));
            ann.write_record([
                id.clone(),
                first.to_string(),
                format!("{p1:.4}"),
                second.to_string(),
                format!("{p2:.4}"),
                third.to_string(),
                format!("{p3:.4}"),
            ])?;
        }

        let record = json!({
            "id": id,
            "created_utc": created_utc,
            "ups": ups,
            "is_nsfw": rng.random_bool(0.05),
            "subreddit": sr.name(),
            "subscribers": subscribers,
            "thumbnail": { "height": spec.image_size, "width": spec.image_size },
            "title": title,
            "media": media,
            "text": text,
            "dead_link": matches!(kind, Defect::DeadLink),
        });
        lines.push(serde_json::to_string(&record)?);
    }

    let mut f = std::fs::File::create(&archive).map_err(write_err(&archive))?;
    for l in &lines {
        writeln!(f, "{l}").map_err(write_err(&archive))?;
    }
    let bytes = ann.into_inner().map_err(|e| Error::data(e.to_string()))?;
    std::fs::write(&annotations, bytes).map_err(write_err(&annotations))?;
    Ok(SyntheticArchive { archive, images_dir, annotations, posts: spec.posts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let spec = SyntheticSpec { posts: 60, ..SyntheticSpec::default() };
        let x = write_synthetic_archive(a.path(), &spec).unwrap();
        let y = write_synthetic_archive(b.path(), &spec).unwrap();
        assert_eq!(std::fs::read(x.archive).unwrap(), std::fs::read(y.archive).unwrap());
        assert_eq!(std::fs::read(x.annotations).unwrap(), std::fs::read(y.annotations).unwrap());
        let img = "images/s00003.png";
        assert_eq!(std::fs::read(a.path().join(img)).unwrap(), std::fs::read(b.path().join(img)).unwrap());
    }

    #[test]
    fn archive_parses_with_default_schema() {
        let dir = tempfile::tempdir().unwrap();
        let out = write_synthetic_archive(dir.path(), &SyntheticSpec { posts: 100, ..Default::default() }).unwrap();
        let parsed =
            crate::corpus::parse_records(std::fs::File::open(out.archive).unwrap(), &Default::default()).unwrap();
        assert!(parsed.errors.is_empty(), "{:?}", parsed.errors);
        assert_eq!(parsed.posts.len(), 100);
        assert_eq!(crate::corpus::clean_records(parsed.posts).len(), 96);
        let anns = crate::image::load_annotations(&out.annotations).unwrap();
        assert!(!anns.is_empty());
    }
}
