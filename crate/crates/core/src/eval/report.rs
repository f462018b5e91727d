use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::metrics::{auc, classification_metrics, roc_points, ClassificationMetrics, RocPoint};
use crate::error::{Error, Result};
use crate::features::Block;
use crate::learn::{Importances, LabeledDataset, TrainConfig};

pub const REPORT_FORMAT: &str = "memepop-report";
pub const REPORT_VERSION: u32 = 1;

/// Identifies the exact rows a report was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub rows: usize,
    pub positives: usize,
    /// SHA-256 over the ordered `(id, label)` pairs.
    pub checksum: String,
}

impl Fingerprint {
    pub fn of(ids: &[String], labels: &[u8]) -> Self {
        let mut h = Sha256::new();
        for (id, y) in ids.iter().zip(labels) {
            h.update(id.as_bytes());
            h.update([0u8, *y, b'\n']);
        }
        let digest = h.finalize();
        Fingerprint {
            rows: labels.len(),
            positives: labels.iter().filter(|&&y| y == 1).count(),
            checksum: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }

    pub fn of_dataset(d: &LabeledDataset) -> Self {
        Self::of(&d.ids, &d.labels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum ThresholdPolicy {
    Fixed {
        threshold: f64,
    },
    /// Threshold maximizing F1 on a stratified validation slice of the
    /// training rows.
    TunedF1 {
        validation_fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format: String,
    pub version: u32,
    pub experiment: String,
    /// `forest`, `boost`, or `external`.
    pub model: String,
    pub blocks: Vec<Block>,
    pub n_features: usize,
    pub auc: f64,
    pub metrics: ClassificationMetrics,
    pub threshold_policy: ThresholdPolicy,
    pub roc: Vec<RocPoint>,
    pub importances: Option<Importances>,
    pub config: Option<TrainConfig>,
    pub train_fingerprint: Option<Fingerprint>,
    pub test_fingerprint: Fingerprint,
    /// Caveats such as `distribution_shifted` or `external`.
    pub flags: Vec<String>,
}

impl EvalReport {
    /// Scores `scores` against `labels`; the caller fills in model details.
    pub fn from_scores(
        experiment: &str,
        model: &str,
        ids: &[String],
        labels: &[u8],
        scores: &[f64],
        threshold: f64,
        policy: ThresholdPolicy,
    ) -> Result<Self> {
        Ok(EvalReport {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            experiment: experiment.into(),
            model: model.into(),
            blocks: Vec::new(),
            n_features: 0,
            auc: auc(scores, labels)?,
            metrics: classification_metrics(scores, labels, threshold)?,
            threshold_policy: policy,
            roc: roc_points(scores, labels)?,
            importances: None,
            config: None,
            train_fingerprint: None,
            test_fingerprint: Fingerprint::of(ids, labels),
            flags: Vec::new(),
        })
    }

    /// Checks metric ranges, ROC shape, and confusion totals.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::data(format!("report `{}`: {m}", self.experiment)));
        let m = &self.metrics;
        let in_unit = |v: Option<f64>| v.is_none_or(|x| (0.0..=1.0).contains(&x));
        if !(0.0..=1.0).contains(&self.auc)
            || ![m.accuracy, m.precision, m.recall, m.f1].iter().all(|x| in_unit(x.value()))
        {
            return bad("metric outside [0, 1]");
        }
        if m.confusion.total() as usize != self.test_fingerprint.rows {
            return bad("confusion counts do not sum to the test size");
        }
        let (first, last) = (self.roc.first(), self.roc.last());
        if first != Some(&RocPoint { fpr: 0.0, tpr: 0.0 }) || last != Some(&RocPoint { fpr: 1.0, tpr: 1.0 }) {
            return bad("ROC curve must run from (0, 0) to (1, 1)");
        }
        if self.roc.windows(2).any(|w| w[1].fpr < w[0].fpr || w[1].tpr < w[0].tpr) {
            return bad("ROC curve is not monotone");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: EvalReport = serde_json::from_str(text)?;
        if r.format != REPORT_FORMAT || r.version != REPORT_VERSION {
            return Err(Error::data(format!("unsupported report format `{}` version {}", r.format, r.version)));
        }
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Files written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub report: PathBuf,
    pub roc: PathBuf,
    pub importances: Option<PathBuf>,
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `<stem>.report.json`, `<stem>.roc.csv`, and, when the report has
/// importances, `<stem>.importances.csv` (largest first) into `dir`.
pub fn emit_report(report: &EvalReport, dir: &Path, stem: &str) -> Result<ReportFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ReportFiles {
        report: dir.join(format!("{stem}.report.json")),
        roc: dir.join(format!("{stem}.roc.csv")),
        importances: report.importances.as_ref().map(|_| dir.join(format!("{stem}.importances.csv"))),
    };
    write(&files.report, report.to_json()?.as_bytes())?;

    let mut roc = csv::Writer::from_writer(Vec::new());
    roc.write_record(["fpr", "tpr"])?;
    for p in &report.roc {
        roc.write_record([p.fpr.to_string(), p.tpr.to_string()])?;
    }
    write(&files.roc, &roc.into_inner().map_err(|e| Error::data(e.to_string()))?)?;

    if let (Some(imp), Some(path)) = (&report.importances, &files.importances) {
        write(path, &importance_table(imp)?)?;
    }
    Ok(files)
}

pub fn importance_table(imp: &Importances) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["feature", "importance"])?;
    for (name, v) in imp.ranked() {
        w.write_record([name, v.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::data(e.to_string()))
}

/// Mean of each `image.color.*` column over dank and non-dank rows, as
/// `(color, dank_mean, other_mean)` in registry order.
pub fn color_profile_means(data: &LabeledDataset) -> Vec<(String, f64, f64)> {
    let cols: Vec<(usize, String)> = data
        .registry
        .names()
        .enumerate()
        .filter_map(|(i, n)| n.strip_prefix("image.color.").map(|c| (i, c.to_string())))
        .collect();
    let (neg, pos) = data.class_counts();
    cols.into_iter()
        .map(|(c, name)| {
            let (mut s1, mut s0) = (0.0, 0.0);
            for r in 0..data.len() {
                let v = data.features.get(r, c);
                if data.labels[r] == 1 {
                    s1 += v;
                } else {
                    s0 += v;
                }
            }
            let mean = |s: f64, n: usize| if n == 0 { 0.0 } else { s / n as f64 };
            (name, mean(s1, pos), mean(s0, neg))
        })
        .collect()
}

pub fn color_means_table(means: &[(String, f64, f64)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["color", "dank_mean", "other_mean"])?;
    for (c, a, b) in means {
        w.write_record([c.clone(), a.to_string(), b.to_string()])?;
    }
    w.into_inner().map_err(|e| Error::data(e.to_string()))
}

/// Reads `post_id, score` rows; a first row with a non-numeric score is a
/// header.
pub fn read_scores<R: Read>(reader: R, delimiter: u8) -> Result<HashMap<String, f64>> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(false).delimiter(delimiter).trim(csv::Trim::All).from_reader(reader);
    let mut out = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::data(format!("score line {}: expected 2 fields, got {}", i + 1, rec.len())));
        }
        let score = match rec[1].parse::<f64>() {
            Ok(s) => s,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::data(format!("score line {}: {e}", i + 1))),
        };
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::data(format!("score line {}: {score} outside [0, 1]", i + 1)));
        }
        if out.insert(rec[0].to_string(), score).is_some() {
            return Err(Error::data(format!("score line {}: duplicate id `{}`", i + 1, &rec[0])));
        }
    }
    Ok(out)
}

pub fn load_scores(path: &Path) -> Result<HashMap<String, f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let delimiter = if path.extension().is_some_and(|e| e == "tsv") { b'\t' } else { b',' };
    read_scores(file, delimiter)
}

/// Scores produced outside this crate, matched to `test` by id.
pub fn evaluate_external_scores(
    scores: &HashMap<String, f64>,
    test: &LabeledDataset,
    threshold: f64,
) -> Result<EvalReport> {
    let missing: Vec<&str> = test.ids.iter().filter(|id| !scores.contains_key(*id)).map(String::as_str).collect();
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(10).copied().collect();
        return Err(Error::data(format!(
            "{} test ids have no external score; first missing: {}",
            missing.len(),
            shown.join(", ")
        )));
    }
    let s: Vec<f64> = test.ids.iter().map(|id| scores[id]).collect();
    let mut r = EvalReport::from_scores(
        "external",
        "external",
        &test.ids,
        &test.labels,
        &s,
        threshold,
        ThresholdPolicy::Fixed { threshold },
    )?;
    r.flags.push("external".into());
    Ok(r)
}
