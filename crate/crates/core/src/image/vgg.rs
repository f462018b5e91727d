use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_MAP: &str = include_str!("../../config/vgg_categories.toml");

pub const VGG_CATEGORY_COUNT: usize = 9;
pub const VGG_STANDALONE_COUNT: usize = 8;
pub const VGG_TOP_K: usize = 3;
pub const VGG_BLOCK_LEN: usize = VGG_CATEGORY_COUNT + VGG_STANDALONE_COUNT + VGG_TOP_K;

/// Lowercases and maps spaces and hyphens to `_`, so `"Gas Mask"` and
/// `"gas-mask"` both become `gas_mask`.
pub fn normalize_label(label: &str) -> String {
    label.trim().chars().map(|c| if c == ' ' || c == '-' { '_' } else { c }).flat_map(char::to_lowercase).collect()
}

/// Top-3 classifier guesses for one image, most probable first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VggAnnotation {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl VggAnnotation {
    pub fn new<S: AsRef<str>>(labels: &[S], probs: &[f64]) -> Result<Self> {
        if labels.len() != VGG_TOP_K || probs.len() != VGG_TOP_K {
            return Err(Error::data(format!(
                "annotation needs {VGG_TOP_K} labels and probabilities, got {} and {}",
                labels.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::data(format!("annotation probability {p} outside [0, 1]")));
        }
        let mut pairs: Vec<(String, f64)> =
            labels.iter().map(|l| normalize_label(l.as_ref())).zip(probs.iter().copied()).collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (labels, probs) = pairs.into_iter().unzip();
        Ok(VggAnnotation { labels, probs })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VggCategory {
    pub name: String,
    pub labels: BTreeSet<String>,
}

/// The nine content categories plus the standalone label columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VggCategoryMap {
    categories: Vec<VggCategory>,
    standalone: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    #[serde(default)]
    standalone: Vec<String>,
    category: Vec<CategoryFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    name: String,
    labels: Vec<String>,
}

impl VggCategoryMap {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: MapFile = toml::from_str(s).map_err(|e| Error::config(format!("vgg categories: {e}")))?;
        if file.category.len() != VGG_CATEGORY_COUNT {
            return Err(Error::config(format!(
                "vgg category map has {} categories, expected {VGG_CATEGORY_COUNT}",
                file.category.len()
            )));
        }
        let mut names = BTreeSet::new();
        let categories = file
            .category
            .into_iter()
            .map(|c| {
                if !names.insert(c.name.clone()) {
                    return Err(Error::config(format!("duplicate vgg category `{}`", c.name)));
                }
                Ok(VggCategory { name: c.name, labels: c.labels.iter().map(|l| normalize_label(l)).collect() })
            })
            .collect::<Result<Vec<_>>>()?;
        let map = VggCategoryMap { categories, standalone: Vec::new() };
        if file.standalone.is_empty() {
            Ok(map)
        } else {
            map.with_standalone(file.standalone)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn categories(&self) -> &[VggCategory] {
        &self.categories
    }

    pub fn standalone(&self) -> &[String] {
        &self.standalone
    }

    /// True once the standalone list holds its full complement of labels.
    pub fn is_resolved(&self) -> bool {
        self.standalone.len() == VGG_STANDALONE_COUNT
    }

    pub fn with_standalone(mut self, labels: Vec<String>) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|l| normalize_label(l)).collect();
        if labels.len() != VGG_STANDALONE_COUNT {
            return Err(Error::config(format!(
                "expected {VGG_STANDALONE_COUNT} standalone vgg labels, got {}",
                labels.len()
            )));
        }
        let unique: BTreeSet<_> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(Error::config("standalone vgg labels must be unique"));
        }
        self.standalone = labels;
        Ok(self)
    }

    /// Fills an empty standalone list from annotation frequencies.
    pub fn resolve<'a>(self, annotations: impl IntoIterator<Item = &'a VggAnnotation>) -> Result<Self> {
        if self.is_resolved() {
            return Ok(self);
        }
        let labels = derive_standalone(&self, annotations, VGG_STANDALONE_COUNT);
        self.with_standalone(labels)
    }

    pub fn category_of(&self, label: &str) -> Option<&str> {
        self.categories.iter().find(|c| c.labels.contains(label)).map(|c| c.name.as_str())
    }

    pub fn feature_names(&self) -> Result<Vec<String>> {
        if !self.is_resolved() {
            return Err(Error::config("standalone vgg labels have not been resolved"));
        }
        let mut names: Vec<String> = self.categories.iter().map(|c| format!("image.vgg.cat.{}", c.name)).collect();
        names.extend(self.standalone.iter().map(|l| format!("image.vgg.label.{l}")));
        names.extend((1..=VGG_TOP_K).map(|i| format!("image.vgg.prob{i}")));
        Ok(names)
    }
}

impl Default for VggCategoryMap {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_MAP).expect("bundled vgg category map parses")
    }
}

/// The `k` most frequent labels that belong to no category, counting every
/// position of every annotation. Ties break lexicographically; a short
/// list is padded with `unused_<i>` placeholders that never match.
pub fn derive_standalone<'a>(
    map: &VggCategoryMap,
    annotations: impl IntoIterator<Item = &'a VggAnnotation>,
    k: usize,
) -> Vec<String> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for a in annotations {
        for l in a.labels() {
            if map.category_of(l).is_none() {
                *counts.entry(l.as_str()).or_default() += 1;
            }
        }
    }
    let mut ranked: Vec<_> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut out: Vec<String> = ranked.into_iter().take(k).map(|(l, _)| l.to_string()).collect();
    let mut i = 0;
    while out.len() < k {
        let placeholder = format!("unused_{i}");
        if !out.contains(&placeholder) {
            out.push(placeholder);
        }
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VggBlock {
    pub values: Vec<f64>,
    pub missing: bool,
}

/// `[9 category flags | 8 standalone flags | 3 probabilities]`. A missing
/// annotation yields zeros and sets `missing`.
pub fn vgg_feature_block(annotation: Option<&VggAnnotation>, map: &VggCategoryMap) -> Result<VggBlock> {
    if !map.is_resolved() {
        return Err(Error::config("standalone vgg labels have not been resolved"));
    }
    let Some(a) = annotation else {
        return Ok(VggBlock { values: vec![0.0; VGG_BLOCK_LEN], missing: true });
    };
    let mut values = Vec::with_capacity(VGG_BLOCK_LEN);
    for c in &map.categories {
        values.push(if a.labels.iter().any(|l| c.labels.contains(l)) { 1.0 } else { 0.0 });
    }
    for s in &map.standalone {
        values.push(if a.labels.contains(s) { 1.0 } else { 0.0 });
    }
    values.extend_from_slice(&a.probs);
    Ok(VggBlock { values, missing: false })
}

/// Reads `post_id, label1, p1, label2, p2, label3, p3` rows. A first row
/// whose `p1` is not numeric is treated as a header.
pub fn read_annotations<R: Read>(reader: R, delimiter: u8) -> Result<HashMap<String, VggAnnotation>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 1;
        if rec.len() != 7 {
            return Err(Error::data(format!("annotation line {line}: expected 7 fields, got {}", rec.len())));
        }
        let probs: std::result::Result<Vec<f64>, _> = [2, 4, 6].iter().map(|&j| rec[j].parse::<f64>()).collect();
        let probs = match probs {
            Ok(p) => p,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::data(format!("annotation line {line}: {e}"))),
        };
        let labels = [&rec[1], &rec[3], &rec[5]];
        let ann =
            VggAnnotation::new(&labels, &probs).map_err(|e| Error::data(format!("annotation line {line}: {e}")))?;
        if out.insert(rec[0].to_string(), ann).is_some() {
            return Err(Error::data(format!("annotation line {line}: duplicate post id `{}`", &rec[0])));
        }
    }
    Ok(out)
}

pub fn load_annotations(path: &Path) -> Result<HashMap<String, VggAnnotation>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let delimiter = if path.extension().is_some_and(|e| e == "tsv") { b'\t' } else { b',' };
    read_annotations(file, delimiter)
}
