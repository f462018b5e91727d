use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureRegistry;
use crate::learn::{LabeledDataset, Matrix};
use crate::text::Vocabulary;

pub const FEATURES_FORMAT: &str = "memepop-features";
pub const FEATURES_VERSION: u32 = 1;
pub const FEATURES_FILE: &str = "features.csv";
pub const MANIFEST_FILE: &str = "features.manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub id: String,
    pub reason: String,
}

/// Describes the columns of `features.csv` and how they were built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureManifest {
    pub format: String,
    pub version: u32,
    pub registry: FeatureRegistry,
    pub vocabulary: Vocabulary,
    pub vocabulary_warning: Option<String>,
    pub vgg_standalone: Vec<String>,
    /// False when no record had an annotation and the VGG columns were dropped.
    pub vgg_included: bool,
    pub vgg_missing: usize,
    pub records: usize,
    pub positives: usize,
    pub excluded: Vec<Exclusion>,
}

pub fn write_features(dir: &Path, manifest: &FeatureManifest, data: &LabeledDataset) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(FEATURES_FILE);
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let mut header = vec!["id".to_string(), "dank".to_string()];
    header.extend(data.registry.names().map(String::from));
    w.write_record(&header)?;
    for r in 0..data.len() {
        let mut rec = vec![data.ids[r].clone(), data.labels[r].to_string()];
        rec.extend(data.features.row(r).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    let mpath = dir.join(MANIFEST_FILE);
    std::fs::write(&mpath, serde_json::to_string_pretty(manifest)?).map_err(|e| Error::io(&mpath, e))
}

pub fn read_manifest(dir: &Path) -> Result<FeatureManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let m: FeatureManifest = serde_json::from_str(&text)?;
    if m.format != FEATURES_FORMAT || m.version != FEATURES_VERSION {
        return Err(Error::data(format!(
            "{}: unsupported feature manifest `{}` version {}",
            path.display(),
            m.format,
            m.version
        )));
    }
    Ok(m)
}

/// Loads `features.csv` and checks its header against the manifest.
pub fn read_features(dir: &Path) -> Result<(FeatureManifest, LabeledDataset)> {
    let manifest = read_manifest(dir)?;
    let path = dir.join(FEATURES_FILE);
    let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut rdr = csv::Reader::from_reader(std::io::BufReader::new(file));
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("id") || header.get(1) != Some("dank") {
        return Err(Error::data(format!("{}: header must start with id,dank", path.display())));
    }
    manifest.registry.check_names(header.iter().skip(2))?;
    let p = manifest.registry.len();
    let (mut ids, mut labels, mut values) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        ids.push(rec[0].to_string());
        labels.push(match &rec[1] {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::data(format!("{} line {line}: label `{other}`", path.display()))),
        });
        for v in rec.iter().skip(2) {
            values.push(v.parse::<f64>().map_err(|e| Error::data(format!("{} line {line}: {e}", path.display())))?);
        }
    }
    let features = Matrix::new(ids.len(), p, values)?;
    let data = LabeledDataset::new(manifest.registry.clone(), ids, features, labels)?;
    Ok((manifest, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::Block;

    #[test]
    fn round_trip_exact() {
        let registry = FeatureRegistry::from_names(&["a".into(), "b".into()], Block::Text).unwrap();
        let data = LabeledDataset::new(
            registry.clone(),
            vec!["x".into(), "y,z".into()],
            Matrix::from_rows(&[vec![0.1 + 0.2, 1e-300], vec![-3.5, 12345.678901234567]]).unwrap(),
            vec![1, 0],
        )
        .unwrap();
        let manifest = FeatureManifest {
            format: FEATURES_FORMAT.into(),
            version: FEATURES_VERSION,
            registry,
            vocabulary: Vocabulary::from_stems(["meme"]),
            vocabulary_warning: None,
            vgg_standalone: vec![],
            vgg_included: false,
            vgg_missing: 2,
            records: 2,
            positives: 1,
            excluded: vec![Exclusion { id: "q".into(), reason: "undecodable".into() }],
        };
        let dir = tempfile::tempdir().unwrap();
        write_features(dir.path(), &manifest, &data).unwrap();
        let (m2, d2) = read_features(dir.path()).unwrap();
        assert_eq!(m2, manifest);
        assert_eq!(d2, data);
    }
}
