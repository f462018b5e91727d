//! The canonical corpus file: a versioned header line followed by one
//! labeled post per line.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::post::LabeledPost;
use crate::error::{Error, Result};

pub const CORPUS_FORMAT: &str = "memepop-corpus";
pub const CORPUS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusHeader {
    pub format: String,
    pub schema_version: u32,
    pub label_quantile: f64,
    pub label_threshold: f64,
    pub records: usize,
}

impl CorpusHeader {
    pub fn new(label_quantile: f64, label_threshold: f64, records: usize) -> Self {
        CorpusHeader {
            format: CORPUS_FORMAT.into(),
            schema_version: CORPUS_SCHEMA_VERSION,
            label_quantile,
            label_threshold,
            records,
        }
    }
}

pub fn write_corpus<W: Write>(mut out: W, header: &CorpusHeader, posts: &[LabeledPost]) -> Result<()> {
    let io = |e| Error::io("<corpus>", e);
    serde_json::to_writer(&mut out, header)?;
    out.write_all(b"\n").map_err(io)?;
    for p in posts {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_corpus<R: Read>(input: R) -> Result<(CorpusHeader, Vec<LabeledPost>)> {
    let mut lines = BufReader::new(input).lines();
    let first =
        lines.next().ok_or_else(|| Error::data("corpus file is empty"))?.map_err(|e| Error::io("<corpus>", e))?;
    let header: CorpusHeader = serde_json::from_str(&first).map_err(|e| Error::data(format!("corpus header: {e}")))?;
    if header.format != CORPUS_FORMAT {
        return Err(Error::data(format!("not a corpus file (format `{}`)", header.format)));
    }
    if header.schema_version != CORPUS_SCHEMA_VERSION {
        return Err(Error::data(format!("unsupported corpus schema version {}", header.schema_version)));
    }
    let mut posts = Vec::with_capacity(header.records);
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io("<corpus>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: LabeledPost =
            serde_json::from_str(&line).map_err(|e| Error::data(format!("corpus line {}: {e}", i + 2)))?;
        posts.push(p);
    }
    if posts.len() != header.records {
        return Err(Error::data(format!("corpus header declares {} records, found {}", header.records, posts.len())));
    }
    Ok((header, posts))
}
