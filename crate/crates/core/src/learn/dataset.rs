use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Block, FeatureRegistry};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::data(format!("{rows}x{cols} matrix needs {} values, got {}", rows * cols, data.len())));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite value at row {}, column {}",
                i / cols.max(1),
                i % cols.max(1)
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::data(format!("row {r} has {} values, expected {cols}", rows[r].len())));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn take_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn take_cols(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(idx.iter().map(|&c| row[c]));
        }
        Matrix { rows: self.rows, cols: idx.len(), data }
    }
}

/// Feature matrix with binary labels, record ids, and column registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub registry: FeatureRegistry,
    pub ids: Vec<String>,
    pub features: Matrix,
    pub labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(registry: FeatureRegistry, ids: Vec<String>, features: Matrix, labels: Vec<u8>) -> Result<Self> {
        if features.rows() != labels.len() || ids.len() != labels.len() {
            return Err(Error::data(format!(
                "dataset has {} rows, {} labels, {} ids",
                features.rows(),
                labels.len(),
                ids.len()
            )));
        }
        if features.cols() != registry.len() {
            return Err(Error::data(format!(
                "dataset has {} columns but the registry names {}",
                features.cols(),
                registry.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::data(format!("label at row {i} is {}, expected 0 or 1", labels[i])));
        }
        Ok(LabeledDataset { registry, ids, features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    /// `(negatives, positives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let p = self.positives();
        (self.len() - p, p)
    }

    pub fn require_both_classes(&self) -> Result<()> {
        let (neg, pos) = self.class_counts();
        if neg == 0 || pos == 0 {
            return Err(Error::data(format!("both classes required, got {pos} positive and {neg} negative rows")));
        }
        Ok(())
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            registry: self.registry.clone(),
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            features: self.features.take_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> LabeledDataset {
        LabeledDataset {
            registry: self.registry.select(cols),
            ids: self.ids.clone(),
            features: self.features.take_cols(cols),
            labels: self.labels.clone(),
        }
    }

    /// Keeps only the columns tagged with one of `blocks`.
    pub fn select_blocks(&self, blocks: &[Block]) -> Result<LabeledDataset> {
        let cols = self.registry.indices_of(blocks);
        for b in blocks {
            if self.registry.block_count(*b) == 0 {
                return Err(Error::config(format!("dataset has no `{}` columns", b.as_str())));
            }
        }
        Ok(self.select_columns(&cols))
    }
}
