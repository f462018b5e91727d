//! Named, ordered feature columns shared by the extractors and the learners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which extractor produced a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    Text,
    Image,
    Metadata,
}

impl Block {
    pub fn as_str(self) -> &'static str {
        match self {
            Block::Text => "text",
            Block::Image => "image",
            Block::Metadata => "metadata",
        }
    }
}

impl std::str::FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Block::Text),
            "image" => Ok(Block::Image),
            "metadata" => Ok(Block::Metadata),
            other => Err(Error::config(format!("unknown feature block `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub block: Block,
}

/// Ordered list of column names with their block tags.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRegistry {
    columns: Vec<FeatureSpec>,
}

impl FeatureRegistry {
    pub fn new(columns: Vec<FeatureSpec>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::config(format!("duplicate feature column `{}`", c.name)));
            }
        }
        Ok(Self { columns })
    }

    pub fn from_names(names: &[String], block: Block) -> Result<Self> {
        Self::new(names.iter().map(|n| FeatureSpec { name: n.clone(), block }).collect())
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[FeatureSpec] {
        &self.columns
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn block_count(&self, block: Block) -> usize {
        self.columns.iter().filter(|c| c.block == block).count()
    }

    /// Indices of the columns whose block is in `blocks`, in registry order.
    pub fn indices_of(&self, blocks: &[Block]) -> Vec<usize> {
        self.columns.iter().enumerate().filter(|(_, c)| blocks.contains(&c.block)).map(|(i, _)| i).collect()
    }

    pub fn select(&self, indices: &[usize]) -> FeatureRegistry {
        FeatureRegistry { columns: indices.iter().map(|&i| self.columns[i].clone()).collect() }
    }

    pub fn concat(&self, other: &FeatureRegistry) -> Result<FeatureRegistry> {
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        FeatureRegistry::new(columns)
    }

    /// Checks that `names` matches this registry column for column.
    pub fn check_names<'a, I>(&self, names: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut names = names.into_iter();
        for (index, expected) in self.columns.iter().enumerate() {
            match names.next() {
                Some(found) if found == expected.name => {}
                Some(found) => {
                    return Err(Error::RegistryMismatch {
                        index,
                        expected: expected.name.clone(),
                        found: found.to_string(),
                    })
                }
                None => {
                    return Err(Error::RegistryMismatch {
                        index,
                        expected: expected.name.clone(),
                        found: "<missing>".into(),
                    })
                }
            }
        }
        if let Some(extra) = names.next() {
            return Err(Error::RegistryMismatch {
                index: self.columns.len(),
                expected: "<end of registry>".into(),
                found: extra.to_string(),
            });
        }
        Ok(())
    }
}

/// One record's feature values paired with their column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn with_capacity(n: usize) -> Self {
        Self { names: Vec::with_capacity(n), values: Vec::with_capacity(n) }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.names.push(name.into());
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn extend(&mut self, other: FeatureVector) {
        self.names.extend(other.names);
        self.values.extend(other.values);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg(names: &[&str]) -> FeatureRegistry {
        FeatureRegistry::from_names(&names.iter().map(|s| s.to_string()).collect::<Vec<_>>(), Block::Text).unwrap()
    }

    #[test]
    fn duplicate_names_rejected() {
        let names = vec!["a".to_string(), "a".to_string()];
        assert!(FeatureRegistry::from_names(&names, Block::Image).is_err());
    }

    #[test]
    fn check_names_reports_first_mismatch() {
        let r = reg(&["a", "b", "c"]);
        assert!(r.check_names(["a", "b", "c"]).is_ok());
        match r.check_names(["a", "x", "c"]) {
            Err(Error::RegistryMismatch { index, found, .. }) => {
                assert_eq!(index, 1);
                assert_eq!(found, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(r.check_names(["a", "b"]).is_err());
        assert!(r.check_names(["a", "b", "c", "d"]).is_err());
    }
}
