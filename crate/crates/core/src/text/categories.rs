use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

const DEFAULT_TABLE: &str = include_str!("../../config/word_categories.toml");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCategory {
    pub name: String,
    pub stems: BTreeSet<String>,
}

/// Named groups of stems, each encoded as one presence flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCategoryTable {
    categories: Vec<WordCategory>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    category: Vec<CategoryFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    name: String,
    stems: Vec<String>,
}

impl WordCategoryTable {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: TableFile = toml::from_str(s).map_err(|e| Error::config(format!("word categories: {e}")))?;
        let mut names = BTreeSet::new();
        let categories = file
            .category
            .into_iter()
            .map(|c| {
                if !names.insert(c.name.clone()) {
                    return Err(Error::config(format!("duplicate word category `{}`", c.name)));
                }
                Ok(WordCategory { name: c.name, stems: c.stems.into_iter().collect() })
            })
            .collect::<Result<Vec<_>>>()?;
        if categories.is_empty() {
            return Err(Error::config("word category table is empty"));
        }
        Ok(WordCategoryTable { categories })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn categories(&self) -> &[WordCategory] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn contains_stem(&self, stem: &str) -> bool {
        self.categories.iter().any(|c| c.stems.contains(stem))
    }
}

impl Default for WordCategoryTable {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_TABLE).expect("bundled word categories parse")
    }
}

/// Flag per category: 1 when any stem belongs to it.
pub fn word_category_flags(stems: &[String], table: &WordCategoryTable) -> Vec<u8> {
    table.categories.iter().map(|c| u8::from(stems.iter().any(|s| c.stems.contains(s)))).collect()
}
