pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod image;
pub mod learn;
pub mod pipeline;
pub mod synthetic;
pub mod text;

pub use error::{Error, ErrorKind, Result};
pub use features::{Block, FeatureRegistry, FeatureSpec, FeatureVector};
