//! Color and object-content features of meme images.

mod encode;
mod hsv;
mod palette;
mod raster;
mod vgg;

pub use encode::{encode_image_features, image_feature_names, ImageConfig, ImageFeatures, IMAGE_FEATURE_COUNT};
pub use hsv::{hsv_to_rgb, rgb_to_hsv, Hsv};
pub use palette::{color_fraction, color_profile, ColorEntry, ColorPalette, PALETTE_SIZE};
pub use raster::{average_hsv, RasterImage};
pub use vgg::{
    derive_standalone, load_annotations, normalize_label, read_annotations, vgg_feature_block, VggAnnotation, VggBlock,
    VggCategory, VggCategoryMap, VGG_BLOCK_LEN, VGG_CATEGORY_COUNT, VGG_STANDALONE_COUNT, VGG_TOP_K,
};
