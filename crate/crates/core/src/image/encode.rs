use super::palette::{color_profile, ColorPalette, PALETTE_SIZE};
use super::raster::{average_hsv, RasterImage};
use super::vgg::{vgg_feature_block, VggAnnotation, VggCategoryMap, VGG_BLOCK_LEN};
use crate::error::Result;
use crate::features::FeatureVector;

pub const IMAGE_FEATURE_COUNT: usize = PALETTE_SIZE + 3 + VGG_BLOCK_LEN;

#[derive(Debug, Clone, Default)]
pub struct ImageConfig {
    pub palette: ColorPalette,
    pub vgg: VggCategoryMap,
}

pub fn image_feature_names(config: &ImageConfig) -> Result<Vec<String>> {
    let mut names = config.palette.names();
    names.extend(["image.avg_h", "image.avg_s", "image.avg_v"].map(String::from));
    names.extend(config.vgg.feature_names()?);
    Ok(names)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageFeatures {
    pub vector: FeatureVector,
    pub vgg_missing: bool,
}

/// `[30 color fractions | avg H, S, V | 20 vgg columns]`.
pub fn encode_image_features(
    img: &RasterImage,
    annotation: Option<&VggAnnotation>,
    config: &ImageConfig,
) -> Result<ImageFeatures> {
    let names = image_feature_names(config)?;
    let hsv = average_hsv(img)?;
    let block = vgg_feature_block(annotation, &config.vgg)?;
    let mut values = color_profile(img, &config.palette).values;
    values.extend([hsv.h, hsv.s, hsv.v]);
    values.extend(block.values);
    debug_assert_eq!(values.len(), IMAGE_FEATURE_COUNT);
    Ok(ImageFeatures { vector: FeatureVector { names, values }, vgg_missing: block.missing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ImageConfig {
        let vgg = VggCategoryMap::default().with_standalone((0..8).map(|i| format!("l{i}")).collect()).unwrap();
        ImageConfig { palette: ColorPalette::default(), vgg }
    }

    #[test]
    fn solid_black_missing_annotation() {
        let cfg = config();
        let f = encode_image_features(&RasterImage::solid(4, 3, [0, 0, 0]), None, &cfg).unwrap();
        assert_eq!(f.vector.len(), 53);
        assert!(f.vgg_missing);
        assert_eq!(f.vector.get("image.color.pure-black"), Some(1.0));
        assert_eq!(f.vector.get("image.avg_v"), Some(0.0));
        assert!(f.vector.values[33..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_and_named() {
        let cfg = config();
        let px: Vec<[u8; 3]> = (0..30u8).map(|i| [i * 8, 255 - i * 8, i * 3]).collect();
        let img = RasterImage::new(6, 5, px).unwrap();
        let ann = VggAnnotation::new(&["pug", "l3", "menu"], &[0.6, 0.3, 0.1]).unwrap();
        let a = encode_image_features(&img, Some(&ann), &cfg).unwrap();
        let b = encode_image_features(&img.clone(), Some(&ann), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.vector.names, image_feature_names(&cfg).unwrap());
        assert_eq!(a.vector.get("image.vgg.cat.animals"), Some(1.0));
        assert_eq!(a.vector.get("image.vgg.label.l3"), Some(1.0));
    }

    #[test]
    fn empty_image_rejected() {
        let img = RasterImage::new(0, 0, vec![]).unwrap();
        assert!(encode_image_features(&img, None, &config()).is_err());
    }
}
