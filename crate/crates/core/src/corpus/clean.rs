use super::post::MemePost;

/// File extensions of static images kept by [`clean_records`].
pub const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "bmp", "webp"];

/// True when `media_ref` names a static image by extension. Query strings
/// and fragments are ignored.
pub fn is_static_image(media_ref: &str) -> bool {
    let path = media_ref.split(['?', '#']).next().unwrap_or("");
    let file = path.rsplit('/').next().unwrap_or("");
    match file.rsplit_once('.') {
        Some((stem, ext)) if !stem.is_empty() => {
            let ext = ext.to_ascii_lowercase();
            IMAGE_EXTENSIONS.contains(&ext.as_str())
        }
        _ => false,
    }
}

/// Drops dead links and anything that is not a static image.
pub fn clean_records(posts: Vec<MemePost>) -> Vec<MemePost> {
    posts.into_iter().filter(|p| !p.dead_link && is_static_image(&p.media_ref)).collect()
}
