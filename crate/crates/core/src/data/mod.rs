//! Images, masks, manifests and the geometric preprocessing shared by the
//! feature extractors.

mod image;
mod manifest;
pub mod pgm;

pub use self::image::{
    binarize, crop_to_roi, extract_patches, normalize_image, resize_or_pad, Image2D, RoiMask,
};
pub use self::manifest::{load_manifest, write_manifest, Dataset, SampleRecord, Stage, Subtype};
