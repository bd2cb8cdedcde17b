//! Data augmentation for uncompressed images (resize, random crop,
//! left-right flip) and the restricted set that is safe after compression
//! (crops on block boundaries, block-column reversal).
//!
//! Random draws happen in a fixed order per image: crop top, crop left,
//! then one flip coin. The coin is always drawn, even when `flip_prob` is 0.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compressors::resample;
use crate::error::{Error, Result};
use crate::image::{Image, PlaneMap, Sample};
use crate::lcio::CompressedImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    pub resize_to: usize,
    pub crop_to: usize,
    pub flip_prob: f64,
}

impl AugmentParams {
    pub fn validate(&self) -> Result<()> {
        if self.resize_to == 0 || self.crop_to == 0 || self.crop_to > self.resize_to {
            return Err(Error::InvalidParameter(format!(
                "require 1 <= crop_to <= resize_to, got crop_to={} resize_to={}",
                self.crop_to, self.resize_to
            )));
        }
        check_prob(self.flip_prob)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitedAugmentParams {
    /// Target side in blocks; `None` keeps the stored size.
    pub crop_blocks: Option<usize>,
    pub flip_prob: f64,
}

impl LimitedAugmentParams {
    pub fn identity() -> Self {
        Self {
            crop_blocks: None,
            flip_prob: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.crop_blocks == Some(0) {
            return Err(Error::InvalidParameter("crop_blocks must be >= 1".into()));
        }
        check_prob(self.flip_prob)
    }
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "flip_prob must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// The random draws made for one augmented image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentRecord {
    pub stream: u64,
    pub crop_top: usize,
    pub crop_left: usize,
    pub flipped: bool,
}

/// Resample to `side x side`: area averaging on shrinking axes, bilinear on
/// enlarging ones.
pub fn resize(image: &Image, side: usize) -> Result<Image> {
    resample(image, side, side)
}

struct Crop {
    top: usize,
    left: usize,
    height: usize,
    width: usize,
}

impl PlaneMap for Crop {
    fn apply<T: Sample>(&self, plane: &[T], _h: usize, w: usize) -> Result<(usize, usize, Vec<T>)> {
        let mut out = Vec::with_capacity(self.height * self.width);
        for y in self.top..self.top + self.height {
            out.extend_from_slice(&plane[y * w + self.left..y * w + self.left + self.width]);
        }
        Ok((self.height, self.width, out))
    }
}

/// Column reversal in units of `unit` columns; the order inside a unit is
/// kept. `unit = 1` is a plain mirror.
struct FlipColumns {
    unit: usize,
}

impl PlaneMap for FlipColumns {
    fn apply<T: Sample>(&self, plane: &[T], h: usize, w: usize) -> Result<(usize, usize, Vec<T>)> {
        let mut out = Vec::with_capacity(h * w);
        for row in plane.chunks_exact(w) {
            for chunk in row.rchunks_exact(self.unit) {
                out.extend_from_slice(chunk);
            }
        }
        Ok((h, w, out))
    }
}

pub fn crop_at(image: &Image, top: usize, left: usize, height: usize, width: usize) -> Result<Image> {
    if height == 0 || width == 0 || top + height > image.height() || left + width > image.width() {
        return Err(Error::CropTooLarge {
            crop: height.max(width),
            height: image.height().saturating_sub(top),
            width: image.width().saturating_sub(left),
        });
    }
    image.map_planes(Crop {
        top,
        left,
        height,
        width,
    })
}

/// Uniformly placed `size x size` window; returns the crop and its
/// `(top, left)` offset.
pub fn random_crop<R: Rng + ?Sized>(image: &Image, size: usize, rng: &mut R) -> Result<(Image, (usize, usize))> {
    if size == 0 || size > image.height() || size > image.width() {
        return Err(Error::CropTooLarge {
            crop: size,
            height: image.height(),
            width: image.width(),
        });
    }
    let top = rng.random_range(0..=image.height() - size);
    let left = rng.random_range(0..=image.width() - size);
    Ok((crop_at(image, top, left, size, size)?, (top, left)))
}

pub fn hflip(image: &Image) -> Image {
    image.map_planes(FlipColumns { unit: 1 }).expect("flip preserves dims")
}

/// Random crop to `crop_to` followed by the flip coin, applied to an
/// already resized image.
pub fn crop_and_flip<R: Rng + ?Sized>(
    resized: &Image,
    crop_to: usize,
    flip_prob: f64,
    rng: &mut R,
) -> Result<(Image, AugmentRecord)> {
    check_prob(flip_prob)?;
    let (cropped, (top, left)) = random_crop(resized, crop_to, rng)?;
    let flipped = rng.random::<f64>() < flip_prob;
    let out = if flipped { hflip(&cropped) } else { cropped };
    Ok((
        out,
        AugmentRecord {
            stream: 0,
            crop_top: top,
            crop_left: left,
            flipped,
        },
    ))
}

/// Resize, random crop and coin-flip mirror of one image.
pub fn augment_full<R: Rng + ?Sized>(
    image: &Image,
    params: &AugmentParams,
    rng: &mut R,
) -> Result<(Image, AugmentRecord)> {
    params.validate()?;
    let resized = resize(image, params.resize_to)?;
    crop_and_flip(&resized, params.crop_to, params.flip_prob, rng)
}

/// Crop whole blocks: the window starts at block `(block_top, block_left)`
/// and spans `crop_blocks` blocks per side.
pub fn limited_crop_at(
    cimg: &CompressedImage,
    block_top: usize,
    block_left: usize,
    crop_blocks: usize,
) -> Result<CompressedImage> {
    let n = cimg.n();
    if crop_blocks == 0
        || block_top + crop_blocks > cimg.blocks_down()
        || block_left + crop_blocks > cimg.blocks_across()
    {
        return Err(Error::CropTooLarge {
            crop: crop_blocks * n,
            height: cimg.dims().height,
            width: cimg.dims().width,
        });
    }
    let side = crop_blocks * n;
    cimg.replace_image(crop_at(cimg.image(), block_top * n, block_left * n, side, side)?)
}

/// Block-aligned random crop; returns the crop and its pixel offset, which
/// is always a multiple of `n`.
pub fn limited_crop<R: Rng + ?Sized>(
    cimg: &CompressedImage,
    crop_blocks: usize,
    rng: &mut R,
) -> Result<(CompressedImage, (usize, usize))> {
    if crop_blocks == 0 || crop_blocks > cimg.blocks_down() || crop_blocks > cimg.blocks_across() {
        return Err(Error::CropTooLarge {
            crop: crop_blocks * cimg.n(),
            height: cimg.dims().height,
            width: cimg.dims().width,
        });
    }
    let bt = rng.random_range(0..=cimg.blocks_down() - crop_blocks);
    let bl = rng.random_range(0..=cimg.blocks_across() - crop_blocks);
    let out = limited_crop_at(cimg, bt, bl, crop_blocks)?;
    Ok((out, (bt * cimg.n(), bl * cimg.n())))
}

/// Reverse the order of block columns; the inside of each block is left
/// as is.
pub fn limited_flip(cimg: &CompressedImage) -> CompressedImage {
    let image = cimg
        .image()
        .map_planes(FlipColumns { unit: cimg.n() })
        .expect("flip preserves dims");
    cimg.replace_image(image).expect("flip preserves block grid")
}

/// Apply the compressed-domain augmentations: optional block-aligned crop,
/// then a block-order flip with probability `flip_prob`. The crop offsets
/// are drawn before the coin.
pub fn augment_limited<R: Rng + ?Sized>(
    cimg: &CompressedImage,
    params: &LimitedAugmentParams,
    rng: &mut R,
) -> Result<CompressedImage> {
    params.validate()?;
    let cropped = match params.crop_blocks {
        Some(k) => limited_crop(cimg, k, rng)?.0,
        None => cimg.clone(),
    };
    let flip = rng.random::<f64>() < params.flip_prob;
    Ok(if flip { limited_flip(&cropped) } else { cropped })
}
