//! Localized image compression for CNN training.
//!
//! An image is tiled into non-overlapping `m x m` blocks and every block is
//! replaced by an `n x n` summary (percentiles, a random sketch, or an area
//! downgrade). The result is an image `n/m` the size of the input that a
//! network can consume directly, provided its first-layer stride is a
//! multiple of `n`.
//!
//! ```
//! use locomp::{compress_image, Compressor, Image};
//!
//! let img = Image::filled_u8(locomp::ImageDims::new(224, 224, 3).unwrap(), 128);
//! let out = compress_image(&img, &Compressor::percentile(7, 2).unwrap()).unwrap();
//! assert_eq!((out.image().height(), out.image().width()), (64, 64));
//! ```

pub mod augment;
pub mod compressors;
pub mod error;
pub mod grid;
pub mod image;
pub mod lcio;
pub mod netops;
pub mod pipeline;
pub mod rng;

pub use compressors::{compress_image, Block, Compressor, Method, SketchKind, SketchMatrix};
pub use error::{Error, ErrorClass, Result};
pub use grid::{CompressionRatios, ConvArch, ImageDims, Ratio, TilingPlan};
pub use image::{Dtype, Image, PixelData, Sample};
pub use lcio::{CompressedImage, DatasetManifest};
pub use pipeline::{CompressionSpec, Dataset, Mode};
