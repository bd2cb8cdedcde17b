//! Planar image container.
//!
//! Pixels are stored channel-major: all of channel 0 row by row, then
//! channel 1, and so on. Decoded files are converted from the interleaved
//! layout used by the `image` crate on load.

use std::path::Path;

use image::{DynamicImage, GrayImage, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ImageDims;

/// Element type of an image or block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    U8,
    F32,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::U8 => 1,
            Dtype::F32 => 4,
        }
    }
}

/// A pixel intensity type the kernels can operate on.
pub trait Sample: Copy + PartialOrd + Send + Sync + 'static {
    const DTYPE: Dtype;

    fn to_f64(self) -> f64;

    /// Convert an accumulated value back to the element type. Integer types
    /// round half away from zero and saturate.
    fn from_f64(v: f64) -> Self;

    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering;
}

impl Sample for u8 {
    const DTYPE: Dtype = Dtype::U8;

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn from_f64(v: f64) -> Self {
        v.round().clamp(0.0, 255.0) as u8
    }

    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp(other)
    }
}

impl Sample for f32 {
    const DTYPE: Dtype = Dtype::F32;

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        f32::total_cmp(self, other)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PixelData {
    U8(Vec<u8>),
    F32(Vec<f32>),
}

impl PixelData {
    pub fn dtype(&self) -> Dtype {
        match self {
            PixelData::U8(_) => Dtype::U8,
            PixelData::F32(_) => Dtype::F32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PixelData::U8(v) => v.len(),
            PixelData::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense `height x width x channels` image in planar layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    dims: ImageDims,
    data: PixelData,
}

impl Image {
    pub fn new(dims: ImageDims, data: PixelData) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} pixel values for a {}x{}x{} image",
                data.len(),
                dims.height,
                dims.width,
                dims.channels
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn from_u8(dims: ImageDims, data: Vec<u8>) -> Result<Self> {
        Self::new(dims, PixelData::U8(data))
    }

    pub fn from_f32(dims: ImageDims, data: Vec<f32>) -> Result<Self> {
        Self::new(dims, PixelData::F32(data))
    }

    pub fn filled_u8(dims: ImageDims, value: u8) -> Self {
        Self {
            dims,
            data: PixelData::U8(vec![value; dims.len()]),
        }
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn channels(&self) -> usize {
        self.dims.channels
    }

    pub fn dtype(&self) -> Dtype {
        self.data.dtype()
    }

    pub fn data(&self) -> &PixelData {
        &self.data
    }

    pub fn into_data(self) -> PixelData {
        self.data
    }

    /// A copy of one channel as a single-channel image.
    pub fn channel(&self, k: usize) -> Result<Image> {
        if k >= self.dims.channels {
            return Err(Error::DimensionMismatch(format!(
                "channel {k} of a {}-channel image",
                self.dims.channels
            )));
        }
        let plane = self.dims.height * self.dims.width;
        let dims = ImageDims::new(self.dims.height, self.dims.width, 1)?;
        let range = k * plane..(k + 1) * plane;
        let data = match &self.data {
            PixelData::U8(v) => PixelData::U8(v[range].to_vec()),
            PixelData::F32(v) => PixelData::F32(v[range].to_vec()),
        };
        Ok(Image { dims, data })
    }

    /// Apply a per-plane transform that is generic over the element type.
    /// The closure receives one channel plane (row-major) and its height and
    /// width, and returns the new plane together with its output size.
    pub(crate) fn map_planes<F>(&self, f: F) -> Result<Image>
    where
        F: PlaneMap,
    {
        match &self.data {
            PixelData::U8(v) => {
                let (dims, out) = map_planes_typed(self.dims, v, &f)?;
                Image::new(dims, PixelData::U8(out))
            }
            PixelData::F32(v) => {
                let (dims, out) = map_planes_typed(self.dims, v, &f)?;
                Image::new(dims, PixelData::F32(out))
            }
        }
    }

    /// Load a PNG or PPM/PGM file. Alpha is dropped; grayscale stays single
    /// channel and everything else becomes RGB.
    pub fn load(path: &Path) -> Result<Image> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let decoded = image::open(path).map_err(|source| match source {
            image::ImageError::IoError(e) => Error::Io(e),
            source => Error::Decode {
                path: path.to_path_buf(),
                source,
            },
        })?;
        Ok(Image::from_dynamic(&decoded))
    }

    pub fn from_dynamic(img: &DynamicImage) -> Image {
        let color = img.color();
        if color.channel_count() <= 2 {
            let gray = img.to_luma8();
            let dims = ImageDims {
                height: gray.height() as usize,
                width: gray.width() as usize,
                channels: 1,
            };
            Image {
                dims,
                data: PixelData::U8(gray.into_raw()),
            }
        } else {
            let rgb = img.to_rgb8();
            let (h, w) = (rgb.height() as usize, rgb.width() as usize);
            let raw = rgb.into_raw();
            let mut planar = vec![0u8; raw.len()];
            let plane = h * w;
            for (i, px) in raw.chunks_exact(3).enumerate() {
                planar[i] = px[0];
                planar[plane + i] = px[1];
                planar[2 * plane + i] = px[2];
            }
            Image {
                dims: ImageDims {
                    height: h,
                    width: w,
                    channels: 3,
                },
                data: PixelData::U8(planar),
            }
        }
    }

    /// Save an 8-bit image with one or three channels as PNG.
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let PixelData::U8(v) = &self.data else {
            return Err(Error::InvalidParameter("only 8-bit images can be saved as PNG".into()));
        };
        let (h, w) = (self.dims.height as u32, self.dims.width as u32);
        let plane = self.dims.height * self.dims.width;
        let res = match self.dims.channels {
            1 => GrayImage::from_raw(w, h, v.clone()).map(DynamicImage::ImageLuma8),
            3 => {
                let mut inter = Vec::with_capacity(v.len());
                for i in 0..plane {
                    inter.extend_from_slice(&[v[i], v[plane + i], v[2 * plane + i]]);
                }
                RgbImage::from_raw(w, h, inter).map(DynamicImage::ImageRgb8)
            }
            c => return Err(Error::InvalidParameter(format!("cannot save {c}-channel image as PNG"))),
        };
        let img = res.expect("buffer length matches dims");
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| match e {
                image::ImageError::IoError(e) => Error::Io(e),
                source => Error::Decode {
                    path: path.to_path_buf(),
                    source,
                },
            })
    }
}

/// Plane-level transform used by [`Image::map_planes`].
pub(crate) trait PlaneMap {
    fn apply<T: Sample>(&self, plane: &[T], h: usize, w: usize) -> Result<(usize, usize, Vec<T>)>;
}

fn map_planes_typed<T: Sample, F: PlaneMap>(dims: ImageDims, data: &[T], f: &F) -> Result<(ImageDims, Vec<T>)> {
    let plane = dims.height * dims.width;
    let mut out = Vec::new();
    let mut out_hw = (0, 0);
    for k in 0..dims.channels {
        let (h, w, p) = f.apply(&data[k * plane..(k + 1) * plane], dims.height, dims.width)?;
        out_hw = (h, w);
        out.extend(p);
    }
    let dims = ImageDims::new(out_hw.0, out_hw.1, dims.channels)?;
    Ok((dims, out))
}
