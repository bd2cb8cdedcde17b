//! Block-level compression kernels and whole-image localized compression.

mod percentile;
mod resample;
mod sketch;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use percentile::{compress_block_percentile, make_percentile_scheme, PercentileScheme};
pub use resample::{downgrade_area, resample};
pub use sketch::{compress_block_ms, compress_block_rmm, gen_sketch_matrix, SketchKind, SketchMatrix};

use crate::error::{Error, Result};
use crate::grid::{self, ImageDims};
use crate::image::{Image, PixelData, Sample};
use crate::lcio::CompressedImage;

/// A square single-channel tile, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T> {
    side: usize,
    values: Vec<T>,
}

impl<T: Copy> Block<T> {
    pub fn new(side: usize, values: Vec<T>) -> Result<Self> {
        if side == 0 || values.len() != side * side {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {side}x{side} block",
                values.len()
            )));
        }
        Ok(Self { side, values })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.side + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Percentile,
    Rmm,
    Ms,
    Downgrade,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Percentile, Method::Rmm, Method::Ms, Method::Downgrade];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Percentile => "percentile",
            Method::Rmm => "rmm",
            Method::Ms => "ms",
            Method::Downgrade => "downgrade",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Method::Percentile => 0,
            Method::Rmm => 1,
            Method::Ms => 2,
            Method::Downgrade => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.tag() == tag)
    }

    pub fn sketch_kind(self) -> Option<SketchKind> {
        match self {
            Method::Rmm => Some(SketchKind::Rmm),
            Method::Ms => Some(SketchKind::Ms),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// Whether `P` principal components of an `m x m` block fit in `n x n`
/// values, i.e. `n² >= 2mP + m`.
pub fn pca_feasible(m: usize, n: usize, components: usize) -> bool {
    n * n >= 2 * m * components + m
}

/// A configured block compressor. The same sketch matrix is shared by every
/// block of every image it is applied to.
#[derive(Debug, Clone)]
pub enum Compressor {
    Percentile { m: usize, scheme: PercentileScheme },
    Rmm { m: usize, n: usize, matrix: SketchMatrix },
    Ms { m: usize, n: usize, matrix: SketchMatrix },
    Downgrade { m: usize, n: usize },
}

impl Compressor {
    pub fn percentile(m: usize, n: usize) -> Result<Self> {
        grid::check_block_sizes(m, n)?;
        Ok(Compressor::Percentile {
            m,
            scheme: make_percentile_scheme(n)?,
        })
    }

    pub fn rmm(m: usize, matrix: SketchMatrix) -> Result<Self> {
        let n = sketch::rmm_output_side(&matrix, m)?;
        grid::check_block_sizes(m, n)?;
        Ok(Compressor::Rmm { m, n, matrix })
    }

    pub fn ms(m: usize, matrix: SketchMatrix) -> Result<Self> {
        let n = sketch::ms_output_side(&matrix, m)?;
        grid::check_block_sizes(m, n)?;
        Ok(Compressor::Ms { m, n, matrix })
    }

    pub fn downgrade(m: usize, n: usize) -> Result<Self> {
        grid::check_block_sizes(m, n)?;
        Ok(Compressor::Downgrade { m, n })
    }

    /// Build a compressor for `method`, taking the matrix from `matrix` for
    /// the sketch-based methods.
    pub fn for_method(method: Method, m: usize, n: usize, matrix: Option<&SketchMatrix>) -> Result<Self> {
        let need = |kind| {
            matrix
                .filter(|mat| mat.kind() == kind)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("{method} requires a {kind:?} matrix")))
        };
        let c = match method {
            Method::Percentile => Self::percentile(m, n)?,
            Method::Downgrade => Self::downgrade(m, n)?,
            Method::Rmm => Self::rmm(m, need(SketchKind::Rmm)?)?,
            Method::Ms => Self::ms(m, need(SketchKind::Ms)?)?,
        };
        if c.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix compresses to n={}, expected n={n}",
                c.n()
            )));
        }
        Ok(c)
    }

    pub fn method(&self) -> Method {
        match self {
            Compressor::Percentile { .. } => Method::Percentile,
            Compressor::Rmm { .. } => Method::Rmm,
            Compressor::Ms { .. } => Method::Ms,
            Compressor::Downgrade { .. } => Method::Downgrade,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Compressor::Percentile { m, .. }
            | Compressor::Rmm { m, .. }
            | Compressor::Ms { m, .. }
            | Compressor::Downgrade { m, .. } => *m,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Compressor::Percentile { scheme, .. } => scheme.n(),
            Compressor::Rmm { n, .. } | Compressor::Ms { n, .. } | Compressor::Downgrade { n, .. } => *n,
        }
    }
}

/// Compress every channel of `image` block by block. Block `(i, j)` of
/// channel `k` lands at compressed block `(i, j)` of channel `k`.
pub fn compress_image(image: &Image, compressor: &Compressor) -> Result<CompressedImage> {
    let (m, n) = (compressor.m(), compressor.n());
    let out_dims = grid::compressed_dims(image.dims(), m, n)?;
    let out = match compressor {
        Compressor::Downgrade { .. } => downgrade_area(image, out_dims)?,
        Compressor::Percentile { scheme, .. } => {
            let ranks = scheme.ranks(m * m);
            let data = match image.data() {
                PixelData::U8(v) => PixelData::U8(blockwise(v, image.dims(), m, n, |b, o| {
                    percentile::sample_sorted(b, &ranks, o)
                })),
                PixelData::F32(v) => PixelData::F32(blockwise(v, image.dims(), m, n, |b, o| {
                    percentile::sample_sorted(b, &ranks, o)
                })),
            };
            Image::new(out_dims, data)?
        }
        Compressor::Rmm { matrix, .. } => {
            let data = match image.data() {
                PixelData::U8(v) => to_f32_blockwise(v, image.dims(), m, n, |b, o| matrix.mul_vec_into(b, o)),
                PixelData::F32(v) => to_f32_blockwise(v, image.dims(), m, n, |b, o| matrix.mul_vec_into(b, o)),
            };
            Image::from_f32(out_dims, data)?
        }
        Compressor::Ms { matrix, .. } => {
            let mut tmp = vec![0.0f64; n * m];
            let data = match image.data() {
                PixelData::U8(v) => {
                    to_f32_blockwise(v, image.dims(), m, n, |b, o| matrix.sandwich_into(b, &mut tmp, o))
                }
                PixelData::F32(v) => {
                    to_f32_blockwise(v, image.dims(), m, n, |b, o| matrix.sandwich_into(b, &mut tmp, o))
                }
            };
            Image::from_f32(out_dims, data)?
        }
    };
    CompressedImage::new(compressor.method(), m, n, [0u8; 32], out)
}

fn blockwise<T: Sample>(
    data: &[T],
    dims: ImageDims,
    m: usize,
    n: usize,
    mut kernel: impl FnMut(&mut [T], &mut [T]),
) -> Vec<T> {
    let Some(&first) = data.first() else {
        return Vec::new();
    };
    let mut out = vec![first; dims.len() / (m * m) * (n * n)];
    let mut block = vec![first; m * m];
    let mut cblock = vec![first; n * n];
    for_each_block(data, dims, m, n, &mut block, |blk, dst_index| {
        kernel(blk, &mut cblock);
        scatter(&cblock, &mut out, dst_index, n, dims.width / m * n);
    });
    out
}

fn to_f32_blockwise<T: Sample>(
    data: &[T],
    dims: ImageDims,
    m: usize,
    n: usize,
    mut kernel: impl FnMut(&[T], &mut [f32]),
) -> Vec<f32> {
    let Some(&first) = data.first() else {
        return Vec::new();
    };
    let mut out = vec![0.0f32; dims.len() / (m * m) * (n * n)];
    let mut block = vec![first; m * m];
    let mut cblock = vec![0.0f32; n * n];
    for_each_block(data, dims, m, n, &mut block, |blk, dst_index| {
        kernel(blk, &mut cblock);
        scatter(&cblock, &mut out, dst_index, n, dims.width / m * n);
    });
    out
}

/// Gather every `m x m` block (row-major) into `buf` and hand it to `f`
/// together with the index of the top-left pixel of its `n x n` destination.
fn for_each_block<T: Copy>(
    data: &[T],
    dims: ImageDims,
    m: usize,
    n: usize,
    buf: &mut [T],
    mut f: impl FnMut(&mut [T], usize),
) {
    let (h, w) = (dims.height, dims.width);
    let (bd, ba) = (h / m, w / m);
    let out_w = ba * n;
    let out_plane = bd * n * out_w;
    for k in 0..dims.channels {
        let plane = &data[k * h * w..(k + 1) * h * w];
        for bi in 0..bd {
            for bj in 0..ba {
                for r in 0..m {
                    let src = (bi * m + r) * w + bj * m;
                    buf[r * m..(r + 1) * m].copy_from_slice(&plane[src..src + m]);
                }
                f(buf, k * out_plane + bi * n * out_w + bj * n);
            }
        }
    }
}

fn scatter<T: Copy>(block: &[T], out: &mut [T], origin: usize, n: usize, out_w: usize) {
    for r in 0..n {
        out[origin + r * out_w..origin + r * out_w + n].copy_from_slice(&block[r * n..(r + 1) * n]);
    }
}
