//! Block tiling arithmetic, compression ratios and stride compatibility.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of convolution-region offsets enumerated by [`check_stride_compat`].
pub const DEFAULT_OFFSET_COUNT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageDims {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl ImageDims {
    pub fn new(height: usize, width: usize, channels: usize) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dims must be >= 1, got {height}x{width}x{channels}"
            )));
        }
        Ok(Self {
            height,
            width,
            channels,
        })
    }

    /// Total number of pixel values across all channels.
    pub fn len(&self) -> usize {
        self.height * self.width * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for ImageDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}

/// Exact, non-overlapping tiling of an image by `m x m` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TilingPlan {
    pub block_size: usize,
    pub blocks_down: usize,
    pub blocks_across: usize,
}

impl TilingPlan {
    pub fn block_count(&self) -> usize {
        self.blocks_down * self.blocks_across
    }
}

/// First-layer convolution geometry: region side `r` and stride `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvArch {
    pub region: usize,
    pub stride: usize,
}

impl ConvArch {
    pub fn new(region: usize, stride: usize) -> Result<Self> {
        if region == 0 || stride == 0 || stride > region {
            return Err(Error::InvalidParameter(format!(
                "conv arch requires r >= 1, s >= 1, s <= r; got r={region}, s={stride}"
            )));
        }
        Ok(Self { region, stride })
    }
}

pub fn plan_tiling(dims: ImageDims, m: usize) -> Result<TilingPlan> {
    if m == 0 {
        return Err(Error::InvalidParameter("block size m must be >= 1".into()));
    }
    if !dims.height.is_multiple_of(m) {
        return Err(Error::NonDivisible {
            axis: "height",
            len: dims.height,
            block: m,
        });
    }
    if !dims.width.is_multiple_of(m) {
        return Err(Error::NonDivisible {
            axis: "width",
            len: dims.width,
            block: m,
        });
    }
    Ok(TilingPlan {
        block_size: m,
        blocks_down: dims.height / m,
        blocks_across: dims.width / m,
    })
}

pub(crate) fn check_block_sizes(m: usize, n: usize) -> Result<()> {
    if n == 0 || n >= m {
        return Err(Error::InvalidBlockSizes { m, n });
    }
    Ok(())
}

/// Dimensions after compressing every `m x m` block to `n x n`.
pub fn compressed_dims(dims: ImageDims, m: usize, n: usize) -> Result<ImageDims> {
    check_block_sizes(m, n)?;
    let plan = plan_tiling(dims, m)?;
    Ok(ImageDims {
        height: plan.blocks_down * n,
        width: plan.blocks_across * n,
        channels: dims.channels,
    })
}

/// An exact non-negative rational number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Computational ratio `m²/n²` and storage ratio `m²/(n²·c)`, both
/// uncompressed-to-compressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionRatios {
    pub cr: Ratio,
    pub sr: Ratio,
}

pub fn compression_ratios(m: usize, n: usize, copies: usize) -> Result<CompressionRatios> {
    check_block_sizes(m, n)?;
    if copies == 0 {
        return Err(Error::InvalidParameter("copies c must be >= 1".into()));
    }
    let (m2, n2) = ((m * m) as u64, (n * n) as u64);
    Ok(CompressionRatios {
        cr: Ratio::new(m2, n2),
        sr: Ratio::new(m2, n2 * copies as u64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionOffset {
    pub offset: usize,
    pub aligned: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatReport {
    pub arch: ConvArch,
    pub n: usize,
    /// `s mod n == 0`: every region starts on a block boundary.
    pub stride_ok: bool,
    /// `r mod n == 0`: every aligned region spans whole blocks.
    pub region_ok: bool,
    pub offsets: Vec<RegionOffset>,
}

impl CompatReport {
    pub fn first_misaligned(&self) -> Option<usize> {
        self.offsets.iter().find(|o| !o.aligned).map(|o| o.offset)
    }
}

pub fn check_stride_compat(arch: ConvArch, n: usize) -> CompatReport {
    check_stride_compat_k(arch, n, DEFAULT_OFFSET_COUNT)
}

pub fn check_stride_compat_k(arch: ConvArch, n: usize, k: usize) -> CompatReport {
    let divides = |x: usize| n != 0 && x.is_multiple_of(n);
    let offsets = (0..k)
        .map(|i| {
            let offset = i * arch.stride;
            RegionOffset {
                offset,
                aligned: divides(offset),
            }
        })
        .collect();
    CompatReport {
        arch,
        n,
        stride_ok: divides(arch.stride),
        region_ok: divides(arch.region),
        offsets,
    }
}
