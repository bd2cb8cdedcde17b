//! `.lcim` compressed-image container.
//!
//! ```text
//! offset size field
//!      0    4 magic "LCIM"
//!      4    2 version (u16) = 1
//!      6    1 method tag: 0 percentile, 1 rmm, 2 ms, 3 downgrade
//!      7    1 dtype tag: 0 u8, 1 f32
//!      8    4 m (u32)
//!     12    4 n (u32)
//!     16    4 channels (u32)
//!     20    4 blocks_down (u32)
//!     24    4 blocks_across (u32)
//!     28    4 reserved, zero
//!     32   32 spec digest (SHA-256 of the canonical spec JSON, or zeros)
//!     64   32 SHA-256 of the payload
//!     96    . payload
//! ```
//!
//! The payload is channel-major, then block-row-major, then row-major within
//! each `n x n` block, so any whole block is one contiguous byte range.

use super::{sha256, to_u32, CompressedImage, Reader};
use crate::compressors::Method;
use crate::error::{Error, Result};
use crate::grid::ImageDims;
use crate::image::{Dtype, Image, PixelData};

pub const LCIM_MAGIC: [u8; 4] = *b"LCIM";
pub const LCIM_VERSION: u16 = 1;
pub const LCIM_HEADER_LEN: usize = 96;

fn dtype_tag(d: Dtype) -> u8 {
    match d {
        Dtype::U8 => 0,
        Dtype::F32 => 1,
    }
}

/// Serialize the pixel grid in block order.
pub fn payload_bytes(cimg: &CompressedImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(cimg.payload_len());
    let order = block_order(cimg.dims(), cimg.n());
    match cimg.image().data() {
        PixelData::U8(v) => out.extend(order.map(|i| v[i])),
        PixelData::F32(v) => {
            for i in order {
                out.extend_from_slice(&v[i].to_le_bytes());
            }
        }
    }
    out
}

/// Planar row-major pixel index of each payload element, in payload order.
fn block_order(dims: ImageDims, n: usize) -> impl Iterator<Item = usize> {
    let (h, w) = (dims.height, dims.width);
    let (bd, ba) = (h / n, w / n);
    (0..dims.channels).flat_map(move |k| {
        (0..bd).flat_map(move |bi| {
            (0..ba).flat_map(move |bj| {
                (0..n).flat_map(move |r| (0..n).map(move |c| k * h * w + (bi * n + r) * w + bj * n + c))
            })
        })
    })
}

pub fn write_lcim(cimg: &CompressedImage) -> Result<Vec<u8>> {
    let payload = payload_bytes(cimg);
    let mut out = Vec::with_capacity(LCIM_HEADER_LEN + payload.len());
    out.extend_from_slice(&LCIM_MAGIC);
    out.extend_from_slice(&LCIM_VERSION.to_le_bytes());
    out.push(cimg.method().tag());
    out.push(dtype_tag(cimg.dtype()));
    for (v, what) in [
        (cimg.m(), "m"),
        (cimg.n(), "n"),
        (cimg.dims().channels, "channels"),
        (cimg.blocks_down(), "blocks_down"),
        (cimg.blocks_across(), "blocks_across"),
    ] {
        out.extend_from_slice(&to_u32(v, what)?.to_le_bytes());
    }
    out.extend_from_slice(&[0u8; 4]);
    out.extend_from_slice(cimg.spec_digest());
    out.extend_from_slice(&sha256(&payload));
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn read_lcim(bytes: &[u8]) -> Result<CompressedImage> {
    if bytes.len() >= 4 && bytes[..4] != LCIM_MAGIC {
        return Err(Error::BadMagic {
            expected: LCIM_MAGIC,
            found: bytes[..4].try_into().expect("4 bytes"),
        });
    }
    if bytes.len() < LCIM_HEADER_LEN {
        return Err(Error::LengthMismatch {
            expected: LCIM_HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let mut r = Reader::new(bytes);
    r.take::<4>();
    let version = r.u16();
    if version != LCIM_VERSION {
        return Err(Error::VersionUnsupported(version));
    }
    let method_tag = r.u8();
    let method =
        Method::from_tag(method_tag).ok_or_else(|| Error::BadHeader(format!("unknown method tag {method_tag}")))?;
    let dtype = match r.u8() {
        0 => Dtype::U8,
        1 => Dtype::F32,
        t => return Err(Error::BadHeader(format!("unknown dtype tag {t}"))),
    };
    let m = r.u32() as usize;
    let n = r.u32() as usize;
    let channels = r.u32() as usize;
    let bd = r.u32() as usize;
    let ba = r.u32() as usize;
    if r.u32() != 0 {
        return Err(Error::BadHeader("reserved field is not zero".into()));
    }
    if m == 0 || n == 0 || channels == 0 || bd == 0 || ba == 0 {
        return Err(Error::BadHeader(format!(
            "zero dimension: m={m} n={n} channels={channels} blocks={bd}x{ba}"
        )));
    }
    let spec_digest = r.take::<32>();
    let payload_digest = r.take::<32>();

    let expected = channels
        .checked_mul(bd)
        .and_then(|x| x.checked_mul(ba))
        .and_then(|x| x.checked_mul(n * n))
        .and_then(|x| x.checked_mul(dtype.size()))
        .ok_or_else(|| Error::BadHeader("dimensions overflow".into()))?;
    let payload = &bytes[LCIM_HEADER_LEN..];
    if payload.len() != expected {
        return Err(Error::LengthMismatch {
            expected: LCIM_HEADER_LEN + expected,
            actual: bytes.len(),
        });
    }
    if sha256(payload) != payload_digest {
        return Err(Error::DigestMismatch("lcim payload".into()));
    }

    let dims = ImageDims::new(bd * n, ba * n, channels)?;
    let data = match dtype {
        Dtype::U8 => {
            let mut v = vec![0u8; dims.len()];
            for (src, dst) in payload.iter().zip(block_order(dims, n)) {
                v[dst] = *src;
            }
            PixelData::U8(v)
        }
        Dtype::F32 => {
            let mut v = vec![0f32; dims.len()];
            for (src, dst) in payload.chunks_exact(4).zip(block_order(dims, n)) {
                v[dst] = f32::from_le_bytes(src.try_into().expect("4 bytes"));
            }
            PixelData::F32(v)
        }
    };
    CompressedImage::new(method, m, n, spec_digest, Image::new(dims, data)?)
}
