//! `.lcmx` sketch-matrix file.
//!
//! ```text
//! offset size field
//!      0    4 magic "LCMX"
//!      4    2 version (u16) = 1
//!      6    1 kind: 0 rmm, 1 ms
//!      7    1 reserved, zero
//!      8    4 rows (u32)
//!     12    4 cols (u32)
//!     16    8 gamma (f64)
//!     24    8 seed (u64)
//!     32   32 SHA-256 of the payload
//!     64    . rows*cols f32 entries, row-major
//! ```

use super::{sha256, to_u32, Reader};
use crate::compressors::{SketchKind, SketchMatrix};
use crate::error::{Error, Result};

pub const LCMX_MAGIC: [u8; 4] = *b"LCMX";
pub const LCMX_VERSION: u16 = 1;
pub const LCMX_HEADER_LEN: usize = 64;

pub fn write_matrix(mat: &SketchMatrix) -> Result<Vec<u8>> {
    let payload: Vec<u8> = mat.entries().iter().flat_map(|v| v.to_le_bytes()).collect();
    let mut out = Vec::with_capacity(LCMX_HEADER_LEN + payload.len());
    out.extend_from_slice(&LCMX_MAGIC);
    out.extend_from_slice(&LCMX_VERSION.to_le_bytes());
    out.push(match mat.kind() {
        SketchKind::Rmm => 0,
        SketchKind::Ms => 1,
    });
    out.push(0);
    out.extend_from_slice(&to_u32(mat.rows(), "rows")?.to_le_bytes());
    out.extend_from_slice(&to_u32(mat.cols(), "cols")?.to_le_bytes());
    out.extend_from_slice(&mat.gamma().to_le_bytes());
    out.extend_from_slice(&mat.seed().to_le_bytes());
    out.extend_from_slice(&sha256(&payload));
    out.extend_from_slice(&payload);
    Ok(out)
}

pub fn read_matrix(bytes: &[u8]) -> Result<SketchMatrix> {
    if bytes.len() >= 4 && bytes[..4] != LCMX_MAGIC {
        return Err(Error::BadMagic {
            expected: LCMX_MAGIC,
            found: bytes[..4].try_into().expect("4 bytes"),
        });
    }
    if bytes.len() < LCMX_HEADER_LEN {
        return Err(Error::LengthMismatch {
            expected: LCMX_HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let mut r = Reader::new(bytes);
    r.take::<4>();
    let version = r.u16();
    if version != LCMX_VERSION {
        return Err(Error::VersionUnsupported(version));
    }
    let kind = match r.u8() {
        0 => SketchKind::Rmm,
        1 => SketchKind::Ms,
        t => return Err(Error::BadHeader(format!("unknown matrix kind {t}"))),
    };
    if r.u8() != 0 {
        return Err(Error::BadHeader("reserved field is not zero".into()));
    }
    let rows = r.u32() as usize;
    let cols = r.u32() as usize;
    let gamma = r.f64();
    let seed = r.u64();
    let digest = r.take::<32>();
    if rows == 0 || cols == 0 {
        return Err(Error::BadHeader(format!("zero dimension {rows}x{cols}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::BadHeader(format!("gamma {gamma} outside [0, 1]")));
    }
    let expected = rows
        .checked_mul(cols)
        .and_then(|x| x.checked_mul(4))
        .ok_or_else(|| Error::BadHeader("dimensions overflow".into()))?;
    let payload = &bytes[LCMX_HEADER_LEN..];
    if payload.len() != expected {
        return Err(Error::LengthMismatch {
            expected: LCMX_HEADER_LEN + expected,
            actual: bytes.len(),
        });
    }
    if sha256(payload) != digest {
        return Err(Error::DigestMismatch("lcmx payload".into()));
    }
    let entries = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    SketchMatrix::from_parts(kind, rows, cols, gamma, seed, entries)
}
