use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{axis} {len} is not a multiple of block size {block}")]
    NonDivisible {
        axis: &'static str,
        len: usize,
        block: usize,
    },

    #[error("invalid block sizes m={m}, n={n}: require 1 <= n < m")]
    InvalidBlockSizes { m: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cannot downgrade {src_h}x{src_w} to larger target {dst_h}x{dst_w}")]
    UpscaleNotSupported {
        src_h: usize,
        src_w: usize,
        dst_h: usize,
        dst_w: usize,
    },

    #[error("crop {crop} does not fit inside {height}x{width}")]
    CropTooLarge { crop: usize, height: usize, width: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stride {stride} is not divisible by n={n}")]
    IncompatibleStride { stride: usize, n: usize },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    VersionUnsupported(u16),

    #[error("length mismatch: expected {expected} bytes, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("digest mismatch for {0}")]
    DigestMismatch(String),

    #[error("malformed header: {0}")]
    BadHeader(String),

    #[error("manifest schema violation: {0}")]
    SchemaViolation(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("image decode error for {}: {source}", path.display())]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Io,
    Format,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonDivisible { .. }
            | Error::InvalidBlockSizes { .. }
            | Error::DimensionMismatch(_)
            | Error::UpscaleNotSupported { .. }
            | Error::CropTooLarge { .. }
            | Error::InvalidParameter(_)
            | Error::IncompatibleStride { .. } => ErrorClass::Validation,
            Error::BadMagic { .. }
            | Error::VersionUnsupported(_)
            | Error::LengthMismatch { .. }
            | Error::DigestMismatch(_)
            | Error::BadHeader(_)
            | Error::SchemaViolation(_) => ErrorClass::Format,
            Error::MissingFile(_) | Error::Decode { .. } | Error::Io(_) => ErrorClass::Io,
        }
    }
}
