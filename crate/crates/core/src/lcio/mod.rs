//! On-disk formats: `.lcim` compressed images, `.lcmx` sketch matrices and
//! the JSON dataset manifest. Byte layouts are documented in
//! `docs/formats.md`; all integers are little-endian.

mod lcim;
mod lcmx;
mod manifest;

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

pub use lcim::{payload_bytes, read_lcim, write_lcim, LCIM_HEADER_LEN, LCIM_MAGIC, LCIM_VERSION};
pub use lcmx::{read_matrix, write_matrix, LCMX_HEADER_LEN, LCMX_MAGIC, LCMX_VERSION};
pub use manifest::{
    read_manifest, verify_manifest, write_manifest, DatasetManifest, ManifestEntry, MatrixRef, SkippedSource,
    MANIFEST_FORMAT, MANIFEST_VERSION,
};

use crate::compressors::Method;
use crate::error::{Error, Result};
use crate::grid::ImageDims;
use crate::image::{Dtype, Image};

pub type Digest32 = [u8; 32];

pub fn sha256(bytes: &[u8]) -> Digest32 {
    Sha256::digest(bytes).into()
}

/// A localized-compression result: the `n x n`-block grid for every channel
/// plus the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedImage {
    method: Method,
    m: usize,
    n: usize,
    spec_digest: Digest32,
    image: Image,
}

impl CompressedImage {
    pub fn new(method: Method, m: usize, n: usize, spec_digest: Digest32, image: Image) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidBlockSizes { m, n });
        }
        if !image.height().is_multiple_of(n) || !image.width().is_multiple_of(n) {
            return Err(Error::NonDivisible {
                axis: if !image.height().is_multiple_of(n) {
                    "height"
                } else {
                    "width"
                },
                len: if !image.height().is_multiple_of(n) {
                    image.height()
                } else {
                    image.width()
                },
                block: n,
            });
        }
        Ok(Self {
            method,
            m,
            n,
            spec_digest,
            image,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec_digest(&self) -> &Digest32 {
        &self.spec_digest
    }

    pub fn with_spec_digest(mut self, digest: Digest32) -> Self {
        self.spec_digest = digest;
        self
    }

    pub fn image(&self) -> &Image {
        &self.image
    }

    pub fn into_image(self) -> Image {
        self.image
    }

    pub fn dims(&self) -> ImageDims {
        self.image.dims()
    }

    pub fn dtype(&self) -> Dtype {
        self.image.dtype()
    }

    pub fn blocks_down(&self) -> usize {
        self.image.height() / self.n
    }

    pub fn blocks_across(&self) -> usize {
        self.image.width() / self.n
    }

    pub fn payload_len(&self) -> usize {
        self.image.dims().len() * self.dtype().size()
    }

    /// Same header, new pixel grid (used by the compressed-domain
    /// augmentations).
    pub(crate) fn replace_image(&self, image: Image) -> Result<Self> {
        Self::new(self.method, self.m, self.n, self.spec_digest, image)
    }
}

/// Write `bytes` to `path` through a temporary sibling and a rename, so a
/// reader never observes a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

pub fn read_lcim_file(path: &Path) -> Result<CompressedImage> {
    read_lcim(&read_file(path)?)
}

pub fn read_matrix_file(path: &Path) -> Result<crate::compressors::SketchMatrix> {
    read_matrix(&read_file(path)?)
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take<const N: usize>(&mut self) -> [u8; N] {
        let out: [u8; N] = self.bytes[self.pos..self.pos + N].try_into().expect("length checked");
        self.pos += N;
        out
    }

    pub(crate) fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }

    pub(crate) fn u16(&mut self) -> u16 {
        u16::from_le_bytes(self.take())
    }

    pub(crate) fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    pub(crate) fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }

    pub(crate) fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub(crate) fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidParameter(format!("{what} {v} exceeds u32")))
}
