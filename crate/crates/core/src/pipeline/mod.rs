//! Dataset-level orchestration: compress-once "default" mode with `c`
//! augmented copies per image, compress-on-read "inline" mode, and the
//! runtime sampler that serves default-mode datasets.

mod dataset;
mod default_mode;
mod inline;
mod runtime;
mod spec;

pub use dataset::{Dataset, SourceImage};
pub use default_mode::{prepare_default, PrepareOptions, MANIFEST_FILE, MATRIX_FILE};
pub use inline::{run_inline, InlineOptions, InlineReport, InlineSample};
pub use runtime::{sample_runtime, RuntimeSample, RuntimeSampler};
pub use spec::{CompressionSpec, Mode};

use crate::error::{Error, Result};
use crate::grid::{check_stride_compat, ConvArch};

pub(crate) fn require_stride(arch: Option<ConvArch>, n: usize) -> Result<()> {
    if let Some(arch) = arch {
        if !check_stride_compat(arch, n).stride_ok {
            return Err(Error::IncompatibleStride { stride: arch.stride, n });
        }
    }
    Ok(())
}

pub(crate) fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidParameter("threads must be >= 1".into()));
        }
        b = b.num_threads(t);
    }
    b.build().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}
