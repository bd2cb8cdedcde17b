use std::fs;
use std::path::PathBuf;

use log::warn;
use rayon::prelude::*;

use super::{require_stride, thread_pool, CompressionSpec, Dataset, Mode};
use crate::augment::{crop_and_flip, resize, AugmentRecord};
use crate::compressors::compress_image;
use crate::error::{Error, Result};
use crate::grid::ConvArch;
use crate::image::Image;
use crate::lcio::{CompressedImage, SkippedSource};
use crate::rng::{inline_stream, substream};

#[derive(Debug, Clone)]
pub struct InlineOptions {
    pub epochs: usize,
    pub arch: Option<ConvArch>,
    /// Where to persist the resized uncompressed images, if anywhere.
    pub resized_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for InlineOptions {
    fn default() -> Self {
        Self {
            epochs: 1,
            arch: None,
            resized_dir: None,
            threads: None,
        }
    }
}

/// One network-ready tensor emitted by [`run_inline`].
#[derive(Debug, Clone)]
pub struct InlineSample {
    pub epoch: usize,
    pub source_index: usize,
    pub source: String,
    pub label: String,
    pub augment: AugmentRecord,
    pub tensor: CompressedImage,
}

#[derive(Debug, Clone, Default)]
pub struct InlineReport {
    pub emitted: usize,
    pub skipped: Vec<SkippedSource>,
}

/// Resize every source once, then for each epoch augment, compress and
/// hand each tensor to `sink` in source order. Unreadable sources are
/// skipped and reported; the run continues.
pub fn run_inline<F>(
    dataset: &Dataset,
    spec: &CompressionSpec,
    opts: &InlineOptions,
    mut sink: F,
) -> Result<InlineReport>
where
    F: FnMut(InlineSample) -> Result<()>,
{
    spec.validate()?;
    if spec.mode != Mode::Inline {
        return Err(Error::InvalidParameter(format!(
            "run_inline needs mode=inline, got {}",
            spec.mode
        )));
    }
    require_stride(opts.arch, spec.n)?;
    let matrix = spec.sketch_matrix()?;
    let compressor = spec.compressor(matrix.as_ref())?;
    let digest = spec.digest();
    let pool = thread_pool(opts.threads)?;
    if let Some(dir) = &opts.resized_dir {
        fs::create_dir_all(dir)?;
    }

    let loaded: Vec<(usize, Result<Image>)> = pool.install(|| {
        dataset
            .sources()
            .par_iter()
            .enumerate()
            .map(|(idx, src)| {
                let img = Image::load(&src.path).and_then(|img| resize(&img, spec.resize_to));
                (idx, img)
            })
            .collect()
    });

    let mut report = InlineReport::default();
    let mut resized = Vec::new();
    for (idx, img) in loaded {
        let src = &dataset.sources()[idx];
        match img {
            Ok(img) => {
                if let Some(dir) = &opts.resized_dir {
                    img.save_png(&dir.join(format!("{idx:06}.png")))?;
                }
                resized.push((idx, img));
            }
            Err(e) => {
                warn!("skipping {}: {e}", src.rel);
                report.skipped.push(SkippedSource {
                    source: src.rel.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }

    let total = dataset.len();
    for epoch in 0..opts.epochs {
        let tensors: Vec<Result<(AugmentRecord, CompressedImage)>> = pool.install(|| {
            resized
                .par_iter()
                .map(|(idx, img)| {
                    let stream = inline_stream(epoch, *idx, total);
                    let mut rng = substream(spec.seed, stream);
                    let (aug, mut record) = crop_and_flip(img, spec.crop_to, spec.flip_prob, &mut rng)?;
                    record.stream = stream;
                    let tensor = compress_image(&aug, &compressor)?.with_spec_digest(digest);
                    Ok((record, tensor))
                })
                .collect()
        });
        for ((idx, _), t) in resized.iter().zip(tensors) {
            let (augment, tensor) = t?;
            let src = &dataset.sources()[*idx];
            sink(InlineSample {
                epoch,
                source_index: *idx,
                source: src.rel.clone(),
                label: src.label.clone(),
                augment,
                tensor,
            })?;
            report.emitted += 1;
        }
    }
    Ok(report)
}
