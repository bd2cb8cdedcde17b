use std::fs;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;

use super::{require_stride, thread_pool, CompressionSpec, Dataset, Mode};
use crate::augment::{augment_full, AugmentParams};
use crate::compressors::{compress_image, Compressor};
use crate::error::{Error, Result};
use crate::grid::ConvArch;
use crate::image::Image;
use crate::lcio::{
    sha256, write_atomic, write_lcim, write_manifest, write_matrix, DatasetManifest, ManifestEntry, MatrixRef,
    SkippedSource, MANIFEST_FORMAT, MANIFEST_VERSION,
};
use crate::rng::{default_stream, substream};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MATRIX_FILE: &str = "matrix.lcmx";

#[derive(Debug, Clone, Default)]
pub struct PrepareOptions {
    /// Downstream first-layer geometry; when set, `s mod n == 0` is enforced.
    pub arch: Option<ConvArch>,
    /// Worker threads; `None` uses the global rayon pool size.
    pub threads: Option<usize>,
}

enum SourceOutcome {
    Done(Vec<ManifestEntry>),
    Skipped(SkippedSource),
}

/// Produce `spec.copies` augmented, compressed copies of every source image
/// under `out_dir`, then write the manifest. The manifest is written last
/// and atomically; any earlier manifest is removed first, so an aborted run
/// never leaves a manifest describing a partial tree.
pub fn prepare_default(
    dataset: &Dataset,
    spec: &CompressionSpec,
    out_dir: &Path,
    opts: &PrepareOptions,
) -> Result<DatasetManifest> {
    spec.validate()?;
    if spec.mode != Mode::Default {
        return Err(Error::InvalidParameter(format!(
            "prepare_default needs mode=default, got {}",
            spec.mode
        )));
    }
    require_stride(opts.arch, spec.n)?;

    fs::create_dir_all(out_dir.join("data"))?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        fs::remove_file(&manifest_path)?;
    }

    let matrix = spec.sketch_matrix()?;
    let mut matrices = Vec::new();
    if let Some(mat) = &matrix {
        let bytes = write_matrix(mat)?;
        write_atomic(&out_dir.join(MATRIX_FILE), &bytes)?;
        matrices.push(MatrixRef {
            kind: mat.kind(),
            path: MATRIX_FILE.into(),
            sha256: hex::encode(sha256(&bytes)),
        });
    }
    let compressor = spec.compressor(matrix.as_ref())?;
    let digest = spec.digest();

    let pool = thread_pool(opts.threads)?;
    let outcomes: Vec<Result<SourceOutcome>> = pool.install(|| {
        dataset
            .sources()
            .par_iter()
            .enumerate()
            .map(|(idx, src)| {
                let image = match Image::load(&src.path) {
                    Ok(img) => img,
                    Err(e) => {
                        warn!("skipping {}: {e}", src.rel);
                        return Ok(SourceOutcome::Skipped(SkippedSource {
                            source: src.rel.clone(),
                            reason: e.to_string(),
                        }));
                    }
                };
                let mut entries = Vec::with_capacity(spec.copies);
                for copy in 0..spec.copies {
                    let stream = default_stream(idx, spec.copies, copy);
                    let (bytes, mut record) = compress_copy(&image, spec, &compressor, digest, stream)?;
                    record.stream = stream;
                    let output = format!("data/{idx:06}_{copy}.lcim");
                    write_atomic(&out_dir.join(&output), &bytes)?;
                    entries.push(ManifestEntry {
                        source: src.rel.clone(),
                        label: src.label.clone(),
                        copy,
                        output,
                        sha256: hex::encode(sha256(&bytes)),
                        augment: record,
                    });
                }
                Ok(SourceOutcome::Done(entries))
            })
            .collect()
    });

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let mut source_count = 0;
    for outcome in outcomes {
        match outcome? {
            SourceOutcome::Done(e) => {
                source_count += 1;
                entries.extend(e);
            }
            SourceOutcome::Skipped(s) => skipped.push(s),
        }
    }

    let manifest = DatasetManifest {
        format: MANIFEST_FORMAT.into(),
        version: MANIFEST_VERSION,
        spec: spec.clone(),
        spec_digest: hex::encode(digest),
        arch: opts.arch,
        source_count,
        matrices,
        entries,
        skipped,
    };
    write_atomic(&manifest_path, write_manifest(&manifest)?.as_bytes())?;
    info!(
        "prepared {} entries from {} sources ({} skipped)",
        manifest.entries.len(),
        source_count,
        manifest.skipped.len()
    );
    Ok(manifest)
}

fn compress_copy(
    image: &Image,
    spec: &CompressionSpec,
    compressor: &Compressor,
    digest: [u8; 32],
    stream: u64,
) -> Result<(Vec<u8>, crate::augment::AugmentRecord)> {
    let params = AugmentParams {
        resize_to: spec.resize_to,
        crop_to: spec.crop_to,
        flip_prob: spec.flip_prob,
    };
    let mut rng = substream(spec.seed, stream);
    let (augmented, record) = augment_full(image, &params, &mut rng)?;
    let cimg = compress_image(&augmented, compressor)?.with_spec_digest(digest);
    Ok((write_lcim(&cimg)?, record))
}
