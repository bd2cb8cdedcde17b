use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

use super::default_mode::MANIFEST_FILE;
use crate::augment::{augment_limited, LimitedAugmentParams};
use crate::error::{Error, Result};
use crate::lcio::{read_file, read_lcim, read_manifest, sha256, CompressedImage, DatasetManifest};

#[derive(Debug, Clone)]
pub struct RuntimeSample {
    pub source_index: usize,
    pub copy: usize,
    pub label: String,
    pub image: CompressedImage,
}

/// Serves training-time samples from a default-mode dataset: pick one of
/// the stored copies uniformly, then apply the compressed-domain
/// augmentations.
#[derive(Debug, Clone)]
pub struct RuntimeSampler {
    root: PathBuf,
    manifest: DatasetManifest,
    params: LimitedAugmentParams,
}

impl RuntimeSampler {
    pub fn new(root: &Path, manifest: DatasetManifest, params: LimitedAugmentParams) -> Result<Self> {
        manifest.validate()?;
        params.validate()?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
            params,
        })
    }

    /// Open a dataset directory (or its manifest file directly).
    pub fn open(path: &Path, params: LimitedAugmentParams) -> Result<Self> {
        let (root, manifest_path) = if path.is_dir() {
            (path.to_path_buf(), path.join(MANIFEST_FILE))
        } else {
            let root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
            (root, path.to_path_buf())
        };
        let text = fs::read_to_string(&manifest_path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(manifest_path.clone()),
            _ => Error::Io(e),
        })?;
        Self::new(&root, read_manifest(&text)?, params)
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn source_count(&self) -> usize {
        self.manifest.source_count
    }

    /// Draw a sample for source `index`: the copy is drawn first, then the
    /// limited-augmentation draws.
    pub fn sample_source<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Result<RuntimeSample> {
        if index >= self.manifest.source_count {
            return Err(Error::InvalidParameter(format!(
                "source index {index} out of range (dataset has {})",
                self.manifest.source_count
            )));
        }
        let copies = self.manifest.copies_of(index);
        let copy = rng.random_range(0..copies.len());
        let entry = &copies[copy];
        let bytes = read_file(&self.root.join(&entry.output))?;
        if hex::encode(sha256(&bytes)) != entry.sha256 {
            return Err(Error::DigestMismatch(entry.output.clone()));
        }
        let stored = read_lcim(&bytes)?;
        let image = augment_limited(&stored, &self.params, rng)?;
        Ok(RuntimeSample {
            source_index: index,
            copy,
            label: entry.label.clone(),
            image,
        })
    }

    /// Draw a source uniformly, then sample it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RuntimeSample> {
        if self.manifest.source_count == 0 {
            return Err(Error::InvalidParameter("dataset has no sources".into()));
        }
        let index = rng.random_range(0..self.manifest.source_count);
        self.sample_source(index, rng)
    }
}

/// One-shot form of [`RuntimeSampler::sample_source`].
pub fn sample_runtime<R: Rng + ?Sized>(
    manifest: &DatasetManifest,
    root: &Path,
    index: usize,
    params: &LimitedAugmentParams,
    rng: &mut R,
) -> Result<RuntimeSample> {
    RuntimeSampler::new(root, manifest.clone(), *params)?.sample_source(index, rng)
}
