//! Dataset manifest, stored as pretty-printed JSON. See `docs/formats.md`
//! for the schema.

use std::path::{Component, Path};

use serde::{Deserialize, Serialize};

use super::{read_file, sha256};
use crate::augment::AugmentRecord;
use crate::compressors::SketchKind;
use crate::error::{Error, Result};
use crate::grid::ConvArch;
use crate::pipeline::CompressionSpec;

pub const MANIFEST_FORMAT: &str = "locomp-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRef {
    pub kind: SketchKind,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub source: String,
    pub label: String,
    pub copy: usize,
    pub output: String,
    pub sha256: String,
    pub augment: AugmentRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedSource {
    pub source: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u32,
    pub spec: CompressionSpec,
    pub spec_digest: String,
    pub arch: Option<ConvArch>,
    /// Sources that produced entries; skipped sources are not counted.
    pub source_count: usize,
    pub matrices: Vec<MatrixRef>,
    pub entries: Vec<ManifestEntry>,
    #[serde(default)]
    pub skipped: Vec<SkippedSource>,
}

impl DatasetManifest {
    pub fn matrix(&self, kind: SketchKind) -> Option<&MatrixRef> {
        self.matrices.iter().find(|m| m.kind == kind)
    }

    /// Entries belonging to source `index`, in copy order. Entries are
    /// stored grouped by source.
    pub fn copies_of(&self, index: usize) -> &[ManifestEntry] {
        let c = self.spec.copies;
        &self.entries[index * c..(index + 1) * c]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SchemaViolation(msg));
        if self.format != MANIFEST_FORMAT {
            return bad(format!("format is {:?}, expected {MANIFEST_FORMAT:?}", self.format));
        }
        if self.version != MANIFEST_VERSION {
            return bad(format!("unsupported manifest version {}", self.version));
        }
        self.spec
            .validate()
            .map_err(|e| Error::SchemaViolation(format!("spec: {e}")))?;
        if self.spec_digest != hex::encode(self.spec.digest()) {
            return bad("spec_digest does not match spec".into());
        }
        if let Some(kind) = self.spec.method.sketch_kind() {
            if self.matrix(kind).is_none() {
                return bad(format!(
                    "method {} requires a {kind:?} matrix reference",
                    self.spec.method
                ));
            }
        }
        for m in &self.matrices {
            check_digest_field(&m.sha256, &m.path)?;
            check_relative(&m.path)?;
        }
        let expected = self.source_count * self.spec.copies;
        if self.entries.len() != expected {
            return bad(format!(
                "{} entries, expected source_count {} x copies {} = {expected}",
                self.entries.len(),
                self.source_count,
                self.spec.copies
            ));
        }
        for (i, e) in self.entries.iter().enumerate() {
            check_digest_field(&e.sha256, &e.output)?;
            check_relative(&e.output)?;
            if e.copy != i % self.spec.copies {
                return bad(format!("entry {i} has copy {} out of order", e.copy));
            }
        }
        Ok(())
    }
}

fn check_digest_field(d: &str, what: &str) -> Result<()> {
    if d.len() != 64 || !d.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::SchemaViolation(format!(
            "digest for {what:?} is not a 64-digit hex SHA-256"
        )));
    }
    Ok(())
}

fn check_relative(p: &str) -> Result<()> {
    let path = Path::new(p);
    if p.is_empty() || !path.components().all(|c| matches!(c, Component::Normal(_))) {
        return Err(Error::SchemaViolation(format!(
            "path {p:?} must be relative to the manifest directory without '..'"
        )));
    }
    Ok(())
}

pub fn write_manifest(manifest: &DatasetManifest) -> Result<String> {
    manifest.validate()?;
    let mut s = serde_json::to_string_pretty(manifest).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn read_manifest(text: &str) -> Result<DatasetManifest> {
    let m: DatasetManifest = serde_json::from_str(text).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    m.validate()?;
    Ok(m)
}

/// Check that every referenced file under `root` exists and matches its
/// recorded digest.
pub fn verify_manifest(manifest: &DatasetManifest, root: &Path) -> Result<()> {
    let files = manifest
        .matrices
        .iter()
        .map(|m| (&m.path, &m.sha256))
        .chain(manifest.entries.iter().map(|e| (&e.output, &e.sha256)));
    for (path, digest) in files {
        let bytes = read_file(&root.join(path))?;
        if hex::encode(sha256(&bytes)) != *digest {
            return Err(Error::DigestMismatch(path.clone()));
        }
    }
    Ok(())
}
