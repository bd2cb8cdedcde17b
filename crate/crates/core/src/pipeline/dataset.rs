use std::collections::HashMap;
use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use crate::error::{Error, Result};

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "ppm", "pgm", "pnm"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceImage {
    pub path: PathBuf,
    /// Path relative to the dataset root, `/`-separated.
    pub rel: String,
    pub label: String,
}

/// Source images found under a directory tree, in sorted path order.
#[derive(Debug, Clone)]
pub struct Dataset {
    root: PathBuf,
    sources: Vec<SourceImage>,
}

impl Dataset {
    /// Collect PNG/PPM/PGM files under `root`. Labels come from `labels`
    /// (CSV rows `path,label` with paths relative to `root`) when given,
    /// otherwise from the parent directory name.
    pub fn scan(root: &Path, labels: Option<&Path>) -> Result<Self> {
        if !root.is_dir() {
            return Err(Error::MissingFile(root.to_path_buf()));
        }
        let table = labels.map(read_labels).transpose()?.unwrap_or_default();
        let mut sources = Vec::new();
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(|e| Error::Io(e.into()))?;
            if !entry.file_type().is_file() || !is_image(entry.path()) {
                continue;
            }
            let rel_path = entry.path().strip_prefix(root).expect("walk stays under root");
            let rel = rel_path
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            let label = table.get(&rel).cloned().unwrap_or_else(|| {
                rel_path
                    .parent()
                    .and_then(|p| p.file_name())
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            sources.push(SourceImage {
                path: entry.path().to_path_buf(),
                rel,
                label,
            });
        }
        Ok(Self {
            root: root.to_path_buf(),
            sources,
        })
    }

    pub fn from_sources(root: &Path, sources: Vec<SourceImage>) -> Self {
        Self {
            root: root.to_path_buf(),
            sources,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn sources(&self) -> &[SourceImage] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

fn read_labels(path: &Path) -> Result<HashMap<String, String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = HashMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "{}: row {} has {} fields, expected path,label",
                path.display(),
                i + 1,
                rec.len()
            )));
        }
        if i == 0 && &rec[0] == "path" && &rec[1] == "label" {
            continue;
        }
        out.insert(rec[0].to_string(), rec[1].to_string());
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if let csv::ErrorKind::Io(io) = e.kind() {
        if io.kind() == std::io::ErrorKind::NotFound {
            return Error::MissingFile(path.to_path_buf());
        }
    }
    Error::InvalidParameter(format!("{}: {e}", path.display()))
}
