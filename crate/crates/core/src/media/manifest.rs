use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::MediaError;

pub const MANIFEST_COLUMNS: [&str; 8] = [
    "id",
    "content_id",
    "ref_video",
    "dist_video",
    "ref_audio",
    "dist_audio",
    "distortion_label",
    "mos",
];

/// One reference/distorted pairing. Paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub content_id: String,
    pub ref_video: PathBuf,
    pub dist_video: PathBuf,
    pub ref_audio: PathBuf,
    pub dist_audio: PathBuf,
    pub distortion_label: String,
    pub mos: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self, MediaError> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(MediaError::DuplicateId(e.id.clone()));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct content ids in first-appearance order.
    pub fn content_ids(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .map(|e| e.content_id.as_str())
            .filter(|c| seen.insert(*c))
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Checks that every referenced media file exists.
    pub fn validate_paths(&self) -> Result<(), MediaError> {
        for e in &self.entries {
            for p in [&e.ref_video, &e.dist_video, &e.ref_audio, &e.dist_audio] {
                if !p.exists() {
                    return Err(MediaError::UnresolvablePath {
                        id: e.id.clone(),
                        path: p.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Writes the manifest CSV. Paths are written as stored.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), MediaError> {
        let path = path.as_ref();
        let csv_err = |e: csv::Error| MediaError::Csv {
            path: path.to_path_buf(),
            reason: e.to_string(),
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(MANIFEST_COLUMNS).map_err(csv_err)?;
        for e in &self.entries {
            let mos = e.mos.map(|m| m.to_string()).unwrap_or_default();
            w.write_record([
                e.id.as_str(),
                e.content_id.as_str(),
                &e.ref_video.to_string_lossy(),
                &e.dist_video.to_string_lossy(),
                &e.ref_audio.to_string_lossy(),
                &e.dist_audio.to_string_lossy(),
                e.distortion_label.as_str(),
                &mos,
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| MediaError::io(path, e))
    }
}

/// Loads a manifest CSV, preserving row order.
///
/// Relative media paths are resolved against the manifest's parent directory.
/// Existence of media files is only checked when `validate_paths` is set.
pub fn load_manifest(path: impl AsRef<Path>, validate_paths: bool) -> Result<DatasetManifest, MediaError> {
    let path = path.as_ref();
    let csv_err = |reason: String| MediaError::Csv {
        path: path.to_path_buf(),
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => MediaError::io(path, std::io::Error::other(e.to_string())),
            _ => csv_err(e.to_string()),
        })?;
    let headers = rdr.headers().map_err(|e| csv_err(e.to_string()))?.clone();
    let mut index = [0usize; 8];
    for (slot, column) in index.iter_mut().zip(MANIFEST_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| MediaError::MissingColumn {
                path: path.to_path_buf(),
                column: column.to_string(),
            })?;
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &str| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };

    let mut entries = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(e.to_string()))?;
        let field = |i: usize| record.get(index[i]).unwrap_or("");
        let mos = match field(7) {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| csv_err(format!("row {}: invalid mos `{s}`", row + 2)))?,
            ),
        };
        entries.push(ManifestEntry {
            id: field(0).to_string(),
            content_id: field(1).to_string(),
            ref_video: resolve(field(2)),
            dist_video: resolve(field(3)),
            ref_audio: resolve(field(4)),
            dist_audio: resolve(field(5)),
            distortion_label: field(6).to_string(),
            mos,
        });
    }
    let manifest = DatasetManifest::new(entries)?;
    if validate_paths {
        manifest.validate_paths()?;
    }
    Ok(manifest)
}
