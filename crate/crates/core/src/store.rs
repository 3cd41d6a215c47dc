//! Score store: one CSV per model with rows `id,model,score,f1..fK`.
//!
//! The same schema carries natively computed scores and scores produced by
//! external tools. A missing score is written as an empty field and read back
//! as NaN; such rows can still feed feature-based fusion.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::models::Model;
use crate::Real;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord<T> {
    pub id: String,
    pub model: String,
    pub score: T,
    pub features: Vec<T>,
}

fn io_err(path: &Path, source: std::io::Error) -> StoreError {
    StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt_err(path: &Path, reason: impl Into<String>) -> StoreError {
    StoreError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Reads every row of a score CSV. Rows may carry any number of feature columns.
pub fn read_score_file<T: Real>(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord<T>>, StoreError> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => io_err(path, io),
            other => fmt_err(path, format!("{other:?}")),
        })?;
    let headers = rdr.headers().map_err(|e| fmt_err(path, e.to_string()))?.clone();
    let expected = ["id", "model", "score"];
    if headers.len() < 3 || headers.iter().take(3).ne(expected.iter().copied()) {
        return Err(fmt_err(path, "header must start with `id,model,score`"));
    }
    let parse = |text: &str, row: usize| -> Result<T, StoreError> {
        if text.is_empty() {
            Ok(T::nan())
        } else {
            text.parse::<T>()
                .map_err(|_| fmt_err(path, format!("row {row}: cannot parse `{text}`")))
        }
    };
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| fmt_err(path, e.to_string()))?;
        if record.len() < 3 {
            return Err(fmt_err(path, format!("row {row}: fewer than 3 columns")));
        }
        let mut fields: Vec<&str> = record.iter().collect();
        // trailing empty feature cells come from ragged writers; drop them
        while fields.len() > 3 && fields.last() == Some(&"") {
            fields.pop();
        }
        let features = fields[3..]
            .iter()
            .map(|t| parse(t, row))
            .collect::<Result<Vec<T>, _>>()?;
        out.push(ScoreRecord {
            id: fields[0].to_string(),
            model: fields[1].to_string(),
            score: parse(fields[2], row)?,
            features,
        });
    }
    Ok(out)
}

fn format_value<T: Real>(v: T) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

/// Writes records via a temporary file and rename so readers never see a partial file.
pub fn write_score_file<'a, T: Real>(
    path: impl AsRef<Path>,
    records: impl IntoIterator<Item = &'a ScoreRecord<T>>,
) -> Result<(), StoreError> {
    let path = path.as_ref();
    let records: Vec<&ScoreRecord<T>> = records.into_iter().collect();
    let arity = records.iter().map(|r| r.features.len()).max().unwrap_or(0);
    let mut text = String::from("id,model,score");
    for k in 1..=arity {
        text.push_str(&format!(",f{k}"));
    }
    text.push('\n');
    for r in records {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let mut row = vec![r.id.clone(), r.model.clone(), format_value(r.score)];
        row.extend(r.features.iter().map(|&f| format_value(f)));
        row.resize(3 + arity, String::new());
        w.write_record(&row).map_err(|e| fmt_err(path, e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| fmt_err(path, e.to_string()))?;
        text.push_str(&String::from_utf8_lossy(&bytes));
    }
    write_atomic(path, text.as_bytes())
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Directory of per-model score files.
#[derive(Debug, Clone)]
pub struct ScoreStore {
    dir: PathBuf,
}

impl ScoreStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, model: Model) -> PathBuf {
        self.dir.join(format!("{}.csv", model.id()))
    }

    /// Rows for one model keyed by entry id; an absent file is an empty map.
    pub fn load<T: Real>(&self, model: Model) -> Result<BTreeMap<String, ScoreRecord<T>>, StoreError> {
        let path = self.path_for(model);
        if !path.exists() {
            return Ok(BTreeMap::new());
        }
        Ok(read_score_file(&path)?
            .into_iter()
            .map(|r| (r.id.clone(), r))
            .collect())
    }

    pub fn save<T: Real>(&self, model: Model, records: &BTreeMap<String, ScoreRecord<T>>) -> Result<(), StoreError> {
        write_score_file(self.path_for(model), records.values())
    }
}
