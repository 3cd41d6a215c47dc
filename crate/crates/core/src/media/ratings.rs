use std::collections::HashMap;
use std::path::Path;

use crate::Real;

use super::MediaError;

/// Raw subject x sequence rating matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsMatrix<T> {
    pub subject_ids: Vec<String>,
    pub sequence_ids: Vec<String>,
    /// `raw[i][j]` is subject i's rating of sequence j.
    pub raw: Vec<Vec<T>>,
}

impl<T: Real> RatingsMatrix<T> {
    pub fn new(subject_ids: Vec<String>, sequence_ids: Vec<String>, raw: Vec<Vec<T>>) -> Result<Self, MediaError> {
        if subject_ids.len() < 2 {
            return Err(MediaError::InvalidRatings(format!(
                "need at least 2 subjects, got {}",
                subject_ids.len()
            )));
        }
        if raw.len() != subject_ids.len() {
            return Err(MediaError::InvalidRatings("row count differs from subject count".into()));
        }
        if let Some(i) = raw.iter().position(|r| r.len() != sequence_ids.len()) {
            return Err(MediaError::InvalidRatings(format!(
                "subject `{}` rated {} of {} sequences",
                subject_ids[i],
                raw[i].len(),
                sequence_ids.len()
            )));
        }
        if raw.iter().flatten().any(|r| !r.is_finite()) {
            return Err(MediaError::InvalidRatings("non-finite rating".into()));
        }
        Ok(Self {
            subject_ids,
            sequence_ids,
            raw,
        })
    }

    /// Builds a matrix with generated ids `s0..`, `q0..`.
    pub fn from_rows(raw: Vec<Vec<T>>) -> Result<Self, MediaError> {
        let n = raw.len();
        let m = raw.first().map_or(0, Vec::len);
        Self::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            (0..m).map(|j| format!("q{j}")).collect(),
            raw,
        )
    }
}

/// Reads long-format ratings `subject_id,sequence_id,rating`.
///
/// Subjects and sequences keep first-appearance order. Every subject must rate
/// every sequence exactly once.
pub fn load_ratings<T: Real>(path: impl AsRef<Path>) -> Result<RatingsMatrix<T>, MediaError> {
    let path = path.as_ref();
    let csv_err = |reason: String| MediaError::Csv {
        path: path.to_path_buf(),
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| csv_err(e.to_string()))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| MediaError::MissingColumn {
            path: path.to_path_buf(),
            column: name.to_string(),
        })
    };
    let (cs, cq, cr) = (col("subject_id")?, col("sequence_id")?, col("rating")?);

    let mut subjects: Vec<String> = Vec::new();
    let mut sequences: Vec<String> = Vec::new();
    let mut subject_index = HashMap::new();
    let mut sequence_index = HashMap::new();
    let mut cells: HashMap<(usize, usize), T> = HashMap::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(e.to_string()))?;
        let s = record.get(cs).unwrap_or("").to_string();
        let q = record.get(cq).unwrap_or("").to_string();
        let r_text = record.get(cr).unwrap_or("");
        let r: T = r_text
            .parse()
            .map_err(|_| csv_err(format!("row {}: invalid rating `{r_text}`", row + 2)))?;
        let si = *subject_index.entry(s.clone()).or_insert_with(|| {
            subjects.push(s.clone());
            subjects.len() - 1
        });
        let qi = *sequence_index.entry(q.clone()).or_insert_with(|| {
            sequences.push(q.clone());
            sequences.len() - 1
        });
        if cells.insert((si, qi), r).is_some() {
            return Err(MediaError::InvalidRatings(format!("subject `{s}` rated `{q}` twice")));
        }
    }
    let mut raw = vec![Vec::with_capacity(sequences.len()); subjects.len()];
    for (si, row) in raw.iter_mut().enumerate() {
        for qi in 0..sequences.len() {
            let v = cells.get(&(si, qi)).ok_or_else(|| {
                MediaError::InvalidRatings(format!(
                    "subject `{}` has no rating for `{}`",
                    subjects[si], sequences[qi]
                ))
            })?;
            row.push(*v);
        }
    }
    RatingsMatrix::new(subjects, sequences, raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_format_pivots() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(
            &path,
            "subject_id,sequence_id,rating\nalice,v1,4\nalice,v2,6\nbob,v2,8\nbob,v1,2\n",
        )
        .unwrap();
        let m: RatingsMatrix<f64> = load_ratings(&path).unwrap();
        assert_eq!(m.subject_ids, vec!["alice", "bob"]);
        assert_eq!(m.sequence_ids, vec!["v1", "v2"]);
        assert_eq!(m.raw, vec![vec![4.0, 6.0], vec![2.0, 8.0]]);
    }

    #[test]
    fn missing_cell_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "subject_id,sequence_id,rating\na,v1,4\na,v2,6\nb,v1,2\n").unwrap();
        assert!(matches!(load_ratings::<f64>(&path), Err(MediaError::InvalidRatings(_))));
    }

    #[test]
    fn single_subject_rejected() {
        assert!(RatingsMatrix::from_rows(vec![vec![1.0f64, 2.0]]).is_err());
    }
}
