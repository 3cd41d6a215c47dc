use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::media::{DatasetManifest, ManifestEntry};

use super::EvalError;

pub const TRAIN_FRACTION: f64 = 0.8;

/// Content-level train/test partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
}

impl SplitPlan {
    pub fn is_train(&self, content_id: &str) -> bool {
        self.train.iter().any(|c| c == content_id)
    }

    pub fn is_test(&self, content_id: &str) -> bool {
        self.test.iter().any(|c| c == content_id)
    }

    /// Entries of the manifest on each side of the split.
    pub fn partition<'a>(&self, entries: impl IntoIterator<Item = &'a ManifestEntry>) -> (Vec<&'a ManifestEntry>, Vec<&'a ManifestEntry>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for e in entries {
            if self.is_train(&e.content_id) {
                train.push(e);
            } else if self.is_test(&e.content_id) {
                test.push(e);
            }
        }
        (train, test)
    }
}

/// Shuffles the sorted content ids with a seeded ChaCha8 stream and sends
/// `round(0.8 n)` of them (at most `n - 1`) to training.
pub fn split_by_content(manifest: &DatasetManifest, seed: u64) -> Result<SplitPlan, EvalError> {
    let contents: BTreeSet<&str> = manifest.entries.iter().map(|e| e.content_id.as_str()).collect();
    let mut contents: Vec<String> = contents.into_iter().map(str::to_string).collect();
    let n = contents.len();
    if n < 2 {
        return Err(EvalError::TooFewContents(n));
    }
    contents.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((n as f64 * TRAIN_FRACTION).round() as usize).min(n - 1);
    let test = contents.split_off(n_train);
    Ok(SplitPlan {
        train: contents,
        test,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn manifest(contents: usize, per_content: usize) -> DatasetManifest {
        let entries = (0..contents)
            .flat_map(|c| {
                (0..per_content).map(move |d| ManifestEntry {
                    id: format!("c{c}_d{d}"),
                    content_id: format!("c{c}"),
                    ref_video: PathBuf::from("r.yuv"),
                    dist_video: PathBuf::from("d.yuv"),
                    ref_audio: PathBuf::from("r.wav"),
                    dist_audio: PathBuf::from("d.wav"),
                    distortion_label: format!("d{d}"),
                    mos: Some(50.0),
                })
            })
            .collect();
        DatasetManifest::new(entries).unwrap()
    }

    #[test]
    fn fifteen_contents() {
        let m = manifest(15, 5);
        let p = split_by_content(&m, 7).unwrap();
        assert_eq!((p.train.len(), p.test.len()), (12, 3));
        assert_eq!(p, split_by_content(&m, 7).unwrap());
        let (tr, te) = p.partition(&m.entries);
        assert_eq!((tr.len(), te.len()), (60, 15));
        assert!(tr.iter().all(|e| !p.is_test(&e.content_id)));
    }

    #[test]
    fn small_manifests() {
        let p = split_by_content(&manifest(2, 1), 0).unwrap();
        assert_eq!((p.train.len(), p.test.len()), (1, 1));
        assert!(matches!(split_by_content(&manifest(1, 3), 0), Err(EvalError::TooFewContents(1))));
    }

    #[test]
    fn disjoint_over_many_seeds() {
        let m = manifest(10, 2);
        for seed in 0..200 {
            let p = split_by_content(&m, seed).unwrap();
            assert!(p.train.iter().all(|c| !p.test.contains(c)));
            assert_eq!(p.train.len() + p.test.len(), 10);
        }
    }
}
