//! Batch metric computation over a manifest into a resumable score store.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::audio::{self, AudioQualityResult};
use crate::error::MetricError;
use crate::media::{read_wav, read_yuv_sequence, DatasetManifest, ManifestEntry};
use crate::models::{AudioModel, Model, VideoModel};
use crate::sphere::{sphere_samples, GeometryError, SphereSampleSet, MIN_SPHERE_POINTS};
use crate::store::{write_atomic, ScoreRecord, ScoreStore, StoreError};
use crate::video::{self, VideoMetric, VideoQualityResult};

/// Name of the per-run failure list written next to the score files.
pub const FAILURES_FILE: &str = "failures.csv";

#[derive(Debug, Clone)]
pub struct MetricsConfig {
    pub video_models: Vec<VideoModel>,
    pub audio_models: Vec<AudioModel>,
    /// Frame geometry of the raw I420 files; required for native video models.
    pub dimensions: Option<(usize, usize)>,
    pub sphere_points: usize,
    /// Directory of `<model>.csv` files used instead of native computation.
    pub external_scores: Option<PathBuf>,
    /// Entries scored between two store checkpoints.
    pub checkpoint_every: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            video_models: Vec::new(),
            audio_models: Vec::new(),
            dimensions: None,
            sphere_points: crate::sphere::DEFAULT_SPHERE_POINTS,
            external_scores: None,
            checkpoint_every: 64,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("video frame size unknown; pass the width and height of the raw files")]
    MissingDimensions,
    #[error("{model} has no native implementation and no external score file at {path}")]
    NoExternalScores { model: String, path: PathBuf },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Skipped,
    Failed,
}

/// One progress record per (entry, model).
#[derive(Debug, Clone, Serialize)]
pub struct ProgressEvent {
    pub id: String,
    pub model: &'static str,
    pub status: EntryStatus,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryFailure {
    pub id: String,
    pub model: &'static str,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetricsSummary {
    pub computed: usize,
    pub skipped: usize,
    pub external: usize,
    pub failures: Vec<EntryFailure>,
}

fn record(model: Model, id: &str, score: f64, features: Vec<f64>) -> ScoreRecord<f64> {
    ScoreRecord {
        id: id.to_string(),
        model: model.id().to_string(),
        score,
        features,
    }
}

fn external_path(config: &MetricsConfig, model: Model) -> Option<PathBuf> {
    config
        .external_scores
        .as_ref()
        .map(|d| d.join(format!("{}.csv", model.id())))
        .filter(|p| p.exists())
}

enum Job {
    Video(VideoModel, Box<dyn VideoMetric<f64>>),
    Audio(AudioModel),
}

impl Job {
    fn model(&self) -> Model {
        match self {
            Job::Video(m, _) => Model::Video(*m),
            Job::Audio(m) => Model::Audio(*m),
        }
    }
}

fn score_video(metric: &dyn VideoMetric<f64>, e: &ManifestEntry, dims: (usize, usize)) -> Result<VideoQualityResult<f64>, MetricError> {
    let r = read_yuv_sequence(&e.ref_video, dims.0, dims.1)?;
    let d = read_yuv_sequence(&e.dist_video, dims.0, dims.1)?;
    metric.evaluate(&r, &d)
}

fn score_audio(model: AudioModel, e: &ManifestEntry) -> Result<AudioQualityResult<f64>, MetricError> {
    let r = read_wav::<f64>(&e.ref_audio)?;
    let d = read_wav::<f64>(&e.dist_audio)?;
    audio::evaluate_clip(model, &r, &d)
}

fn write_failures(path: &Path, failures: &[EntryFailure]) -> Result<(), StoreError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |fields: [&str; 3]| {
        w.write_record(fields).map_err(|e| StoreError::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    };
    row(["id", "model", "error"])?;
    for f in failures {
        row([&f.id, f.model, &f.error])?;
    }
    let bytes = w.into_inner().map_err(|e| StoreError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    write_atomic(path, &bytes)
}

/// Scores every manifest entry with every selected model, skipping rows already in the store.
///
/// Per-entry failures do not stop the run; they are returned and listed in
/// `failures.csv` inside the store directory (removed when a run has none).
/// Parallelism follows the current rayon pool.
pub fn compute_scores(
    manifest: &DatasetManifest,
    store: &ScoreStore,
    config: &MetricsConfig,
    progress: &(dyn Fn(&ProgressEvent) + Sync),
) -> Result<MetricsSummary, PipelineError> {
    let mut summary = MetricsSummary::default();
    let mut jobs = Vec::new();
    let mut samples: Option<SphereSampleSet<f64>> = None;

    for &m in &config.video_models {
        let model = Model::Video(m);
        if let Some(path) = external_path(config, model) {
            summary.external += import_external(store, model, &path, manifest)?;
            continue;
        }
        let count = if m == VideoModel::SPsnr { config.sphere_points } else { MIN_SPHERE_POINTS };
        if samples.as_ref().is_none_or(|s| s.len() != count) {
            samples = Some(sphere_samples(count)?);
        }
        match video::native_metric::<f64>(m, samples.as_ref().expect("just built")) {
            Some(metric) => jobs.push(Job::Video(m, metric)),
            None => return Err(missing_external(config, model)),
        }
    }
    for &m in &config.audio_models {
        let model = Model::Audio(m);
        if let Some(path) = external_path(config, model) {
            summary.external += import_external(store, model, &path, manifest)?;
            continue;
        }
        if audio::native_metric::<f64>(m).is_none() {
            return Err(missing_external(config, model));
        }
        jobs.push(Job::Audio(m));
    }
    if jobs.iter().any(|j| matches!(j, Job::Video(..))) && config.dimensions.is_none() {
        return Err(PipelineError::MissingDimensions);
    }

    for job in &jobs {
        let model = job.model();
        let mut rows = store.load::<f64>(model)?;
        let pending: Vec<&ManifestEntry> = manifest
            .entries
            .iter()
            .filter(|e| {
                let done = rows.contains_key(&e.id);
                if done {
                    summary.skipped += 1;
                    progress(&ProgressEvent {
                        id: e.id.clone(),
                        model: model.id(),
                        status: EntryStatus::Skipped,
                        seconds: 0.0,
                        error: None,
                    });
                }
                !done
            })
            .collect();
        for chunk in pending.chunks(config.checkpoint_every.max(1)) {
            let results: Vec<(&ManifestEntry, Result<ScoreRecord<f64>, MetricError>)> = chunk
                .par_iter()
                .map(|e| {
                    let t0 = Instant::now();
                    let res = match job {
                        Job::Video(_, metric) => score_video(metric.as_ref(), e, config.dimensions.expect("checked"))
                            .map(|r| record(model, &e.id, r.score, r.features)),
                        Job::Audio(m) => score_audio(*m, e).map(|r| record(model, &e.id, r.score, r.features)),
                    };
                    progress(&ProgressEvent {
                        id: e.id.clone(),
                        model: model.id(),
                        status: if res.is_ok() { EntryStatus::Ok } else { EntryStatus::Failed },
                        seconds: t0.elapsed().as_secs_f64(),
                        error: res.as_ref().err().map(|e| e.to_string()),
                    });
                    (*e, res)
                })
                .collect();
            for (e, res) in results {
                match res {
                    Ok(rec) => {
                        summary.computed += 1;
                        rows.insert(e.id.clone(), rec);
                    }
                    Err(err) => summary.failures.push(EntryFailure {
                        id: e.id.clone(),
                        model: model.id(),
                        error: err.to_string(),
                    }),
                }
            }
            store.save(model, &rows)?;
        }
    }

    let failures_path = store.dir().join(FAILURES_FILE);
    if summary.failures.is_empty() {
        if failures_path.exists() {
            std::fs::remove_file(&failures_path).map_err(|e| StoreError::Io {
                path: failures_path.clone(),
                source: e,
            })?;
        }
    } else {
        write_failures(&failures_path, &summary.failures)?;
    }
    Ok(summary)
}

fn missing_external(config: &MetricsConfig, model: Model) -> PipelineError {
    PipelineError::NoExternalScores {
        model: model.display_name().to_string(),
        path: config
            .external_scores
            .as_ref()
            .map(|d| d.join(format!("{}.csv", model.id())))
            .unwrap_or_else(|| PathBuf::from(format!("<external-scores>/{}.csv", model.id()))),
    }
}

/// Copies manifest rows of an external score file into the store; returns rows added.
fn import_external(store: &ScoreStore, model: Model, path: &Path, manifest: &DatasetManifest) -> Result<usize, PipelineError> {
    let rows: BTreeMap<String, ScoreRecord<f64>> = match model {
        Model::Video(m) => video::external_video_scores::<f64>(path, m)?
            .into_iter()
            .map(|(id, r)| (id.clone(), record(model, &id, r.score, r.features)))
            .collect(),
        Model::Audio(m) => audio::external_audio_scores::<f64>(path, m)?
            .into_iter()
            .map(|(id, r)| (id.clone(), record(model, &id, r.score, r.features)))
            .collect(),
    };
    let mut existing = store.load::<f64>(model)?;
    let mut added = 0;
    for e in &manifest.entries {
        if let Some(r) = rows.get(&e.id) {
            if existing.insert(e.id.clone(), r.clone()).as_ref() != Some(r) {
                added += 1;
            }
        }
    }
    store.save(model, &existing)?;
    Ok(added)
}
