use std::path::Path;

use oavqa::eval::{self, BenchmarkConfig, EvalError, ScoreTable};
use oavqa::fusion::{train_fusion, FusionError, FusionMethod, SvrConfig};
use oavqa::media::{load_manifest, load_ratings, DatasetManifest};
use oavqa::models::{AudioModel, Model, VideoModel};
use oavqa::pipeline::{compute_scores, MetricsConfig, PipelineError, FAILURES_FILE};
use oavqa::store::{write_atomic, ScoreStore};
use serde_json::json;

use crate::logging::emit;
use crate::{BenchmarkArgs, MetricsArgs, ModelArgs, MosArgs, SvrArgs, TrainArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("convergence error: {0}")]
    Convergence(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }
}

impl From<FusionError> for CliError {
    fn from(e: FusionError) -> Self {
        match e {
            FusionError::NotConverged { .. } => CliError::Convergence(e.to_string()),
            FusionError::InvalidConfig(_) => CliError::Config(e.to_string()),
            e => CliError::Data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::MissingDimensions | PipelineError::NoExternalScores { .. } | PipelineError::Geometry(_) => {
                CliError::Config(e.to_string())
            }
            e => CliError::Data(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn manifest(path: &Path) -> Result<DatasetManifest> {
    load_manifest(path, false).map_err(|e| CliError::Data(e.to_string()))
}

fn open_store(dir: &Path) -> Result<ScoreStore> {
    ScoreStore::open(dir).map_err(|e| CliError::Config(e.to_string()))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, bytes).map_err(|e| CliError::Data(e.to_string()))
}

fn svr_config(a: &SvrArgs) -> Result<SvrConfig<f64>> {
    let cfg = SvrConfig {
        gamma: a.gamma,
        c: a.c,
        epsilon: a.epsilon,
        ..SvrConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Explicit selections, or else every model with a score file in the store.
fn stored_models(args: &ModelArgs, store: &ScoreStore) -> Result<(Vec<VideoModel>, Vec<AudioModel>)> {
    let present = |m: Model| store.path_for(m).exists();
    let video = args
        .video()
        .map_err(CliError::Config)?
        .unwrap_or_else(|| VideoModel::ALL.into_iter().filter(|&m| present(Model::Video(m))).collect());
    let audio = args
        .audio()
        .map_err(CliError::Config)?
        .unwrap_or_else(|| AudioModel::ALL.into_iter().filter(|&m| present(Model::Audio(m))).collect());
    if video.is_empty() || audio.is_empty() {
        return Err(CliError::Config(format!(
            "need at least one video and one audio model with scores in {}",
            store.dir().display()
        )));
    }
    Ok((video, audio))
}

pub fn metrics(a: MetricsArgs) -> Result<()> {
    let has_external = |m: Model| {
        a.external_scores
            .as_ref()
            .is_some_and(|d| d.join(format!("{}.csv", m.id())).exists())
    };
    let video = a.models.video().map_err(CliError::Config)?.unwrap_or_else(|| {
        VideoModel::ALL
            .into_iter()
            .filter(|&m| m.is_native() || has_external(Model::Video(m)))
            .collect()
    });
    let audio = a.models.audio().map_err(CliError::Config)?.unwrap_or_else(|| {
        AudioModel::ALL
            .into_iter()
            .filter(|&m| m.is_native() || has_external(Model::Audio(m)))
            .collect()
    });
    let dimensions = match (a.width, a.height) {
        (Some(w), Some(h)) => Some((w, h)),
        (None, None) => None,
        _ => return Err(CliError::Config("--width and --height go together".into())),
    };
    let manifest = manifest(&a.manifest)?;
    let store = open_store(&a.out)?;
    let config = MetricsConfig {
        video_models: video,
        audio_models: audio,
        dimensions,
        sphere_points: a.sphere_points,
        external_scores: a.external_scores,
        ..MetricsConfig::default()
    };
    let summary = compute_scores(&manifest, &store, &config, &|e| {
        emit("progress", serde_json::to_value(e).expect("progress serializes"))
    })?;
    emit(
        "summary",
        json!({
            "computed": summary.computed,
            "skipped": summary.skipped,
            "external": summary.external,
            "failed": summary.failures.len(),
        }),
    );
    if summary.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{} (entry, model) pairs failed; see {}",
            summary.failures.len(),
            store.dir().join(FAILURES_FILE).display()
        )))
    }
}

pub fn mos(a: MosArgs) -> Result<()> {
    let ratings = load_ratings::<f64>(&a.ratings).map_err(|e| CliError::Data(e.to_string()))?;
    let table = eval::compute_mos(&ratings)?;
    table.write_csv(&a.out)?;
    emit(
        "summary",
        json!({ "subjects": ratings.subject_ids.len(), "sequences": table.sequence_ids.len(), "out": a.out }),
    );
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let svr = svr_config(&a.svr)?;
    let manifest = manifest(&a.manifest)?;
    let store = open_store(&a.scores)?;
    let (videos, audios) = stored_models(&a.models, &store)?;
    create_dir(&a.out)?;
    let split = eval::split_by_content(&manifest, a.seed)?;
    let rated: Vec<_> = manifest.entries.iter().filter(|e| e.mos.is_some()).collect();
    if rated.len() < manifest.entries.len() {
        log::warn!("{} entries without MOS are excluded", manifest.entries.len() - rated.len());
    }
    let (train, _) = split.partition(rated);
    let scores = ScoreTable::load(&store, &videos, &audios)?;

    let mut trained = Vec::new();
    for &v in &videos {
        for &au in &audios {
            let mut samples = Vec::with_capacity(train.len());
            for e in &train {
                let missing = |m: Model| CliError::Data(format!("no `{}` score for entry `{}`", m.id(), e.id));
                let vr = scores.video.get(&v).and_then(|t| t.get(&e.id)).ok_or_else(|| missing(Model::Video(v)))?;
                let ar = scores.audio.get(&au).and_then(|t| t.get(&e.id)).ok_or_else(|| missing(Model::Audio(au)))?;
                samples.push((vr, ar, e.mos.expect("rated")));
            }
            let (model, report) = train_fusion(a.method, v, au, &samples, &svr)?;
            let file = format!("{}_{}_{}.json", a.method.id(), v.id(), au.id());
            model.save(a.out.join(&file))?;
            emit("trained", json!({ "video": v.id(), "audio": au.id(), "file": file }));
            trained.push(json!({ "video": v.id(), "audio": au.id(), "file": file, "report": report }));
        }
    }
    let summary = json!({
        "method": a.method.id(),
        "seed": a.seed,
        "gamma": svr.gamma,
        "c": svr.c,
        "epsilon": svr.epsilon,
        "tolerance": svr.tolerance,
        "train_contents": split.train,
        "test_contents": split.test,
        "train_entries": train.len(),
        "models": trained,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&a.out.join("training_summary.json"), text.as_bytes())
}

pub fn benchmark(a: BenchmarkArgs) -> Result<()> {
    let svr = svr_config(&a.svr)?;
    if a.repeats == 0 {
        return Err(CliError::Config("--repeats must be at least 1".into()));
    }
    let manifest = manifest(&a.manifest)?;
    let store = open_store(&a.scores)?;
    let (video_models, audio_models) = stored_models(&a.models, &store)?;
    create_dir(&a.out)?;
    let config = BenchmarkConfig {
        video_models,
        audio_models,
        methods: if a.method.is_empty() { FusionMethod::ALL.to_vec() } else { a.method },
        svr,
        single_mode_only: a.single_mode_only,
    };
    let scores = ScoreTable::load(&store, &config.video_models, &config.audio_models)?;
    let report = eval::run_benchmark_repeated(&manifest, &scores, &config, a.seed, a.repeats)?;
    for c in report.cells.iter().filter(|c| c.error.is_some()) {
        log::warn!(
            "{} {}+{}: {}",
            c.method,
            c.video.id(),
            c.audio.id(),
            c.error.as_deref().unwrap_or_default()
        );
    }
    write_file(&a.out.join("benchmark.csv"), report.to_csv().as_bytes())?;
    write_file(&a.out.join("benchmark.txt"), report.to_table().as_bytes())?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&a.out.join("benchmark.json"), text.as_bytes())?;
    emit(
        "summary",
        json!({
            "cells": report.cells.len(),
            "failed_cells": report.cells.iter().filter(|c| c.error.is_some()).count(),
            "single_mode": report.single_mode.len(),
            "splits": report.splits.len(),
        }),
    );
    Ok(())
}
