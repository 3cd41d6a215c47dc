use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audio::AudioQualityResult;
use crate::fusion::{train_fusion, FusionError, FusionMethod, SvrConfig, TrainingReport};
use crate::media::{DatasetManifest, ManifestEntry};
use crate::models::{AudioModel, Model, VideoModel};
use crate::stats::{plcc, srcc};
use crate::store::{ScoreRecord, ScoreStore};
use crate::video::VideoQualityResult;

use super::{split_by_content, EvalError, SplitPlan};

/// Which models and fusion methods a benchmark covers.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub video_models: Vec<VideoModel>,
    pub audio_models: Vec<AudioModel>,
    pub methods: Vec<FusionMethod>,
    pub svr: SvrConfig<f64>,
    /// Skip fusion and report single-mode correlations only.
    pub single_mode_only: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            video_models: VideoModel::ALL.to_vec(),
            audio_models: AudioModel::ALL.to_vec(),
            methods: FusionMethod::ALL.to_vec(),
            svr: SvrConfig::default(),
            single_mode_only: false,
        }
    }
}

/// Single-mode results per model, keyed by manifest entry id.
#[derive(Debug, Clone, Default)]
pub struct ScoreTable {
    pub video: BTreeMap<VideoModel, BTreeMap<String, VideoQualityResult<f64>>>,
    pub audio: BTreeMap<AudioModel, BTreeMap<String, AudioQualityResult<f64>>>,
}

fn check_arity(model: Model, rec: &ScoreRecord<f64>) -> Result<(), EvalError> {
    if rec.features.len() != model.feature_arity() {
        return Err(EvalError::FeatureArity {
            model: model.id().to_string(),
            id: rec.id.clone(),
            expected: model.feature_arity(),
            actual: rec.features.len(),
        });
    }
    Ok(())
}

impl ScoreTable {
    /// Loads the named models from a score store.
    pub fn load(store: &ScoreStore, video: &[VideoModel], audio: &[AudioModel]) -> Result<Self, EvalError> {
        let mut table = Self::default();
        for &m in video {
            let mut rows = BTreeMap::new();
            for (id, rec) in store.load::<f64>(Model::Video(m))? {
                check_arity(Model::Video(m), &rec)?;
                rows.insert(
                    id,
                    VideoQualityResult {
                        model_name: m.display_name().to_string(),
                        score: rec.score,
                        features: rec.features,
                        per_frame: Vec::new(),
                    },
                );
            }
            table.video.insert(m, rows);
        }
        for &m in audio {
            let mut rows = BTreeMap::new();
            for (id, rec) in store.load::<f64>(Model::Audio(m))? {
                check_arity(Model::Audio(m), &rec)?;
                rows.insert(
                    id,
                    AudioQualityResult {
                        model_name: m.display_name().to_string(),
                        score: rec.score,
                        features: rec.features,
                        per_segment: Vec::new(),
                        per_channel: Vec::new(),
                    },
                );
            }
            table.audio.insert(m, rows);
        }
        Ok(table)
    }

    fn video_result(&self, model: VideoModel, id: &str) -> Result<&VideoQualityResult<f64>, EvalError> {
        self.video.get(&model).and_then(|m| m.get(id)).ok_or_else(|| EvalError::MissingScore {
            id: id.to_string(),
            model: model.id().to_string(),
        })
    }

    fn audio_result(&self, model: AudioModel, id: &str) -> Result<&AudioQualityResult<f64>, EvalError> {
        self.audio.get(&model).and_then(|m| m.get(id)).ok_or_else(|| EvalError::MissingScore {
            id: id.to_string(),
            model: model.id().to_string(),
        })
    }
}

/// One fused model evaluated on the test split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: FusionMethod,
    pub video: VideoModel,
    pub audio: AudioModel,
    pub srcc: Option<f64>,
    pub plcc: Option<f64>,
    /// Fitted weight or SVR summary.
    pub detail: String,
    pub error: Option<String>,
    pub not_converged: bool,
}

/// Single-mode baseline on the test split, sign-flipped so higher is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleModeResult {
    pub model: Model,
    pub srcc: Option<f64>,
    pub plcc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub splits: Vec<SplitPlan>,
    pub train_entries: usize,
    pub test_entries: usize,
    pub cells: Vec<CellResult>,
    pub single_mode: Vec<SingleModeResult>,
}

fn correlations(pred: &[f64], mos: &[f64]) -> (Option<f64>, Option<f64>) {
    if pred.iter().any(|v| !v.is_finite()) {
        return (None, None);
    }
    (srcc(pred, mos).ok(), plcc(pred, mos).ok())
}

type Sample<'a> = (&'a VideoQualityResult<f64>, &'a AudioQualityResult<f64>, f64);

fn gather<'a>(
    scores: &'a ScoreTable,
    entries: &[&ManifestEntry],
    video: VideoModel,
    audio: AudioModel,
) -> Result<Vec<Sample<'a>>, EvalError> {
    entries
        .iter()
        .map(|e| {
            Ok((
                scores.video_result(video, &e.id)?,
                scores.audio_result(audio, &e.id)?,
                e.mos.expect("entries with MOS only"),
            ))
        })
        .collect()
}

fn run_cell(
    method: FusionMethod,
    video: VideoModel,
    audio: AudioModel,
    train: &[Sample<'_>],
    test: &[Sample<'_>],
    svr: &SvrConfig<f64>,
) -> CellResult {
    let mut cell = CellResult {
        method,
        video,
        audio,
        srcc: None,
        plcc: None,
        detail: String::new(),
        error: None,
        not_converged: false,
    };
    let needs_scores = method != FusionMethod::FeatureSvr;
    if needs_scores && train.iter().chain(test).any(|(v, a, _)| !v.score.is_finite() || !a.score.is_finite()) {
        cell.error = Some("scalar score unavailable for some entries".into());
        return cell;
    }
    let (model, report) = match train_fusion(method, video, audio, train, svr) {
        Ok(r) => r,
        Err(e) => {
            cell.not_converged = matches!(e, FusionError::NotConverged { .. });
            cell.error = Some(e.to_string());
            return cell;
        }
    };
    cell.detail = match report {
        TrainingReport::WeightedProduct { weight, .. } => format!("w={weight:.2}"),
        TrainingReport::Svr(d) => format!("sv={} iter={}", d.support_vectors, d.iterations),
    };
    let pred: Result<Vec<f64>, FusionError> = test.iter().map(|(v, a, _)| model.predict(v, a)).collect();
    match pred {
        Ok(pred) => {
            let mos: Vec<f64> = test.iter().map(|s| s.2).collect();
            (cell.srcc, cell.plcc) = correlations(&pred, &mos);
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

fn entries_with_mos(manifest: &DatasetManifest) -> Vec<&ManifestEntry> {
    let (with, without): (Vec<&ManifestEntry>, Vec<&ManifestEntry>) = manifest.entries.iter().partition(|e| e.mos.is_some());
    if !without.is_empty() {
        log::warn!(
            "{} manifest entries have no MOS and are excluded: {}",
            without.len(),
            without.iter().map(|e| e.id.as_str()).collect::<Vec<_>>().join(", ")
        );
    }
    with
}

/// Fits every (video, audio, method) cell on the train split and scores it on the test split.
pub fn run_benchmark_with_scores(
    manifest: &DatasetManifest,
    scores: &ScoreTable,
    config: &BenchmarkConfig,
    split: &SplitPlan,
) -> Result<BenchmarkReport, EvalError> {
    let usable = entries_with_mos(manifest);
    let (train, test) = split.partition(usable.iter().copied());

    let mut single_mode = Vec::new();
    let test_mos: Vec<f64> = test.iter().map(|e| e.mos.expect("filtered")).collect();
    for &m in &config.video_models {
        let pred = test
            .iter()
            .map(|e| scores.video_result(m, &e.id).map(|r| r.score))
            .collect::<Result<Vec<f64>, _>>()?;
        single_mode.push(single(Model::Video(m), pred, &test_mos));
    }
    for &m in &config.audio_models {
        let pred = test
            .iter()
            .map(|e| scores.audio_result(m, &e.id).map(|r| r.score))
            .collect::<Result<Vec<f64>, _>>()?;
        single_mode.push(single(Model::Audio(m), pred, &test_mos));
    }

    let mut keys = Vec::new();
    if !config.single_mode_only {
        for &method in &config.methods {
            for &v in &config.video_models {
                for &a in &config.audio_models {
                    keys.push((method, v, a));
                }
            }
        }
    }
    let mut data = BTreeMap::new();
    for &(_, v, a) in &keys {
        if let std::collections::btree_map::Entry::Vacant(slot) = data.entry((v, a)) {
            slot.insert((gather(scores, &train, v, a)?, gather(scores, &test, v, a)?));
        }
    }
    let cells = keys
        .par_iter()
        .map(|&(method, v, a)| {
            let (tr, te) = &data[&(v, a)];
            run_cell(method, v, a, tr, te, &config.svr)
        })
        .collect();
    Ok(BenchmarkReport {
        splits: vec![split.clone()],
        train_entries: train.len(),
        test_entries: test.len(),
        cells,
        single_mode,
    })
}

fn single(model: Model, mut pred: Vec<f64>, mos: &[f64]) -> SingleModeResult {
    if model.lower_is_better() {
        pred.iter_mut().for_each(|v| *v = -*v);
    }
    let (srcc, plcc) = correlations(&pred, mos);
    SingleModeResult { model, srcc, plcc }
}

/// Loads the configured models from `store` and runs one split.
pub fn run_benchmark(
    manifest: &DatasetManifest,
    store: &ScoreStore,
    config: &BenchmarkConfig,
    split: &SplitPlan,
) -> Result<BenchmarkReport, EvalError> {
    let scores = ScoreTable::load(store, &config.video_models, &config.audio_models)?;
    run_benchmark_with_scores(manifest, &scores, config, split)
}

/// Runs `repeats` splits with seeds `seed, seed + 1, ...` and averages each
/// correlation over the repeats where it is defined.
pub fn run_benchmark_repeated(
    manifest: &DatasetManifest,
    scores: &ScoreTable,
    config: &BenchmarkConfig,
    seed: u64,
    repeats: usize,
) -> Result<BenchmarkReport, EvalError> {
    let mut reports = Vec::with_capacity(repeats.max(1));
    for r in 0..repeats.max(1) as u64 {
        let split = split_by_content(manifest, seed + r)?;
        reports.push(run_benchmark_with_scores(manifest, scores, config, &split)?);
    }
    if reports.len() == 1 {
        return Ok(reports.pop().expect("one report"));
    }
    let avg = |vals: Vec<Option<f64>>| -> Option<f64> {
        let defined: Vec<f64> = vals.into_iter().flatten().collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    };
    let mut merged = reports[0].clone();
    merged.splits = reports.iter().flat_map(|r| r.splits.clone()).collect();
    for (k, cell) in merged.cells.iter_mut().enumerate() {
        cell.srcc = avg(reports.iter().map(|r| r.cells[k].srcc).collect());
        cell.plcc = avg(reports.iter().map(|r| r.cells[k].plcc).collect());
        cell.not_converged = reports.iter().any(|r| r.cells[k].not_converged);
        cell.detail = format!("mean of {} splits", reports.len());
    }
    for (k, row) in merged.single_mode.iter_mut().enumerate() {
        row.srcc = avg(reports.iter().map(|r| r.single_mode[k].srcc).collect());
        row.plcc = avg(reports.iter().map(|r| r.single_mode[k].plcc).collect());
    }
    Ok(merged)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"))
}

impl BenchmarkReport {
    pub fn cell(&self, method: FusionMethod, video: VideoModel, audio: AudioModel) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.video == video && c.audio == audio)
    }

    pub fn cells_for(&self, method: FusionMethod) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(move |c| c.method == method)
    }

    /// Rows `kind,method,video,audio,srcc,plcc,detail,error`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
        w.write_record(["kind", "method", "video", "audio", "srcc", "plcc", "detail", "error"])
            .expect("in-memory csv");
        for s in &self.single_mode {
            let (v, a) = match s.model {
                Model::Video(m) => (m.id(), ""),
                Model::Audio(m) => ("", m.id()),
            };
            w.write_record(["single", "", v, a, &opt(s.srcc), &opt(s.plcc), "", ""])
                .expect("in-memory csv");
        }
        for c in &self.cells {
            w.write_record([
                "fusion",
                c.method.id(),
                c.video.id(),
                c.audio.id(),
                &opt(c.srcc),
                &opt(c.plcc),
                &c.detail,
                c.error.as_deref().unwrap_or(""),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }

    /// Aligned text: one video x audio grid per method and criterion, then the single-mode list.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut videos: Vec<VideoModel> = Vec::new();
        let mut audios: Vec<AudioModel> = Vec::new();
        for c in &self.cells {
            if !videos.contains(&c.video) {
                videos.push(c.video);
            }
            if !audios.contains(&c.audio) {
                audios.push(c.audio);
            }
        }
        let _ = writeln!(
            out,
            "train entries: {}  test entries: {}  splits: {}",
            self.train_entries,
            self.test_entries,
            self.splits.len()
        );
        for method in FusionMethod::ALL {
            if self.cells_for(method).next().is_none() {
                continue;
            }
            for (label, pick) in [("SRCC", 0usize), ("PLCC", 1)] {
                let _ = writeln!(out, "\n[{method}] {label}");
                let _ = write!(out, "{:<10}", "");
                for a in &audios {
                    let _ = write!(out, "{:>9}", a.display_name());
                }
                out.push('\n');
                for v in &videos {
                    let _ = write!(out, "{:<10}", v.display_name());
                    for a in &audios {
                        let val = self.cell(method, *v, *a).and_then(|c| if pick == 0 { c.srcc } else { c.plcc });
                        let _ = write!(out, "{:>9}", fmt_opt(val));
                    }
                    out.push('\n');
                }
            }
        }
        let _ = writeln!(out, "\n[single-mode]");
        let _ = writeln!(out, "{:<10}{:>9}{:>9}", "model", "SRCC", "PLCC");
        for s in &self.single_mode {
            let _ = writeln!(out, "{:<10}{:>9}{:>9}", s.model.display_name(), fmt_opt(s.srcc), fmt_opt(s.plcc));
        }
        out
    }
}
