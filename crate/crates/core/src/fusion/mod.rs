//! Audio-visual fusion: weighted product of normalized scores, and RBF
//! epsilon-SVR over either the two raw scores or the concatenated feature vectors.

mod normalize;
mod product;
mod svr;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use normalize::{normalize, NormKind, NormalizationSpec};
pub use product::{grid_search_weight, weighted_product, WeightSearch, WeightedProductModel, WEIGHT_STEPS};
pub use svr::{train_svr, MinMaxScaling, SvrConfig, SvrDiagnostics, SvrModel};

use crate::audio::AudioQualityResult;
use crate::models::{AudioModel, VideoModel};
use crate::video::VideoQualityResult;
use crate::Real;

#[derive(Debug, thiserror::Error)]
pub enum FusionError {
    #[error("unknown quality model `{0}`")]
    UnknownModel(String),
    #[error("need at least {min} training samples, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("training targets are constant")]
    ConstantTargets,
    #[error("fused predictions are constant for every weight")]
    ConstantPredictions,
    #[error("expected {expected} dimensions, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("feature schema mismatch: model expects [{expected}], input is [{actual}]")]
    SchemaMismatch { expected: String, actual: String },
    #[error("non-finite value in training data")]
    NonFinite,
    #[error("invalid SVR configuration: {0}")]
    InvalidConfig(String),
    #[error("SMO did not converge in {iterations} iterations (KKT gap {kkt_gap:e})")]
    NotConverged { iterations: usize, kkt_gap: f64 },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
    #[error("{path}: {source}")]
    Json {
        path: std::path::PathBuf,
        source: serde_json::Error,
    },
}

/// Fusion strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionMethod {
    WeightedProduct,
    ScoreSvr,
    FeatureSvr,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 3] = [FusionMethod::WeightedProduct, FusionMethod::ScoreSvr, FusionMethod::FeatureSvr];

    /// Short name used on the command line and in reports.
    pub fn id(self) -> &'static str {
        match self {
            FusionMethod::WeightedProduct => "wp",
            FusionMethod::ScoreSvr => "svr-score",
            FusionMethod::FeatureSvr => "svr-feat",
        }
    }
}

impl std::str::FromStr for FusionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wp" | "weighted-product" => Ok(FusionMethod::WeightedProduct),
            "svr-score" | "score-svr" => Ok(FusionMethod::ScoreSvr),
            "svr-feat" | "feature-svr" => Ok(FusionMethod::FeatureSvr),
            other => Err(format!("unknown fusion method `{other}` (wp, svr-score, svr-feat)")),
        }
    }
}

impl std::fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Names of the concatenated `[video features ; audio features]` dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema(pub Vec<String>);

impl FeatureSchema {
    pub fn for_models(video: VideoModel, audio: AudioModel) -> Self {
        let v = video.feature_names().iter().map(|f| format!("{}.{f}", video.id()));
        let a = audio.feature_names().iter().map(|f| format!("{}.{f}", audio.id()));
        Self(v.chain(a).collect())
    }

    /// Schema for the raw score pair.
    pub fn for_scores(video: VideoModel, audio: AudioModel) -> Self {
        Self(vec![format!("{}.score", video.id()), format!("{}.score", audio.id())])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, other: &FeatureSchema) -> Result<(), FusionError> {
        if self == other {
            Ok(())
        } else {
            Err(FusionError::SchemaMismatch {
                expected: self.0.join(","),
                actual: other.0.join(","),
            })
        }
    }
}

/// SVR over a named input vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SvrFusionModel<T> {
    pub video: VideoModel,
    pub audio: AudioModel,
    pub schema: FeatureSchema,
    pub svr: SvrModel<T>,
}

/// Any trained fusion model; the serialized form is self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", bound = "T: Real")]
pub enum FusionModel<T> {
    WeightedProduct(WeightedProductModel<T>),
    ScoreSvr(SvrFusionModel<T>),
    FeatureSvr(SvrFusionModel<T>),
}

fn result_models<T: Real>(
    video: &VideoQualityResult<T>,
    audio: &AudioQualityResult<T>,
) -> Result<(VideoModel, AudioModel), FusionError> {
    let v = video.model().ok_or_else(|| FusionError::UnknownModel(video.model_name.clone()))?;
    let a = audio.model().ok_or_else(|| FusionError::UnknownModel(audio.model_name.clone()))?;
    Ok((v, a))
}

/// Score-SVR input `[Q_v, Q_a]`.
pub fn score_input<T: Real>(video: &VideoQualityResult<T>, audio: &AudioQualityResult<T>) -> Vec<T> {
    vec![video.score, audio.score]
}

/// Feature-SVR input `[f_v ; f_a]`.
pub fn feature_input<T: Real>(video: &VideoQualityResult<T>, audio: &AudioQualityResult<T>) -> Vec<T> {
    video.features.iter().chain(&audio.features).copied().collect()
}

/// Score-based SVR prediction from the two raw scores.
pub fn fuse_scores_svr<T: Real>(
    video: &VideoQualityResult<T>,
    audio: &AudioQualityResult<T>,
    model: &SvrModel<T>,
) -> Result<T, FusionError> {
    model.predict(&score_input(video, audio))
}

/// Feature-based SVR prediction; the results' models must match the model's schema.
pub fn fuse_features_svr<T: Real>(
    video: &VideoQualityResult<T>,
    audio: &AudioQualityResult<T>,
    model: &SvrFusionModel<T>,
) -> Result<T, FusionError> {
    let (v, a) = result_models(video, audio)?;
    model.schema.check(&FeatureSchema::for_models(v, a))?;
    let x = feature_input(video, audio);
    if x.len() != model.schema.len() {
        return Err(FusionError::DimensionMismatch {
            expected: model.schema.len(),
            actual: x.len(),
        });
    }
    model.svr.predict(&x)
}

impl<T: Real> FusionModel<T> {
    pub fn method(&self) -> FusionMethod {
        match self {
            FusionModel::WeightedProduct(_) => FusionMethod::WeightedProduct,
            FusionModel::ScoreSvr(_) => FusionMethod::ScoreSvr,
            FusionModel::FeatureSvr(_) => FusionMethod::FeatureSvr,
        }
    }

    pub fn models(&self) -> (VideoModel, AudioModel) {
        match self {
            FusionModel::WeightedProduct(m) => (m.video, m.audio),
            FusionModel::ScoreSvr(m) | FusionModel::FeatureSvr(m) => (m.video, m.audio),
        }
    }

    /// Fused quality for one video/audio result pair.
    pub fn predict(&self, video: &VideoQualityResult<T>, audio: &AudioQualityResult<T>) -> Result<T, FusionError> {
        let (v, a) = result_models(video, audio)?;
        if (v, a) != self.models() {
            return Err(FusionError::SchemaMismatch {
                expected: format!("{},{}", self.models().0.id(), self.models().1.id()),
                actual: format!("{},{}", v.id(), a.id()),
            });
        }
        match self {
            FusionModel::WeightedProduct(m) => Ok(m.predict(video.score, audio.score)),
            FusionModel::ScoreSvr(m) => fuse_scores_svr(video, audio, &m.svr),
            FusionModel::FeatureSvr(m) => fuse_features_svr(video, audio, m),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fusion model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FusionError> {
        Ok(crate::store::write_atomic(path.as_ref(), self.to_json().as_bytes())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FusionError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FusionError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| FusionError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Trains the requested fusion method on paired results and MOS.
pub fn train_fusion<T: Real>(
    method: FusionMethod,
    video: VideoModel,
    audio: AudioModel,
    samples: &[(&VideoQualityResult<T>, &AudioQualityResult<T>, T)],
    config: &SvrConfig<T>,
) -> Result<(FusionModel<T>, TrainingReport), FusionError> {
    match method {
        FusionMethod::WeightedProduct => {
            let raw: Vec<(T, T, T)> = samples.iter().map(|(v, a, m)| (v.score, a.score, *m)).collect();
            let (model, search) = WeightedProductModel::fit(video, audio, &raw)?;
            Ok((
                FusionModel::WeightedProduct(model),
                TrainingReport::WeightedProduct {
                    weight: search.weight.to_f64_lossy(),
                    train_srcc: search.srcc.to_f64_lossy(),
                },
            ))
        }
        FusionMethod::ScoreSvr | FusionMethod::FeatureSvr => {
            let (schema, inputs): (FeatureSchema, Vec<Vec<T>>) = if method == FusionMethod::ScoreSvr {
                (
                    FeatureSchema::for_scores(video, audio),
                    samples.iter().map(|(v, a, _)| score_input(v, a)).collect(),
                )
            } else {
                let schema = FeatureSchema::for_models(video, audio);
                let inputs: Vec<Vec<T>> = samples.iter().map(|(v, a, _)| feature_input(v, a)).collect();
                if let Some(bad) = inputs.iter().find(|x| x.len() != schema.len()) {
                    return Err(FusionError::DimensionMismatch {
                        expected: schema.len(),
                        actual: bad.len(),
                    });
                }
                (schema, inputs)
            };
            let targets: Vec<T> = samples.iter().map(|s| s.2).collect();
            let (svr, diagnostics) = train_svr(&inputs, &targets, config)?;
            let model = SvrFusionModel {
                video,
                audio,
                schema,
                svr,
            };
            let model = if method == FusionMethod::ScoreSvr {
                FusionModel::ScoreSvr(model)
            } else {
                FusionModel::FeatureSvr(model)
            };
            Ok((model, TrainingReport::Svr(diagnostics)))
        }
    }
}

/// What training found: the chosen weight, or the SVR solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainingReport {
    WeightedProduct { weight: f64, train_srcc: f64 },
    Svr(SvrDiagnostics),
}
