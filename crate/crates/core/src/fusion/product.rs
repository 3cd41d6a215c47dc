use serde::{Deserialize, Serialize};

use crate::models::{AudioModel, Model, VideoModel};
use crate::stats::srcc;
use crate::Real;

use super::{FusionError, NormalizationSpec};

/// Number of steps on the weight grid `{0, 0.05, ..., 1}`.
pub const WEIGHT_STEPS: usize = 20;

/// `qv^w * qa^(1-w)` on normalized scores, with `0^0 = 1`.
pub fn weighted_product<T: Real>(qv: T, qa: T, w: T) -> T {
    if w == T::zero() {
        qa
    } else if w == T::one() || qv == qa {
        qv
    } else {
        qv.powf(w) * qa.powf(T::one() - w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSearch<T> {
    pub weight: T,
    /// Training SRCC at `weight`.
    pub srcc: T,
}

/// Grid search over `w` maximizing SRCC against `mos`; ties go to the larger `w`.
pub fn grid_search_weight<T: Real>(train: &[(T, T, T)]) -> Result<WeightSearch<T>, FusionError> {
    if train.len() < 3 {
        return Err(FusionError::TooFewSamples { n: train.len(), min: 3 });
    }
    let mos: Vec<T> = train.iter().map(|t| t.2).collect();
    if mos.iter().all(|&m| m == mos[0]) {
        return Err(FusionError::ConstantTargets);
    }
    let mut best: Option<WeightSearch<T>> = None;
    for k in 0..=WEIGHT_STEPS {
        let w = T::from_count(k) / T::from_count(WEIGHT_STEPS);
        let pred: Vec<T> = train.iter().map(|&(v, a, _)| weighted_product(v, a, w)).collect();
        let Ok(s) = srcc(&pred, &mos) else {
            continue;
        };
        if s.is_nan() {
            continue;
        }
        if best.is_none_or(|b| s >= b.srcc) {
            best = Some(WeightSearch { weight: w, srcc: s });
        }
    }
    best.ok_or(FusionError::ConstantPredictions)
}

/// Weighted-product fusion of one video and one audio model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WeightedProductModel<T> {
    pub video: VideoModel,
    pub audio: AudioModel,
    pub w: T,
    pub video_norm: NormalizationSpec<T>,
    pub audio_norm: NormalizationSpec<T>,
}

impl<T: Real> WeightedProductModel<T> {
    /// Model with the default normalizations for both inputs.
    pub fn new(video: VideoModel, audio: AudioModel, w: T) -> Self {
        Self {
            video,
            audio,
            w,
            video_norm: NormalizationSpec::for_model(Model::Video(video)),
            audio_norm: NormalizationSpec::for_model(Model::Audio(audio)),
        }
    }

    /// Fits `w` on raw training scores.
    pub fn fit(video: VideoModel, audio: AudioModel, raw: &[(T, T, T)]) -> Result<(Self, WeightSearch<T>), FusionError> {
        let mut model = Self::new(video, audio, T::one());
        let normalized: Vec<(T, T, T)> = raw
            .iter()
            .map(|&(v, a, m)| (model.video_norm.apply(v), model.audio_norm.apply(a), m))
            .collect();
        let search = grid_search_weight(&normalized)?;
        model.w = search.weight;
        Ok((model, search))
    }

    /// Fused quality from raw single-mode scores.
    pub fn predict(&self, video_score: T, audio_score: T) -> T {
        weighted_product(self.video_norm.apply(video_score), self.audio_norm.apply(audio_score), self.w)
    }
}
