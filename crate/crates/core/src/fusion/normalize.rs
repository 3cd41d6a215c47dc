use serde::{Deserialize, Serialize};

use crate::models::{AudioModel, Model, VideoModel};
use crate::Real;

use super::FusionError;

/// Mapping from a raw model score onto `[0, 1]`, higher meaning better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", bound = "T: Real")]
pub enum NormKind<T> {
    Passthrough,
    /// `base + (q - shift) / divisor`
    Affine { base: T, shift: T, divisor: T },
    /// `1 - q / divisor`
    OneMinusAffine { divisor: T },
    /// `1 - (|q| - low) / (high - low)`
    AbsAffine { low: T, high: T },
    /// `(q - min) / (max - min)`
    MinMax { min: T, max: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct NormalizationSpec<T> {
    pub model_name: String,
    pub kind: NormKind<T>,
}

impl<T: Real> NormalizationSpec<T> {
    /// Default map for a registry model.
    pub fn for_model(model: Model) -> Self {
        let l = T::lit;
        let affine = |base: f64, shift: f64, divisor: f64| NormKind::Affine {
            base: l(base),
            shift: l(shift),
            divisor: l(divisor),
        };
        let kind = match model {
            Model::Video(VideoModel::Vmaf) => affine(0.0, 0.0, 100.0),
            Model::Video(VideoModel::WsPsnr | VideoModel::SPsnr | VideoModel::CppPsnr) => affine(0.0, 23.0, 29.0),
            Model::Video(VideoModel::Gmsd) => NormKind::OneMinusAffine { divisor: l(0.26) },
            Model::Audio(AudioModel::Peaq) => affine(1.0, 0.21, 3.5),
            Model::Audio(AudioModel::Llr) => NormKind::AbsAffine {
                low: l(0.7),
                high: l(1.2),
            },
            Model::Audio(AudioModel::Snr) => affine(0.0, 0.0, 20.0),
            Model::Audio(AudioModel::SegSnr) => affine(0.0, -2.0, 37.0),
            Model::Video(VideoModel::Ssim | VideoModel::MsSsim | VideoModel::Vifp | VideoModel::Fsim)
            | Model::Audio(AudioModel::Stoi | AudioModel::Visqol) => NormKind::Passthrough,
        };
        Self {
            model_name: model.display_name().to_string(),
            kind,
        }
    }

    pub fn for_name(name: &str) -> Result<Self, FusionError> {
        let model: Model = name.parse().map_err(|_| FusionError::UnknownModel(name.to_string()))?;
        Ok(Self::for_model(model))
    }

    /// Generic min-max map, e.g. fitted on a training set.
    pub fn min_max(model_name: impl Into<String>, min: T, max: T) -> Self {
        Self {
            model_name: model_name.into(),
            kind: NormKind::MinMax { min, max },
        }
    }

    /// The map before clamping.
    pub fn raw(&self, q: T) -> T {
        match self.kind {
            NormKind::Passthrough => q,
            NormKind::Affine { base, shift, divisor } => base + (q - shift) / divisor,
            NormKind::OneMinusAffine { divisor } => T::one() - q / divisor,
            NormKind::AbsAffine { low, high } => T::one() - (q.abs() - low) / (high - low),
            NormKind::MinMax { min, max } => {
                if max > min {
                    (q - min) / (max - min)
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn apply(&self, q: T) -> T {
        self.raw(q).max(T::zero()).min(T::one())
    }
}

/// Normalizes `score` with `spec`, clamped to `[0, 1]`.
pub fn normalize<T: Real>(score: T, spec: &NormalizationSpec<T>) -> T {
    spec.apply(score)
}
