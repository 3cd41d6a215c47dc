//! Full-reference video quality metrics.
//!
//! Every metric scores one frame pair at a time and returns a scalar score
//! plus the model's decomposed feature vector. Sequence results pool both with
//! the arithmetic mean over frames.
//!
//! | metric   | constants |
//! |----------|-----------|
//! | PSNR     | peak 255, identical planes capped at 100 dB |
//! | SSIM     | 11x11 Gaussian, sigma 1.5, K1 0.01, K2 0.03, luma only |
//! | MS-SSIM  | 5 scales, 2x2 mean + decimate, exponents 0.0448 0.2856 0.3001 0.2363 0.1333 |
//! | VIFP     | 4 scales, windows 17/9/5/3 with sigma N/5, noise variance 2 |
//! | FSIM     | log-Gabor 4 scales x 4 orientations, Scharr gradient, T1 0.85, T2 160, T3 = T4 200, lambda 0.03 |
//! | GMSD     | 2x2 mean + decimate, Prewitt, c 0.0026 on [0, 1] intensities |
//!
//! Spatial filters mirror at the borders (edge sample repeated). Phase
//! congruency is computed in the frequency domain and is therefore periodic.

mod fsim;
mod gmsd;
mod phase;
mod plane;
mod psnr;
mod ssim;
mod vif;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use fsim::Fsim;
pub use gmsd::Gmsd;
pub use phase::phase_congruency;
pub use plane::Plane;
pub use psnr::{psnr_from_mse, psnr_plane, CppPsnr, PlanarWeights, SPsnr, WeightedPsnr, PSNR_CAP_DB};
pub use ssim::{MsSsim, Ssim, MS_SSIM_EXPONENTS};
pub use vif::Vifp;

use crate::error::MetricError;
use crate::media::{FrameSource, VideoFrame};
use crate::models::VideoModel;
use crate::sphere::{CppGrid, SphereSampleSet};
use crate::store::read_score_file;
use crate::Real;

/// Score and features of one frame pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FrameScore<T> {
    pub score: T,
    pub features: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct VideoQualityResult<T> {
    pub model_name: String,
    pub score: T,
    pub features: Vec<T>,
    pub per_frame: Vec<FrameScore<T>>,
}

impl<T: Real> VideoQualityResult<T> {
    /// Mean-pools per-frame scores and features.
    pub fn pooled(model_name: impl Into<String>, per_frame: Vec<FrameScore<T>>) -> Self {
        let n = T::from_count(per_frame.len().max(1));
        let arity = per_frame.first().map_or(0, |f| f.features.len());
        let score = per_frame.iter().map(|f| f.score).sum::<T>() / n;
        let features = (0..arity)
            .map(|k| per_frame.iter().map(|f| f.features[k]).sum::<T>() / n)
            .collect();
        Self {
            model_name: model_name.into(),
            score,
            features,
            per_frame,
        }
    }

    pub fn model(&self) -> Option<VideoModel> {
        self.model_name.parse().ok()
    }
}

/// A full-reference metric evaluated frame by frame.
pub trait VideoMetric<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError>;

    /// Streams both sequences in lockstep and pools the per-frame results.
    fn evaluate(&self, reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
        check_sources(reference, distorted)?;
        let mut per_frame = Vec::with_capacity(reference.frame_count());
        for (r, d) in reference.frames()?.zip(distorted.frames()?) {
            per_frame.push(self.frame(&r?, &d?)?);
        }
        Ok(VideoQualityResult::pooled(self.name(), per_frame))
    }
}

pub(crate) fn check_sources(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<(), MetricError> {
    let (rd, dd) = (
        (reference.width(), reference.height()),
        (distorted.width(), distorted.height()),
    );
    if rd != dd {
        return Err(MetricError::DimensionMismatch {
            reference: rd,
            distorted: dd,
        });
    }
    if reference.frame_count() != distorted.frame_count() {
        return Err(MetricError::FrameCountMismatch {
            reference: reference.frame_count(),
            distorted: distorted.frame_count(),
        });
    }
    Ok(())
}

pub(crate) fn check_pair(reference: &VideoFrame, distorted: &VideoFrame) -> Result<(), MetricError> {
    let (rd, dd) = (
        (reference.width(), reference.height()),
        (distorted.width(), distorted.height()),
    );
    if rd != dd {
        return Err(MetricError::DimensionMismatch {
            reference: rd,
            distorted: dd,
        });
    }
    Ok(())
}

/// PSNR with optional per-plane weights; uniform weights give plain PSNR.
pub fn psnr_planar<T: Real>(
    reference: &dyn FrameSource,
    distorted: &dyn FrameSource,
    weights: Option<PlanarWeights<T>>,
) -> Result<VideoQualityResult<T>, MetricError> {
    let metric = match weights {
        Some(w) => WeightedPsnr::with_weights("PSNR", w),
        None => WeightedPsnr::uniform(),
    };
    metric.evaluate(reference, distorted)
}

pub fn ws_psnr<T: Real>(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
    WeightedPsnr::ws_psnr().evaluate(reference, distorted)
}

pub fn s_psnr<T: Real>(
    reference: &dyn FrameSource,
    distorted: &dyn FrameSource,
    samples: SphereSampleSet<T>,
) -> Result<VideoQualityResult<T>, MetricError> {
    SPsnr::new(samples).evaluate(reference, distorted)
}

/// CPP-PSNR; `grid` must match the luma plane, chroma grids are derived.
pub fn cpp_psnr<T: Real>(
    reference: &dyn FrameSource,
    distorted: &dyn FrameSource,
    grid: CppGrid<T>,
) -> Result<VideoQualityResult<T>, MetricError> {
    CppPsnr::with_luma_grid(grid).evaluate(reference, distorted)
}

pub fn ssim<T: Real>(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
    Ssim::default().evaluate(reference, distorted)
}

pub fn ms_ssim<T: Real>(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
    MsSsim::default().evaluate(reference, distorted)
}

pub fn vifp<T: Real>(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
    Vifp::default().evaluate(reference, distorted)
}

pub fn fsim<T: Real>(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
    Fsim::default().evaluate(reference, distorted)
}

pub fn gmsd<T: Real>(reference: &dyn FrameSource, distorted: &dyn FrameSource) -> Result<VideoQualityResult<T>, MetricError> {
    Gmsd::default().evaluate(reference, distorted)
}

/// Native metric for a registry model; `None` for models only available externally.
pub fn native_metric<T: Real>(model: VideoModel, sphere_samples: &SphereSampleSet<T>) -> Option<Box<dyn VideoMetric<T>>> {
    Some(match model {
        VideoModel::Vmaf => return None,
        VideoModel::WsPsnr => Box::new(WeightedPsnr::ws_psnr()),
        VideoModel::SPsnr => Box::new(SPsnr::new(sphere_samples.clone())),
        VideoModel::CppPsnr => Box::new(CppPsnr::new()),
        VideoModel::Ssim => Box::new(Ssim::default()),
        VideoModel::MsSsim => Box::new(MsSsim::default()),
        VideoModel::Vifp => Box::new(Vifp::default()),
        VideoModel::Fsim => Box::new(Fsim::default()),
        VideoModel::Gmsd => Box::new(Gmsd::default()),
    })
}

/// Wraps externally computed scores (`id,model,score,f1..fK`) as results keyed by entry id.
///
/// Rows for other models are ignored. Every row for `model` must carry exactly
/// the model's feature arity.
pub fn external_video_scores<T: Real>(
    csv_path: impl AsRef<Path>,
    model: VideoModel,
) -> Result<BTreeMap<String, VideoQualityResult<T>>, MetricError> {
    let rows = read_score_file::<T>(csv_path)?;
    let mut out = BTreeMap::new();
    for row in rows {
        if row.model.parse::<VideoModel>().ok() != Some(model) {
            continue;
        }
        if row.features.len() != model.feature_arity() {
            return Err(MetricError::FeatureArity {
                model: model.display_name().to_string(),
                id: row.id,
                expected: model.feature_arity(),
                actual: row.features.len(),
            });
        }
        let frame = FrameScore {
            score: row.score,
            features: row.features.clone(),
        };
        out.insert(
            row.id,
            VideoQualityResult {
                model_name: model.display_name().to_string(),
                score: row.score,
                features: row.features,
                per_frame: vec![frame],
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::VideoSequence;

    #[test]
    fn external_vmaf_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vmaf.csv");
        std::fs::write(
            &path,
            "id,model,score,f1,f2,f3,f4,f5,f6\na,vmaf,87.5,0.9,0.8,0.7,0.6,0.95,3.1\nb,vmaf,,1,1,1,1,1,0\nc,ssim,0.9,0.9,1\n",
        )
        .unwrap();
        let rows = external_video_scores::<f64>(&path, VideoModel::Vmaf).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows["a"].features.len(), 6);
        assert_eq!(rows["a"].score, 87.5);
        assert!(rows["b"].score.is_nan());
        assert_eq!(rows["a"].model(), Some(VideoModel::Vmaf));
    }

    #[test]
    fn external_arity_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vmaf.csv");
        std::fs::write(&path, "id,model,score,f1,f2,f3,f4,f5\na,vmaf,87.5,0.9,0.8,0.7,0.6,0.95\n").unwrap();
        assert!(matches!(
            external_video_scores::<f64>(&path, VideoModel::Vmaf),
            Err(MetricError::FeatureArity { expected: 6, actual: 5, .. })
        ));
    }

    #[test]
    fn sequence_checks() {
        let a = VideoSequence::new(vec![VideoFrame::filled(4, 4, 0, 0, 0).unwrap()]).unwrap();
        let b = VideoSequence::new(vec![VideoFrame::filled(4, 2, 0, 0, 0).unwrap()]).unwrap();
        let c = VideoSequence::new(vec![VideoFrame::filled(4, 4, 0, 0, 0).unwrap(); 2]).unwrap();
        assert!(matches!(ws_psnr::<f64>(&a, &b), Err(MetricError::DimensionMismatch { .. })));
        assert!(matches!(ws_psnr::<f64>(&a, &c), Err(MetricError::FrameCountMismatch { .. })));
    }
}
