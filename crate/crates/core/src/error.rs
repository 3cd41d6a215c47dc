use std::path::PathBuf;

use crate::media::MediaError;
use crate::sphere::GeometryError;
use crate::store::StoreError;

/// Failures shared by the video and audio metrics.
#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("reference is {reference:?} but distorted is {distorted:?}")]
    DimensionMismatch {
        reference: (usize, usize),
        distorted: (usize, usize),
    },
    #[error("reference has {reference} frames but distorted has {distorted}")]
    FrameCountMismatch { reference: usize, distorted: usize },
    #[error("{width}x{height} frame is too small for {scales} scales (need {min} pixels per side)")]
    ScaleUnderflow {
        width: usize,
        height: usize,
        scales: usize,
        min: usize,
    },
    #[error("reference has {reference} channels but distorted has {distorted}")]
    ChannelMismatch { reference: usize, distorted: usize },
    #[error("reference has {reference} samples but distorted has {distorted}")]
    LengthMismatch { reference: usize, distorted: usize },
    #[error("sample rates differ: {reference} Hz vs {distorted} Hz")]
    SampleRateMismatch { reference: u32, distorted: u32 },
    #[error("reference signal has zero energy")]
    ZeroEnergyReference,
    #[error("no frame carries enough reference energy to score")]
    NoVoicedFrames,
    #[error("every analysis frame was skipped (unstable LPC fit)")]
    AllFramesSkipped,
    #[error("signal too short: {frames} analysis frames remain, need {needed}")]
    TooShort { frames: usize, needed: usize },
    #[error("{model} expects {expected} features, row `{id}` has {actual}")]
    FeatureArity {
        model: String,
        id: String,
        expected: usize,
        actual: usize,
    },
    #[error("{model} has no native implementation; supply external scores")]
    ExternalOnly { model: String },
    #[error("{path}: {reason}")]
    ScoreFile { path: PathBuf, reason: String },
    #[error(transparent)]
    Media(#[from] MediaError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Store(#[from] StoreError),
}
