//! Ingestion of raw planar video, PCM audio, dataset manifests and subjective ratings.
//!
//! Raw I420 is the only video input: decoding from compressed streams happens
//! before ingestion. Frames are streamed from disk one at a time.

mod manifest;
mod ratings;
mod wav;
mod yuv;

use std::path::PathBuf;

pub use manifest::{load_manifest, DatasetManifest, ManifestEntry, MANIFEST_COLUMNS};
pub use ratings::{load_ratings, RatingsMatrix};
pub use wav::{read_wav, write_wav_f32, write_wav_pcm16, AudioClip};
pub use yuv::{
    read_yuv_sequence, write_yuv, FrameSource, PlaneKind, PlaneRef, VideoFrame, VideoSequence, YuvFile,
    YuvFrames, DEFAULT_FRAME_RATE,
};

#[derive(Debug, thiserror::Error)]
pub enum MediaError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("frame dimensions must be even and non-zero for 4:2:0, got {width}x{height}")]
    Dimensions { width: usize, height: usize },
    #[error("{plane:?} plane holds {actual} samples, expected {expected}")]
    PlaneLength {
        plane: PlaneKind,
        expected: usize,
        actual: usize,
    },
    #[error("{path}: size {file_size} is not a multiple of the {frame_size}-byte frame size")]
    SizeMismatch {
        path: PathBuf,
        file_size: u64,
        frame_size: usize,
    },
    #[error("sequence has no frames")]
    EmptySequence,
    #[error("frames in a sequence must share dimensions")]
    MixedDimensions,
    #[error("{path}: malformed WAV header: {reason}")]
    MalformedWav { path: PathBuf, reason: String },
    #[error("{path}: unsupported WAV encoding: {reason}")]
    UnsupportedCodec { path: PathBuf, reason: String },
    #[error("invalid audio clip: {0}")]
    InvalidAudio(String),
    #[error("{path}: {reason}")]
    Csv { path: PathBuf, reason: String },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("duplicate entry id `{0}`")]
    DuplicateId(String),
    #[error("entry `{id}`: path does not exist: {path}")]
    UnresolvablePath { id: String, path: PathBuf },
    #[error("invalid ratings: {0}")]
    InvalidRatings(String),
}

impl MediaError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MediaError::Io {
            path: path.into(),
            source,
        }
    }
}
