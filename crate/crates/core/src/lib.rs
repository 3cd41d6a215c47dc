//! Full-reference quality assessment for omnidirectional audio-visual content.

pub mod audio;
mod error;
pub mod eval;
pub mod fusion;
pub mod media;
pub mod models;
pub mod pipeline;
mod scalar;
pub mod sphere;
pub mod stats;
pub mod store;
pub mod video;

pub use error::MetricError;
pub use scalar::Real;

pub type AudioQualityResult = audio::AudioQualityResult<f64>;
pub type VideoQualityResult = video::VideoQualityResult<f64>;
