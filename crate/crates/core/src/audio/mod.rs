//! Full-reference audio quality metrics on time-aligned clips.
//!
//! Native metrics take a [`MonoPair`]. Multichannel (e.g. first-order
//! ambisonic) clips are scored per channel and averaged by [`evaluate_clip`].

mod llr;
mod resample;
mod snr;
mod stoi;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use llr::{llr, LPC_ORDER};
pub use resample::resample;
pub use snr::{seg_snr, snr, SEG_SNR_CEIL_DB, SEG_SNR_FLOOR_DB, SNR_CAP_DB};
pub use stoi::{stoi, STOI_SAMPLE_RATE};

use crate::error::MetricError;
use crate::media::AudioClip;
use crate::models::AudioModel;
use crate::store::read_score_file;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AudioQualityResult<T> {
    pub model_name: String,
    pub score: T,
    pub features: Vec<T>,
    /// Frame or segment values behind the score, when the metric has them.
    pub per_segment: Vec<T>,
    /// Channel scores that were averaged into `score` (empty for a single pair).
    pub per_channel: Vec<T>,
}

impl<T: Real> AudioQualityResult<T> {
    pub(crate) fn scalar(model: AudioModel, score: T, per_segment: Vec<T>) -> Self {
        Self {
            model_name: model.display_name().to_string(),
            score,
            features: vec![score],
            per_segment,
            per_channel: Vec::new(),
        }
    }

    pub fn model(&self) -> Option<AudioModel> {
        self.model_name.parse().ok()
    }
}

/// Equal-length mono reference and distorted signals.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoPair<T> {
    pub reference: Vec<T>,
    pub distorted: Vec<T>,
    pub sample_rate: u32,
}

impl<T: Real> MonoPair<T> {
    /// Builds a pair, trimming a one-sample length difference.
    pub fn new(mut reference: Vec<T>, mut distorted: Vec<T>, sample_rate: u32) -> Result<Self, MetricError> {
        let (r, d) = (reference.len(), distorted.len());
        if r.abs_diff(d) > 1 {
            return Err(MetricError::LengthMismatch {
                reference: r,
                distorted: d,
            });
        }
        let n = r.min(d);
        reference.truncate(n);
        distorted.truncate(n);
        Ok(Self {
            reference,
            distorted,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }
}

fn check_clips<T: Real>(reference: &AudioClip<T>, distorted: &AudioClip<T>) -> Result<(), MetricError> {
    if reference.sample_rate() != distorted.sample_rate() {
        return Err(MetricError::SampleRateMismatch {
            reference: reference.sample_rate(),
            distorted: distorted.sample_rate(),
        });
    }
    if reference.channel_count() != distorted.channel_count() {
        return Err(MetricError::ChannelMismatch {
            reference: reference.channel_count(),
            distorted: distorted.channel_count(),
        });
    }
    Ok(())
}

/// Channel 0 of both clips (the omnidirectional W channel for ambisonics).
pub fn reduce_channels<T: Real>(reference: &AudioClip<T>, distorted: &AudioClip<T>) -> Result<MonoPair<T>, MetricError> {
    check_clips(reference, distorted)?;
    MonoPair::new(
        reference.channel(0).to_vec(),
        distorted.channel(0).to_vec(),
        reference.sample_rate(),
    )
}

/// One [`MonoPair`] per channel.
pub fn channel_pairs<T: Real>(reference: &AudioClip<T>, distorted: &AudioClip<T>) -> Result<Vec<MonoPair<T>>, MetricError> {
    check_clips(reference, distorted)?;
    (0..reference.channel_count())
        .map(|c| {
            MonoPair::new(
                reference.channel(c).to_vec(),
                distorted.channel(c).to_vec(),
                reference.sample_rate(),
            )
        })
        .collect()
}

/// Native metric for a registry model; `None` for external-only models.
pub fn native_metric<T: Real>(model: AudioModel) -> Option<fn(&MonoPair<T>) -> Result<AudioQualityResult<T>, MetricError>> {
    match model {
        AudioModel::Snr => Some(snr),
        AudioModel::SegSnr => Some(seg_snr),
        AudioModel::Llr => Some(llr),
        AudioModel::Stoi => Some(stoi),
        AudioModel::Peaq | AudioModel::Visqol => None,
    }
}

/// Scores every channel with a native metric and averages scores and features.
///
/// Channels the metric cannot score (silent reference, too short after
/// silence removal, ...) are left out of the average; the clip fails only if
/// no channel can be scored.
pub fn evaluate_clip<T: Real>(
    model: AudioModel,
    reference: &AudioClip<T>,
    distorted: &AudioClip<T>,
) -> Result<AudioQualityResult<T>, MetricError> {
    let metric = native_metric::<T>(model).ok_or_else(|| MetricError::ExternalOnly {
        model: model.display_name().to_string(),
    })?;
    let pairs = channel_pairs(reference, distorted)?;
    let mut scored = Vec::with_capacity(pairs.len());
    let mut first_err = None;
    for pair in &pairs {
        match metric(pair) {
            Ok(r) => scored.push(r),
            Err(
                e @ (MetricError::ZeroEnergyReference
                | MetricError::NoVoicedFrames
                | MetricError::AllFramesSkipped
                | MetricError::TooShort { .. }),
            ) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if scored.is_empty() {
        return Err(first_err.unwrap_or(MetricError::NoVoicedFrames));
    }
    if pairs.len() == 1 {
        return Ok(scored.pop().expect("one result"));
    }
    let n = T::from_count(scored.len());
    let arity = scored[0].features.len();
    let per_channel: Vec<T> = scored.iter().map(|r| r.score).collect();
    Ok(AudioQualityResult {
        model_name: scored[0].model_name.clone(),
        score: per_channel.iter().copied().sum::<T>() / n,
        features: (0..arity).map(|k| scored.iter().map(|r| r.features[k]).sum::<T>() / n).collect(),
        per_segment: Vec::new(),
        per_channel,
    })
}

/// Wraps externally computed scores (`id,model,score,f1..fK`) keyed by entry id.
pub fn external_audio_scores<T: Real>(
    csv_path: impl AsRef<Path>,
    model: AudioModel,
) -> Result<BTreeMap<String, AudioQualityResult<T>>, MetricError> {
    let rows = read_score_file::<T>(csv_path)?;
    let mut out = BTreeMap::new();
    for row in rows {
        if row.model.parse::<AudioModel>().ok() != Some(model) {
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
        out.insert(
            row.id,
            AudioQualityResult {
                model_name: model.display_name().to_string(),
                score: row.score,
                features: row.features,
                per_segment: Vec::new(),
                per_channel: Vec::new(),
            },
        );
    }
    Ok(out)
}
