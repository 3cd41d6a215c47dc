use crate::error::MetricError;
use crate::models::AudioModel;
use crate::Real;

use super::{AudioQualityResult, MonoPair};

/// Value reported when the distorted signal equals the reference.
pub const SNR_CAP_DB: f64 = 60.0;
pub const SEG_SNR_FLOOR_DB: f64 = -10.0;
pub const SEG_SNR_CEIL_DB: f64 = 35.0;

const SEG_FRAME_MS: usize = 30;
/// Frames this far below the mean frame energy count as silence.
const SILENCE_DB: f64 = 35.0;

fn energies<T: Real>(r: &[T], d: &[T]) -> (T, T) {
    let mut signal = T::zero();
    let mut noise = T::zero();
    for (&a, &b) in r.iter().zip(d) {
        signal += a * a;
        noise += (a - b) * (a - b);
    }
    (signal, noise)
}

/// Global SNR in dB, capped at 60 dB.
pub fn snr<T: Real>(pair: &MonoPair<T>) -> Result<AudioQualityResult<T>, MetricError> {
    let (signal, noise) = energies(&pair.reference, &pair.distorted);
    if signal <= T::zero() {
        return Err(MetricError::ZeroEnergyReference);
    }
    let cap = T::lit(SNR_CAP_DB);
    let db = if noise > T::zero() {
        (T::lit(10.0) * (signal / noise).log10()).min(cap)
    } else {
        cap
    };
    Ok(AudioQualityResult::scalar(AudioModel::Snr, db, Vec::new()))
}

/// Mean frame SNR over non-overlapping 30 ms frames, each clamped to [-10, 35] dB.
pub fn seg_snr<T: Real>(pair: &MonoPair<T>) -> Result<AudioQualityResult<T>, MetricError> {
    let frame = (pair.sample_rate as usize * SEG_FRAME_MS / 1000).max(1);
    let frames: Vec<(T, T)> = pair
        .reference
        .chunks_exact(frame)
        .zip(pair.distorted.chunks_exact(frame))
        .map(|(r, d)| energies(r, d))
        .collect();
    if frames.is_empty() {
        return Err(MetricError::NoVoicedFrames);
    }
    let mean_energy = frames.iter().map(|f| f.0).sum::<T>() / T::from_count(frames.len());
    let threshold = mean_energy * T::lit(10f64.powf(-SILENCE_DB / 10.0));
    let (lo, hi) = (T::lit(SEG_SNR_FLOOR_DB), T::lit(SEG_SNR_CEIL_DB));
    let values: Vec<T> = frames
        .iter()
        .filter(|(signal, _)| *signal > threshold)
        .map(|&(signal, noise)| {
            if noise > T::zero() {
                (T::lit(10.0) * (signal / noise).log10()).max(lo).min(hi)
            } else {
                hi
            }
        })
        .collect();
    if values.is_empty() {
        return Err(MetricError::NoVoicedFrames);
    }
    let score = values.iter().copied().sum::<T>() / T::from_count(values.len());
    Ok(AudioQualityResult::scalar(AudioModel::SegSnr, score, values))
}
