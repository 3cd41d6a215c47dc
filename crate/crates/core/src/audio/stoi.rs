use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::MetricError;
use crate::models::AudioModel;
use crate::Real;

use super::resample::resample;
use super::{AudioQualityResult, MonoPair};

pub const STOI_SAMPLE_RATE: u32 = 10_000;
const FRAME: usize = 256;
const HOP: usize = FRAME / 2;
const NFFT: usize = 512;
const BANDS: usize = 15;
const LOWEST_CENTRE_HZ: f64 = 150.0;
const SEGMENT: usize = 30;
const BETA_DB: f64 = -15.0;
const DYN_RANGE_DB: f64 = 40.0;

/// Symmetric Hann window without zero end points.
fn hanning(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n as f64 + 1.0)).cos()))
        .collect()
}

/// One-third octave band matrix over the `nfft / 2 + 1` bins, one row per band.
fn third_octave_bands(fs: f64, nfft: usize, bands: usize, lowest: f64) -> Vec<Vec<f64>> {
    let bins = nfft / 2 + 1;
    let freq: Vec<f64> = (0..bins).map(|i| i as f64 * fs / nfft as f64).collect();
    let nearest = |target: f64| -> usize {
        let mut best = 0;
        for (i, &f) in freq.iter().enumerate() {
            if (f - target).powi(2) < (freq[best] - target).powi(2) {
                best = i;
            }
        }
        best
    };
    let mut rows: Vec<Vec<f64>> = (0..bands)
        .map(|k| {
            let k = k as f64;
            let centre = 2f64.powf(k / 3.0) * lowest;
            let lo = (centre * 2f64.powf((k - 1.0) / 3.0) * lowest).sqrt();
            let hi = (centre * 2f64.powf((k + 1.0) / 3.0) * lowest).sqrt();
            let mut row = vec![0.0; bins];
            for v in &mut row[nearest(lo)..nearest(hi)] {
                *v = 1.0;
            }
            row
        })
        .collect();
    // keep bands up to the last one whose bin count is non-decreasing and non-zero
    let rank: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    if let Some(last) = (1..bands).rev().find(|&i| rank[i] >= rank[i - 1] && rank[i] != 0.0) {
        rows.truncate(last + 1);
    }
    rows
}

fn frame_starts(len: usize) -> impl Iterator<Item = usize> {
    (0..len.saturating_sub(FRAME)).step_by(HOP)
}

/// Drops frames more than 40 dB below the loudest reference frame and
/// overlap-adds the remaining windowed frames back together.
fn remove_silent_frames(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let w = hanning(FRAME);
    let starts: Vec<usize> = frame_starts(x.len()).collect();
    let level: Vec<f64> = starts
        .iter()
        .map(|&s| {
            let e: f64 = x[s..s + FRAME].iter().zip(&w).map(|(v, w)| (v * w).powi(2)).sum();
            20.0 * (e.sqrt() / (FRAME as f64).sqrt()).log10()
        })
        .collect();
    let max = level.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut xs = vec![0.0; x.len()];
    let mut ys = vec![0.0; y.len()];
    let mut count = 0;
    for (&s, &l) in starts.iter().zip(&level) {
        if l - max + DYN_RANGE_DB > 0.0 {
            let o = starts[count];
            for k in 0..FRAME {
                xs[o + k] += x[s + k] * w[k];
                ys[o + k] += y[s + k] * w[k];
            }
            count += 1;
        }
    }
    let len = if count == 0 { 0 } else { starts[count - 1] + FRAME };
    xs.truncate(len);
    ys.truncate(len);
    (xs, ys)
}

/// Band envelopes, `[band][frame]`.
fn band_envelopes(x: &[f64], bands: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let w = hanning(FRAME);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(NFFT);
    let mut env = vec![Vec::new(); bands.len()];
    let mut buf = vec![Complex::default(); NFFT];
    for s in frame_starts(x.len()) {
        buf.iter_mut().for_each(|c| *c = Complex::default());
        for k in 0..FRAME {
            buf[k] = Complex::new(x[s + k] * w[k], 0.0);
        }
        fft.process(&mut buf);
        for (row, out) in bands.iter().zip(env.iter_mut()) {
            let power: f64 = row.iter().zip(&buf).map(|(h, c)| h * c.norm_sqr()).sum();
            out.push(power.sqrt());
        }
    }
    env
}

fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Short-time objective intelligibility at 10 kHz.
///
/// Band/segment pairs whose envelopes are constant (correlation undefined)
/// are left out of the mean.
pub fn stoi<T: Real>(pair: &MonoPair<T>) -> Result<AudioQualityResult<T>, MetricError> {
    let to_f64 = |v: &[T]| -> Vec<f64> { v.iter().map(|s| s.to_f64_lossy()).collect() };
    let x = resample(&to_f64(&pair.reference), pair.sample_rate, STOI_SAMPLE_RATE);
    let y = resample(&to_f64(&pair.distorted), pair.sample_rate, STOI_SAMPLE_RATE);
    let (x, y) = remove_silent_frames(&x, &y);
    let bands = third_octave_bands(STOI_SAMPLE_RATE as f64, NFFT, BANDS, LOWEST_CENTRE_HZ);
    let ex = band_envelopes(&x, &bands);
    let ey = band_envelopes(&y, &bands);
    let frames = ex[0].len();
    if frames < SEGMENT {
        return Err(MetricError::TooShort {
            frames,
            needed: SEGMENT,
        });
    }
    let clip = 10f64.powf(-BETA_DB / 20.0);
    let mut total = 0.0;
    let mut count = 0usize;
    let mut per_segment = Vec::with_capacity(frames - SEGMENT + 1);
    for m in SEGMENT..=frames {
        let (mut seg_sum, mut seg_n) = (0.0, 0usize);
        for (bx, by) in ex.iter().zip(&ey) {
            let xs = &bx[m - SEGMENT..m];
            let ys = &by[m - SEGMENT..m];
            let ex2: f64 = xs.iter().map(|v| v * v).sum();
            let ey2: f64 = ys.iter().map(|v| v * v).sum();
            if ey2 <= 0.0 {
                continue;
            }
            let alpha = (ex2 / ey2).sqrt();
            let yp: Vec<f64> = ys.iter().zip(xs).map(|(y, x)| (alpha * y).min(x + x * clip)).collect();
            if let Some(r) = correlation(xs, &yp) {
                seg_sum += r;
                seg_n += 1;
            }
        }
        if seg_n > 0 {
            per_segment.push(T::lit(seg_sum / seg_n as f64));
        }
        total += seg_sum;
        count += seg_n;
    }
    if count == 0 {
        return Err(MetricError::NoVoicedFrames);
    }
    Ok(AudioQualityResult::scalar(
        AudioModel::Stoi,
        T::lit(total / count as f64),
        per_segment,
    ))
}
