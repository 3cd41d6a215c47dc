use crate::error::MetricError;
use crate::models::AudioModel;
use crate::Real;

use super::{AudioQualityResult, MonoPair};

pub const LPC_ORDER: usize = 10;
const FRAME_MS: usize = 30;
const KEEP_FRACTION: f64 = 0.95;

fn autocorrelation<T: Real>(x: &[T], order: usize) -> Vec<T> {
    (0..=order)
        .map(|k| x.iter().zip(&x[k.min(x.len())..]).map(|(&a, &b)| a * b).sum())
        .collect()
}

/// Levinson-Durbin recursion; returns `[1, -a1, ..., -ap]` or `None` when the
/// autocorrelation is not positive definite.
fn lpc<T: Real>(r: &[T]) -> Option<Vec<T>> {
    let order = r.len() - 1;
    let mut err = r[0];
    if !(err > T::zero()) {
        return None;
    }
    let mut a = vec![T::zero(); order];
    for i in 0..order {
        let acc: T = (0..i).map(|j| a[j] * r[i - j]).sum();
        let k = (r[i + 1] - acc) / err;
        let past = a.clone();
        a[i] = k;
        for j in 0..i {
            a[j] = past[j] - k * past[i - 1 - j];
        }
        err *= T::one() - k * k;
        if !(err > T::zero()) {
            return None;
        }
    }
    let mut out = Vec::with_capacity(order + 1);
    out.push(T::one());
    out.extend(a.into_iter().map(|v| -v));
    Some(out)
}

/// `a R a^T` with `R` the symmetric Toeplitz matrix built from `r`.
fn toeplitz_form<T: Real>(a: &[T], r: &[T]) -> T {
    let mut acc = T::zero();
    for (i, &ai) in a.iter().enumerate() {
        for (j, &aj) in a.iter().enumerate() {
            acc += ai * r[i.abs_diff(j)] * aj;
        }
    }
    acc
}

/// Log-likelihood ratio of order-10 LPC fits over 30 ms Hann frames with 75% overlap.
///
/// Frames where either fit is unstable are skipped. The score averages the
/// lowest 95% of the frame values.
pub fn llr<T: Real>(pair: &MonoPair<T>) -> Result<AudioQualityResult<T>, MetricError> {
    let win = (pair.sample_rate as usize * FRAME_MS / 1000).max(LPC_ORDER + 1);
    let skip = (win / 4).max(1);
    let window: Vec<T> = (1..=win)
        .map(|n| T::lit(0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / (win as f64 + 1.0)).cos())))
        .collect();
    let mut values = Vec::new();
    let mut start = 0;
    while start + win <= pair.len() {
        let frame = |x: &[T]| -> Vec<T> { x[start..start + win].iter().zip(&window).map(|(&v, &w)| v * w).collect() };
        let r_ref = autocorrelation(&frame(&pair.reference), LPC_ORDER);
        let r_dist = autocorrelation(&frame(&pair.distorted), LPC_ORDER);
        start += skip;
        let (Some(a_ref), Some(a_dist)) = (lpc(&r_ref), lpc(&r_dist)) else {
            continue;
        };
        let num = toeplitz_form(&a_dist, &r_ref);
        let den = toeplitz_form(&a_ref, &r_ref);
        if num > T::zero() && den > T::zero() {
            values.push((num / den).ln());
        }
    }
    if values.is_empty() {
        return Err(MetricError::AllFramesSkipped);
    }
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite LLR"));
    let keep = ((sorted.len() as f64 * KEEP_FRACTION).round() as usize).max(1);
    let score = sorted[..keep].iter().copied().sum::<T>() / T::from_count(keep);
    Ok(AudioQualityResult::scalar(AudioModel::Llr, score, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn speechish(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // AR(2) resonance driven by white noise
        let mut out = vec![0.0; n];
        for i in 2..n {
            out[i] = 1.3 * out[i - 1] - 0.6 * out[i - 2] + rng.random_range(-0.1..0.1);
        }
        out
    }

    #[test]
    fn levinson_recovers_ar_model() {
        let x = speechish(20_000, 3);
        let r = autocorrelation(&x, 2);
        let a = lpc(&r).unwrap();
        assert!((a[1] + 1.3).abs() < 0.05, "{a:?}");
        assert!((a[2] - 0.6).abs() < 0.05, "{a:?}");
    }

    #[test]
    fn identity_is_zero() {
        let x = speechish(16_000, 1);
        let p = MonoPair::new(x.clone(), x, 16_000).unwrap();
        let r = llr(&p).unwrap();
        assert_eq!(r.score, 0.0);
        assert!(r.per_segment.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn frames_nonnegative_under_noise() {
        let x = speechish(16_000, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d: Vec<f64> = x.iter().map(|v| v + rng.random_range(-0.2..0.2)).collect();
        let r = llr(&MonoPair::new(x, d, 16_000).unwrap()).unwrap();
        assert!(r.per_segment.iter().all(|&v| v >= -1e-12));
        assert!(r.score > 0.0);
    }

    #[test]
    fn silence_skips_everything() {
        let p = MonoPair::new(vec![0.0; 8000], vec![0.0; 8000], 16_000).unwrap();
        assert!(matches!(llr(&p), Err(MetricError::AllFramesSkipped)));
    }
}
