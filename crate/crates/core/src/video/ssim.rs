use crate::error::MetricError;
use crate::media::VideoFrame;
use crate::Real;

use super::plane::{gaussian_kernel, local_stats, Plane};
use super::{check_pair, FrameScore, VideoMetric};

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const PEAK: f64 = 255.0;

/// Per-scale exponents, finest first. They sum to 1.0001.
pub const MS_SSIM_EXPONENTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

struct SsimMaps<T> {
    l: Plane<T>,
    cs: Plane<T>,
}

fn ssim_maps<T: Real>(x: &Plane<T>, y: &Plane<T>, window: &[T]) -> SsimMaps<T> {
    let c1 = T::lit((K1 * PEAK).powi(2));
    let c2 = T::lit((K2 * PEAK).powi(2));
    let two = T::lit(2.0);
    let s = local_stats(x, y, window);
    let l = s
        .mu_x
        .zip_map(&s.mu_y, |a, b| (two * a * b + c1) / (a * a + b * b + c1));
    let var_sum = s.var_x.zip_map(&s.var_y, |a, b| a + b);
    let cs = s.cov.zip_map(&var_sum, |c, v| (two * c + c2) / (v + c2));
    SsimMaps { l, cs }
}

fn luma<T: Real>(frame: &VideoFrame) -> Plane<T> {
    Plane::from_samples(frame.plane(crate::media::PlaneKind::Y))
}

/// Single-scale SSIM on luma. Features are `[mean l, mean cs]`.
#[derive(Debug, Clone)]
pub struct Ssim<T> {
    window: Vec<T>,
}

impl<T: Real> Default for Ssim<T> {
    fn default() -> Self {
        Self {
            window: gaussian_kernel(WINDOW, SIGMA),
        }
    }
}

impl<T: Real> VideoMetric<T> for Ssim<T> {
    fn name(&self) -> &str {
        "SSIM"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let m = ssim_maps(&luma(reference), &luma(distorted), &self.window);
        let score = m.l.zip_map(&m.cs, |a, b| a * b).mean();
        Ok(FrameScore {
            score,
            features: vec![m.l.mean(), m.cs.mean()],
        })
    }
}

/// Five-scale SSIM on luma. Features are `[l at scale 5, cs1..cs5]`.
#[derive(Debug, Clone)]
pub struct MsSsim<T> {
    window: Vec<T>,
}

impl<T: Real> Default for MsSsim<T> {
    fn default() -> Self {
        Self {
            window: gaussian_kernel(WINDOW, SIGMA),
        }
    }
}

impl<T: Real> MsSsim<T> {
    pub const SCALES: usize = 5;

    /// Smallest frame side the scale pyramid accepts.
    pub const MIN_SIDE: usize = WINDOW << (Self::SCALES - 1);
}

impl<T: Real> VideoMetric<T> for MsSsim<T> {
    fn name(&self) -> &str {
        "MS-SSIM"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let (w, h) = (reference.width(), reference.height());
        if w.min(h) < Self::MIN_SIDE {
            return Err(MetricError::ScaleUnderflow {
                width: w,
                height: h,
                scales: Self::SCALES,
                min: Self::MIN_SIDE,
            });
        }
        let mut x = luma::<T>(reference);
        let mut y = luma::<T>(distorted);
        let mut cs = Vec::with_capacity(Self::SCALES);
        let mut l_last = T::one();
        for scale in 0..Self::SCALES {
            let m = ssim_maps(&x, &y, &self.window);
            cs.push(m.cs.mean());
            if scale + 1 == Self::SCALES {
                l_last = m.l.mean();
            } else {
                x = x.box_downsample(2);
                y = y.box_downsample(2);
            }
        }
        let mut score = l_last.max(T::zero()).powf(T::lit(MS_SSIM_EXPONENTS[4]));
        for (c, e) in cs.iter().zip(MS_SSIM_EXPONENTS) {
            score *= c.max(T::zero()).powf(T::lit(e));
        }
        let mut features = vec![l_last];
        features.extend(cs);
        Ok(FrameScore { score, features })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::PlaneKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise_frame(w: usize, h: usize, seed: u64) -> VideoFrame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = VideoFrame::filled(w, h, 0, 128, 128).unwrap();
        for s in f.plane_mut(PlaneKind::Y) {
            *s = rng.random();
        }
        f
    }

    #[test]
    fn identical_frames() {
        let f = noise_frame(40, 30, 1);
        let r = Ssim::<f64>::default().frame(&f, &f).unwrap();
        assert_eq!(r.score, 1.0);
        assert_eq!(r.features, vec![1.0, 1.0]);
    }

    #[test]
    fn constant_frames_closed_form() {
        let a = VideoFrame::filled(24, 24, 100, 128, 128).unwrap();
        let b = VideoFrame::filled(24, 24, 110, 128, 128).unwrap();
        let r = Ssim::<f64>::default().frame(&a, &b).unwrap();
        let c1 = (0.01f64 * 255.0).powi(2);
        let l = (2.0 * 100.0 * 110.0 + c1) / (100.0f64.powi(2) + 110.0f64.powi(2) + c1);
        assert!((r.features[1] - 1.0).abs() < 1e-9);
        assert!((r.features[0] - l).abs() < 1e-9);
    }

    #[test]
    fn noise_pair_bounded_and_symmetric() {
        let a = noise_frame(48, 32, 2);
        let b = noise_frame(48, 32, 3);
        let m = Ssim::<f64>::default();
        let ab = m.frame(&a, &b).unwrap();
        let ba = m.frame(&b, &a).unwrap();
        assert!((-1.0..=1.0).contains(&ab.score));
        assert!((ab.score - ba.score).abs() < 1e-9);
    }

    #[test]
    fn ms_ssim_scale_underflow() {
        let f = VideoFrame::filled(160, 160, 0, 0, 0).unwrap();
        assert!(matches!(
            MsSsim::<f64>::default().frame(&f, &f),
            Err(MetricError::ScaleUnderflow { min: 176, .. })
        ));
    }

    #[test]
    fn ms_ssim_identity_and_exponents() {
        let sum: f64 = MS_SSIM_EXPONENTS.iter().sum();
        assert!((sum - 1.0001).abs() < 1e-12);
        let f = noise_frame(176, 176, 4);
        let r = MsSsim::<f64>::default().frame(&f, &f).unwrap();
        assert_eq!(r.features, vec![1.0; 6]);
        assert_eq!(r.score, 1.0);
    }
}
