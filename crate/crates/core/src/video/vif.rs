use crate::error::MetricError;
use crate::media::{PlaneKind, VideoFrame};
use crate::Real;

use super::plane::{gaussian_kernel, local_stats, Plane};
use super::{check_pair, FrameScore, VideoMetric};

const SCALES: usize = 4;
const SIGMA_NSQ: f64 = 2.0;
const EPS: f64 = 1e-10;

/// Pixel-domain VIF over four scales. Features are the per-scale
/// information ratios, finest first.
#[derive(Debug, Clone)]
pub struct Vifp<T> {
    windows: Vec<Vec<T>>,
}

impl<T: Real> Default for Vifp<T> {
    fn default() -> Self {
        let windows = (1..=SCALES)
            .map(|s| {
                let n = (1usize << (SCALES - s + 1)) + 1;
                gaussian_kernel(n, n as f64 / 5.0)
            })
            .collect();
        Self { windows }
    }
}

/// `(numerator, denominator)` information sums for one scale.
fn scale_information<T: Real>(x: &Plane<T>, y: &Plane<T>, window: &[T]) -> (T, T) {
    let eps = T::lit(EPS);
    let nsq = T::lit(SIGMA_NSQ);
    let s = local_stats(x, y, window);
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..x.len() {
        let mut s1 = s.var_x.data[i].max(T::zero());
        let s2 = s.var_y.data[i].max(T::zero());
        let s12 = s.cov.data[i];
        let mut g = if s1 > T::zero() { s12 / s1 } else { T::zero() };
        let mut sv = s2 - g * s12;
        if s1 < eps {
            g = T::zero();
            sv = s2;
            s1 = T::zero();
        }
        if s2 < eps {
            g = T::zero();
            sv = T::zero();
        }
        if g < T::zero() {
            sv = s2;
            g = T::zero();
        }
        if sv <= eps {
            sv = eps;
        }
        num += (T::one() + g * g * s1 / (sv + nsq)).log10();
        den += (T::one() + s1 / nsq).log10();
    }
    (num, den)
}

impl<T: Real> VideoMetric<T> for Vifp<T> {
    fn name(&self) -> &str {
        "VIFP"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let mut x = Plane::<T>::from_samples(reference.plane(PlaneKind::Y));
        let mut y = Plane::<T>::from_samples(distorted.plane(PlaneKind::Y));
        let (mut num_total, mut den_total) = (T::zero(), T::zero());
        let mut features = Vec::with_capacity(SCALES);
        for (scale, window) in self.windows.iter().enumerate() {
            if scale > 0 {
                x = x.filter_separable(window, window).subsample(2);
                y = y.filter_separable(window, window).subsample(2);
            }
            let (num, den) = scale_information(&x, &y, window);
            features.push(if den > T::zero() {
                num / den
            } else if num > T::zero() {
                T::infinity()
            } else {
                T::one()
            });
            num_total += num;
            den_total += den;
        }
        let score = if den_total > T::zero() { num_total / den_total } else { T::one() };
        Ok(FrameScore { score, features })
    }
}
