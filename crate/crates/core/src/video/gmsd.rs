use crate::error::MetricError;
use crate::media::{PlaneKind, VideoFrame};
use crate::Real;

use super::plane::Plane;
use super::{check_pair, FrameScore, VideoMetric};

const C: f64 = 0.0026;

/// Gradient magnitude similarity deviation; lower is better.
///
/// Features are `[mean GMS, std GMS]`, score is the standard deviation.
#[derive(Debug, Clone, Default)]
pub struct Gmsd;

impl Gmsd {
    /// Per-pixel gradient magnitude similarity on the downsampled luma grid.
    pub fn similarity_map<T: Real>(reference: &VideoFrame, distorted: &VideoFrame) -> Result<Plane<T>, MetricError> {
        check_pair(reference, distorted)?;
        let m1 = gradient(reference);
        let m2 = gradient(distorted);
        let c = T::lit(C);
        let two = T::lit(2.0);
        Ok(m1.zip_map(&m2, |a, b| (two * a * b + c) / (a * a + b * b + c)))
    }
}

fn gradient<T: Real>(frame: &VideoFrame) -> Plane<T> {
    let y = Plane::<T>::from_samples_scaled(frame.plane(PlaneKind::Y), T::lit(255.0)).box_downsample(2);
    let t = T::one() / T::lit(3.0);
    let z = T::zero();
    let dx = [t, z, -t, t, z, -t, t, z, -t];
    let dy = [t, t, t, z, z, z, -t, -t, -t];
    let gx = y.filter3x3(&dx);
    let gy = y.filter3x3(&dy);
    gx.zip_map(&gy, |a, b| (a * a + b * b).sqrt())
}

impl<T: Real> VideoMetric<T> for Gmsd {
    fn name(&self) -> &str {
        "GMSD"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        let gms = Self::similarity_map::<T>(reference, distorted)?;
        let mean = gms.mean();
        let n = gms.len();
        let std = if n > 1 {
            let ss: T = gms.data.iter().map(|&v| (v - mean) * (v - mean)).sum();
            (ss / T::from_count(n - 1)).sqrt()
        } else {
            T::zero()
        };
        Ok(FrameScore {
            score: std,
            features: vec![mean, std],
        })
    }
}
