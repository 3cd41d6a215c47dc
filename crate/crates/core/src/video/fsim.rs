use crate::error::MetricError;
use crate::media::{PlaneKind, PlaneRef, VideoFrame};
use crate::Real;

use super::phase::phase_congruency;
use super::plane::Plane;
use super::{check_pair, FrameScore, VideoMetric};

const T1: f64 = 0.85;
const T2: f64 = 160.0;
const T3: f64 = 200.0;
const T4: f64 = 200.0;
const LAMBDA: f64 = 0.03;

/// FSIMc: phase congruency, gradient and chrominance similarity pooled by max(PC).
///
/// Features are `[mean S_PC, mean S_G, mean S_I * S_Q]`.
#[derive(Debug, Clone, Default)]
pub struct Fsim;

/// Chroma offset from 128, replicated up to the luma grid.
fn chroma_at_luma<T: Real>(plane: PlaneRef<'_>, width: usize, height: usize) -> Plane<T> {
    let offset = T::lit(128.0);
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        let row = (y / 2).min(plane.height - 1) * plane.width;
        for x in 0..width {
            data.push(T::from_sample(plane.data[row + (x / 2).min(plane.width - 1)]) - offset);
        }
    }
    Plane::new(width, height, data)
}

fn similarity<T: Real>(a: T, b: T, c: T) -> T {
    (T::lit(2.0) * a * b + c) / (a * a + b * b + c)
}

/// Real part of `x^p`, defined for negative `x` via the principal branch.
fn real_pow<T: Real>(x: T, p: T) -> T {
    if x >= T::zero() {
        x.powf(p)
    } else {
        x.abs().powf(p) * (p * T::PI()).cos()
    }
}

fn gradient_magnitude<T: Real>(p: &Plane<T>) -> Plane<T> {
    let s = T::lit(16.0);
    let (a, b) = (T::lit(3.0) / s, T::lit(10.0) / s);
    let z = T::zero();
    let dx = [a, z, -a, b, z, -b, a, z, -a];
    let dy = [a, b, a, z, z, z, -a, -b, -a];
    let gx = p.filter3x3(&dx);
    let gy = p.filter3x3(&dy);
    gx.zip_map(&gy, |x, y| (x * x + y * y).sqrt())
}

impl<T: Real> VideoMetric<T> for Fsim {
    fn name(&self) -> &str {
        "FSIM"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let (w, h) = (reference.width(), reference.height());
        let factor = ((w.min(h) as f64 / 256.0).round() as usize).max(1);
        let prep = |f: &VideoFrame| {
            let y = Plane::<T>::from_samples(f.plane(PlaneKind::Y)).box_downsample(factor);
            let i = chroma_at_luma::<T>(f.plane(PlaneKind::U), w, h).box_downsample(factor);
            let q = chroma_at_luma::<T>(f.plane(PlaneKind::V), w, h).box_downsample(factor);
            (y, i, q)
        };
        let (y1, i1, q1) = prep(reference);
        let (y2, i2, q2) = prep(distorted);
        let pc1 = phase_congruency(&y1);
        let pc2 = phase_congruency(&y2);
        let g1 = gradient_magnitude(&y1);
        let g2 = gradient_magnitude(&y2);

        let (t1, t2, t3, t4) = (T::lit(T1), T::lit(T2), T::lit(T3), T::lit(T4));
        let lambda = T::lit(LAMBDA);
        let n = y1.len();
        let (mut s_pc_sum, mut s_g_sum, mut s_c_sum) = (T::zero(), T::zero(), T::zero());
        let (mut weighted, mut pcm_sum, mut plain) = (T::zero(), T::zero(), T::zero());
        for k in 0..n {
            let s_pc = similarity(pc1.data[k], pc2.data[k], t1);
            let s_g = similarity(g1.data[k], g2.data[k], t2);
            let s_c = similarity(i1.data[k], i2.data[k], t3) * similarity(q1.data[k], q2.data[k], t4);
            let local = s_g * s_pc * real_pow(s_c, lambda);
            let pcm = pc1.data[k].max(pc2.data[k]);
            weighted += local * pcm;
            pcm_sum += pcm;
            plain += local;
            s_pc_sum += s_pc;
            s_g_sum += s_g;
            s_c_sum += s_c;
        }
        let count = T::from_count(n);
        let score = if pcm_sum > T::zero() { weighted / pcm_sum } else { plain / count };
        Ok(FrameScore {
            score,
            features: vec![s_pc_sum / count, s_g_sum / count, s_c_sum / count],
        })
    }
}
