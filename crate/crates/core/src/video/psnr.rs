use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::MetricError;
use crate::media::{PlaneKind, PlaneRef, VideoFrame};
use crate::sphere::{erp_weights, BilinearTap, CppGrid, SphereSampleSet, WeightMap};
use crate::Real;

use super::{check_pair, FrameScore, VideoMetric};

/// Reported value when the error is zero (or PSNR would exceed it).
pub const PSNR_CAP_DB: f64 = 100.0;

const PEAK: f64 = 255.0;

pub fn psnr_from_mse<T: Real>(mse: T) -> T {
    let cap = T::lit(PSNR_CAP_DB);
    if !(mse > T::zero()) {
        return cap;
    }
    let db = T::lit(10.0) * (T::lit(PEAK * PEAK) / mse).log10();
    db.min(cap)
}

/// Weighted PSNR of one plane: `10 log10(255^2 / (sum w (r-d)^2 / sum w))`.
pub fn psnr_plane<T: Real>(reference: PlaneRef<'_>, distorted: PlaneRef<'_>, weights: Option<&WeightMap<T>>) -> T {
    debug_assert_eq!(reference.data.len(), distorted.data.len());
    let w = reference.width;
    let mut num = T::zero();
    let mut den = T::zero();
    for (row, (r_row, d_row)) in reference.data.chunks(w).zip(distorted.data.chunks(w)).enumerate() {
        let sse: T = r_row
            .iter()
            .zip(d_row)
            .map(|(&r, &d)| {
                let e = T::from_sample(r) - T::from_sample(d);
                e * e
            })
            .sum();
        let wt = weights.map_or(T::one(), |m| m.row_weight(row));
        num += wt * sse;
        den += wt * T::from_count(w);
    }
    psnr_from_mse(num / den)
}

/// Weight maps for the Y, U and V planes.
#[derive(Debug, Clone)]
pub struct PlanarWeights<T> {
    pub y: WeightMap<T>,
    pub u: WeightMap<T>,
    pub v: WeightMap<T>,
}

impl<T: Real> PlanarWeights<T> {
    /// ERP weights with chroma maps at chroma resolution.
    pub fn erp(width: usize, height: usize) -> Result<Self, MetricError> {
        Ok(Self {
            y: erp_weights(width, height)?,
            u: erp_weights(width / 2, height / 2)?,
            v: erp_weights(width / 2, height / 2)?,
        })
    }

    fn plane(&self, kind: PlaneKind) -> &WeightMap<T> {
        match kind {
            PlaneKind::Y => &self.y,
            PlaneKind::U => &self.u,
            PlaneKind::V => &self.v,
        }
    }
}

#[derive(Debug, Clone)]
enum WeightSource<T> {
    Uniform,
    Erp,
    Fixed(PlanarWeights<T>),
}

/// Per-plane PSNR under a weighting scheme. Features are `[Y, U, V]`, score is the Y value.
#[derive(Debug, Clone)]
pub struct WeightedPsnr<T> {
    name: String,
    weights: WeightSource<T>,
}

impl<T: Real> WeightedPsnr<T> {
    pub fn uniform() -> Self {
        Self {
            name: "PSNR".into(),
            weights: WeightSource::Uniform,
        }
    }

    pub fn ws_psnr() -> Self {
        Self {
            name: "WS-PSNR".into(),
            weights: WeightSource::Erp,
        }
    }

    pub fn with_weights(name: impl Into<String>, weights: PlanarWeights<T>) -> Self {
        Self {
            name: name.into(),
            weights: WeightSource::Fixed(weights),
        }
    }
}

impl<T: Real> VideoMetric<T> for WeightedPsnr<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let erp;
        let weights = match &self.weights {
            WeightSource::Uniform => None,
            WeightSource::Erp => {
                erp = PlanarWeights::erp(reference.width(), reference.height())?;
                Some(&erp)
            }
            WeightSource::Fixed(w) => {
                if (w.y.width(), w.y.height()) != (reference.width(), reference.height()) {
                    return Err(MetricError::DimensionMismatch {
                        reference: (reference.width(), reference.height()),
                        distorted: (w.y.width(), w.y.height()),
                    });
                }
                Some(w)
            }
        };
        let features: Vec<T> = PlaneKind::ALL
            .iter()
            .map(|&k| psnr_plane(reference.plane(k), distorted.plane(k), weights.map(|w| w.plane(k))))
            .collect();
        Ok(FrameScore {
            score: features[0],
            features,
        })
    }
}

type TapCache<T> = RwLock<HashMap<(usize, usize), Arc<Vec<BilinearTap<T>>>>>;

/// PSNR over bilinearly interpolated values at uniformly spread sphere points.
#[derive(Debug)]
pub struct SPsnr<T> {
    samples: Arc<SphereSampleSet<T>>,
    taps: TapCache<T>,
}

impl<T: Real> SPsnr<T> {
    pub fn new(samples: SphereSampleSet<T>) -> Self {
        Self {
            samples: Arc::new(samples),
            taps: RwLock::new(HashMap::new()),
        }
    }

    fn taps_for(&self, width: usize, height: usize) -> Arc<Vec<BilinearTap<T>>> {
        if let Some(t) = self.taps.read().expect("tap cache poisoned").get(&(width, height)) {
            return Arc::clone(t);
        }
        let taps: Vec<_> = self
            .samples
            .erp_coords(width, height)
            .into_iter()
            .map(|(u, v)| BilinearTap::new(width, height, u, v))
            .collect();
        let taps = Arc::new(taps);
        self.taps
            .write()
            .expect("tap cache poisoned")
            .insert((width, height), Arc::clone(&taps));
        taps
    }
}

impl<T: Real> VideoMetric<T> for SPsnr<T> {
    fn name(&self) -> &str {
        "S-PSNR"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let features: Vec<T> = PlaneKind::ALL
            .iter()
            .map(|&k| {
                let (r, d) = (reference.plane(k), distorted.plane(k));
                let taps = self.taps_for(r.width, r.height);
                let sse: T = taps
                    .iter()
                    .map(|t| {
                        let e = t.sample(r.data, T::from_sample) - t.sample(d.data, T::from_sample);
                        e * e
                    })
                    .sum();
                psnr_from_mse(sse / T::from_count(taps.len()))
            })
            .collect();
        Ok(FrameScore {
            score: features[0],
            features,
        })
    }
}

/// PSNR after remapping each plane to the Craster parabolic projection.
#[derive(Debug)]
pub struct CppPsnr<T> {
    grids: RwLock<HashMap<(usize, usize), Arc<CppGrid<T>>>>,
}

impl<T: Real> Default for CppPsnr<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CppPsnr<T> {
    pub fn new() -> Self {
        Self {
            grids: RwLock::new(HashMap::new()),
        }
    }

    /// Seeds the grid cache with a prebuilt luma grid.
    pub fn with_luma_grid(grid: CppGrid<T>) -> Self {
        let this = Self::new();
        let dims = grid.source_dims();
        this.grids.write().expect("grid cache poisoned").insert(dims, Arc::new(grid));
        this
    }

    fn grid_for(&self, width: usize, height: usize) -> Result<Arc<CppGrid<T>>, MetricError> {
        if let Some(g) = self.grids.read().expect("grid cache poisoned").get(&(width, height)) {
            return Ok(Arc::clone(g));
        }
        let grid = Arc::new(CppGrid::for_plane(width, height)?);
        self.grids
            .write()
            .expect("grid cache poisoned")
            .insert((width, height), Arc::clone(&grid));
        Ok(grid)
    }
}

impl<T: Real> VideoMetric<T> for CppPsnr<T> {
    fn name(&self) -> &str {
        "CPP-PSNR"
    }

    fn frame(&self, reference: &VideoFrame, distorted: &VideoFrame) -> Result<FrameScore<T>, MetricError> {
        check_pair(reference, distorted)?;
        let mut features = Vec::with_capacity(3);
        for k in PlaneKind::ALL {
            let (r, d) = (reference.plane(k), distorted.plane(k));
            let grid = self.grid_for(r.width, r.height)?;
            let mut sse = T::zero();
            let mut n = 0usize;
            for tap in grid.taps().iter().flatten() {
                let e = tap.sample(r.data, T::from_sample) - tap.sample(d.data, T::from_sample);
                sse += e * e;
                n += 1;
            }
            features.push(psnr_from_mse(sse / T::from_count(n.max(1))));
        }
        Ok(FrameScore {
            score: features[0],
            features,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::VideoSequence;
    use crate::sphere::sphere_samples;
    use crate::video::{cpp_psnr, psnr_planar, s_psnr, ws_psnr};

    fn seq(frames: Vec<VideoFrame>) -> VideoSequence {
        VideoSequence::new(frames).unwrap()
    }

    fn textured(w: usize, h: usize, seed: u32) -> VideoFrame {
        let mut f = VideoFrame::filled(w, h, 0, 0, 0).unwrap();
        for k in PlaneKind::ALL {
            let pw = f.plane(k).width;
            for (i, s) in f.plane_mut(k).iter_mut().enumerate() {
                let (x, y) = ((i % pw) as u32, (i / pw) as u32);
                *s = ((x * 7 + y * 13 + seed * 31) % 200 + 20) as u8;
            }
        }
        f
    }

    #[test]
    fn identical_sequences_hit_the_cap() {
        let f = textured(32, 16, 1);
        let s = seq(vec![f.clone(), f]);
        let samples = sphere_samples::<f64>(2000).unwrap();
        for r in [
            psnr_planar::<f64>(&s, &s, None).unwrap(),
            ws_psnr::<f64>(&s, &s).unwrap(),
            s_psnr(&s, &s, samples).unwrap(),
            cpp_psnr(&s, &s, CppGrid::for_plane(32, 16).unwrap()).unwrap(),
        ] {
            assert_eq!(r.score, 100.0, "{}", r.model_name);
            assert_eq!(r.features, vec![100.0; 3]);
        }
    }

    #[test]
    fn single_pixel_hand_value() {
        fn p(data: &[u8]) -> PlaneRef<'_> {
            PlaneRef { width: 1, height: 1, data }
        }
        let v: f64 = psnr_plane(p(&[100u8]), p(&[110u8]), None);
        let expected = 10.0 * (255.0f64 * 255.0 / 100.0).log10();
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 28.13).abs() < 0.005);
    }

    #[test]
    fn equator_errors_cost_more_than_polar_errors() {
        let (w, h) = (64, 32);
        let base = VideoFrame::filled(w, h, 128, 128, 128).unwrap();
        let mut equator = base.clone();
        let mut pole = base.clone();
        // one full row of +10 error each; equal plain MSE
        for x in 0..w {
            equator.plane_mut(PlaneKind::Y)[(h / 2) * w + x] = 138;
            pole.plane_mut(PlaneKind::Y)[x] = 138;
        }
        let b = seq(vec![base]);
        let plain_e = psnr_planar::<f64>(&b, &seq(vec![equator.clone()]), None).unwrap().score;
        let plain_p = psnr_planar::<f64>(&b, &seq(vec![pole.clone()]), None).unwrap().score;
        assert_eq!(plain_e, plain_p);
        let ws_e = ws_psnr::<f64>(&b, &seq(vec![equator])).unwrap().score;
        let ws_p = ws_psnr::<f64>(&b, &seq(vec![pole])).unwrap().score;
        assert!(ws_e < ws_p, "equator {ws_e} vs pole {ws_p}");
    }

    #[test]
    fn constant_offset_is_sampling_independent() {
        let r = seq(vec![VideoFrame::filled(64, 32, 0, 0, 0).unwrap()]);
        let d = seq(vec![VideoFrame::filled(64, 32, 16, 16, 16).unwrap()]);
        let expected = 10.0 * (255.0f64 * 255.0 / 256.0).log10();
        // 10 log10(254) = 24.048
        assert!((expected - 24.06).abs() < 0.02);
        let s = s_psnr(&r, &d, sphere_samples::<f64>(5000).unwrap()).unwrap();
        let c = cpp_psnr(&r, &d, CppGrid::for_plane(64, 32).unwrap()).unwrap();
        let ws = ws_psnr::<f64>(&r, &d).unwrap();
        let plain = psnr_planar::<f64>(&r, &d, None).unwrap();
        for v in [s.features, c.features, ws.features, plain.features].concat() {
            assert!((v - expected).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn uniform_weights_equal_plain_psnr() {
        let r = textured(32, 16, 2);
        let d = textured(32, 16, 5);
        let weights = PlanarWeights {
            y: WeightMap::uniform(32, 16),
            u: WeightMap::uniform(16, 8),
            v: WeightMap::uniform(16, 8),
        };
        let a = psnr_planar::<f64>(&seq(vec![r.clone()]), &seq(vec![d.clone()]), Some(weights)).unwrap();
        let b = psnr_planar::<f64>(&seq(vec![r]), &seq(vec![d]), None).unwrap();
        assert_eq!(a.features, b.features);
    }

    #[test]
    fn pooling_is_mean_of_frames() {
        let refs = vec![textured(32, 16, 0), textured(32, 16, 1), textured(32, 16, 2)];
        let dists = vec![textured(32, 16, 3), textured(32, 16, 1), textured(32, 16, 7)];
        let metric = WeightedPsnr::<f64>::ws_psnr();
        let pooled = metric.evaluate(&seq(refs.clone()), &seq(dists.clone())).unwrap();
        let singles: Vec<f64> = refs
            .iter()
            .zip(&dists)
            .map(|(r, d)| metric.frame(r, d).unwrap().score)
            .collect();
        assert_eq!(pooled.score, (singles[0] + singles[1] + singles[2]) / 3.0);
    }
}
