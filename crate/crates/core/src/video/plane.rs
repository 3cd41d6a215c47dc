//! Floating-point image planes and the filtering primitives the metrics share.

use crate::media::PlaneRef;
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

/// Mirror index with edge repetition (`-1 -> 0`, `n -> n-1`), valid for any offset.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Normalized 1-D Gaussian of odd length `size`.
pub(crate) fn gaussian_kernel<T: Real>(size: usize, sigma: f64) -> Vec<T> {
    let c = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size)
        .map(|i| (-(i as f64 - c).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| T::lit(v / sum)).collect()
}

impl<T: Real> Plane<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), width * height, "plane data length");
        Self { width, height, data }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_samples(plane: PlaneRef<'_>) -> Self {
        Self::new(plane.width, plane.height, plane.data.iter().map(|&s| T::from_sample(s)).collect())
    }

    /// Samples divided by `scale` (e.g. 255 for unit-range intensities).
    pub fn from_samples_scaled(plane: PlaneRef<'_>, scale: T) -> Self {
        Self::new(
            plane.width,
            plane.height,
            plane.data.iter().map(|&s| T::from_sample(s) / scale).collect(),
        )
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    fn at_sym(&self, x: isize, y: isize) -> T {
        self.at(reflect(x, self.width), reflect(y, self.height))
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn mean(&self) -> T {
        self.data.iter().copied().sum::<T>() / T::from_count(self.data.len())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!((self.width, self.height), (other.width, other.height));
        Self::new(
            self.width,
            self.height,
            self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    /// Same-size correlation with a separable kernel (`kx` along rows, `ky` along columns).
    pub fn filter_separable(&self, kx: &[T], ky: &[T]) -> Self {
        let (w, h) = (self.width, self.height);
        let cx = (kx.len() as isize - 1) / 2;
        let cy = (ky.len() as isize - 1) / 2;
        let mut tmp = vec![T::zero(); w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = T::zero();
                for (k, &c) in kx.iter().enumerate() {
                    acc += c * self.at_sym(x as isize + k as isize - cx, y as isize);
                }
                tmp[y * w + x] = acc;
            }
        }
        let tmp = Plane::new(w, h, tmp);
        let mut out = vec![T::zero(); w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = T::zero();
                for (k, &c) in ky.iter().enumerate() {
                    acc += c * tmp.at_sym(x as isize, y as isize + k as isize - cy);
                }
                out[y * w + x] = acc;
            }
        }
        Plane::new(w, h, out)
    }

    /// Same-size correlation with a dense 3x3 kernel given row-major.
    pub fn filter3x3(&self, k: &[T; 9]) -> Self {
        let (w, h) = (self.width, self.height);
        let mut out = vec![T::zero(); w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = T::zero();
                for dy in 0..3 {
                    for dx in 0..3 {
                        acc += k[dy * 3 + dx] * self.at_sym(x as isize + dx as isize - 1, y as isize + dy as isize - 1);
                    }
                }
                out[y * w + x] = acc;
            }
        }
        Plane::new(w, h, out)
    }

    /// Keeps every `step`-th sample starting at the origin.
    pub fn subsample(&self, step: usize) -> Self {
        let w = self.width.div_ceil(step);
        let h = self.height.div_ceil(step);
        let mut data = Vec::with_capacity(w * h);
        for y in (0..self.height).step_by(step) {
            for x in (0..self.width).step_by(step) {
                data.push(self.at(x, y));
            }
        }
        Plane::new(w, h, data)
    }

    /// `factor x factor` box average followed by subsampling; edges mirror.
    pub fn box_downsample(&self, factor: usize) -> Self {
        if factor <= 1 {
            return self.clone();
        }
        let w = self.width.div_ceil(factor);
        let h = self.height.div_ceil(factor);
        let norm = T::from_count(factor * factor);
        let mut data = Vec::with_capacity(w * h);
        for by in 0..h {
            for bx in 0..w {
                let mut acc = T::zero();
                for dy in 0..factor {
                    for dx in 0..factor {
                        acc += self.at_sym((bx * factor + dx) as isize, (by * factor + dy) as isize);
                    }
                }
                data.push(acc / norm);
            }
        }
        Plane::new(w, h, data)
    }

    /// Nearest-neighbour 2x upsampling.
    pub fn upsample2(&self) -> Self {
        let (w, h) = (self.width * 2, self.height * 2);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                data.push(self.at(x / 2, y / 2));
            }
        }
        Plane::new(w, h, data)
    }
}

/// Local first and second moments of a plane pair under a separable window.
pub(crate) struct LocalStats<T> {
    pub mu_x: Plane<T>,
    pub mu_y: Plane<T>,
    pub var_x: Plane<T>,
    pub var_y: Plane<T>,
    pub cov: Plane<T>,
}

pub(crate) fn local_stats<T: Real>(x: &Plane<T>, y: &Plane<T>, window: &[T]) -> LocalStats<T> {
    let mu_x = x.filter_separable(window, window);
    let mu_y = y.filter_separable(window, window);
    let xx = x.zip_map(x, |a, b| a * b).filter_separable(window, window);
    let yy = y.zip_map(y, |a, b| a * b).filter_separable(window, window);
    let xy = x.zip_map(y, |a, b| a * b).filter_separable(window, window);
    let var_x = xx.zip_map(&mu_x, |e, m| e - m * m);
    let var_y = yy.zip_map(&mu_y, |e, m| e - m * m);
    let mxy = mu_x.zip_map(&mu_y, |a, b| a * b);
    let cov = xy.zip_map(&mxy, |e, m| e - m);
    LocalStats {
        mu_x,
        mu_y,
        var_x,
        var_y,
        cov,
    }
}
