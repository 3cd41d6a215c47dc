use crate::Real;

use super::GeometryError;

/// Per-pixel area weights for an ERP plane. Weights depend on the row only.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap<T> {
    width: usize,
    height: usize,
    rows: Vec<T>,
}

/// Cosine-of-latitude weights at pixel centres: `w(j) = cos((j + 0.5 - H/2) * pi / H)`.
pub fn erp_weights<T: Real>(width: usize, height: usize) -> Result<WeightMap<T>, GeometryError> {
    if width == 0 || height == 0 {
        return Err(GeometryError::ZeroDimension { width, height });
    }
    let h = T::from_count(height);
    let step = T::PI() / h;
    let rows = (0..height)
        .map(|j| {
            // |offset| keeps the map bit-symmetric about the equator
            let offset = (T::from_count(j) + T::lit(0.5) - h / T::lit(2.0)).abs();
            (offset * step).cos()
        })
        .collect();
    Ok(WeightMap { width, height, rows })
}

impl<T: Real> WeightMap<T> {
    /// Uniform weights; turns weighted PSNR into plain PSNR.
    pub fn uniform(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            rows: vec![T::one(); height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn row_weight(&self, row: usize) -> T {
        self.rows[row]
    }

    pub fn row_weights(&self) -> &[T] {
        &self.rows
    }

    pub fn weight(&self, _col: usize, row: usize) -> T {
        self.rows[row]
    }

    /// Sum over every pixel of the map.
    pub fn total(&self) -> T {
        self.rows.iter().copied().sum::<T>() * T::from_count(self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let w = erp_weights::<f64>(5, 2).unwrap();
        let expected = std::f64::consts::FRAC_PI_4.cos();
        assert!((w.row_weight(0) - expected).abs() < 1e-15);
        assert!((w.row_weight(1) - expected).abs() < 1e-15);
        assert!((expected - 0.7071).abs() < 1e-4);
    }

    #[test]
    fn single_row_is_equator() {
        let w = erp_weights::<f64>(7, 1).unwrap();
        assert_eq!(w.row_weight(0), 1.0);
    }

    #[test]
    fn column_sum_matches_integral() {
        for h in [100usize, 1000] {
            let w = erp_weights::<f64>(3, h).unwrap();
            let sum: f64 = w.row_weights().iter().sum();
            let target = 2.0 * h as f64 / std::f64::consts::PI;
            assert!((sum - target).abs() / target < 1e-3, "h={h}: {sum} vs {target}");
        }
    }

    #[test]
    fn symmetric_about_equator() {
        for h in [1usize, 2, 7, 64, 1001] {
            let w = erp_weights::<f64>(2, h).unwrap();
            for j in 0..h {
                assert_eq!(w.row_weight(j), w.row_weight(h - 1 - j));
            }
            let f = erp_weights::<f32>(2, h).unwrap();
            for j in 0..h {
                assert_eq!(f.row_weight(j), f.row_weight(h - 1 - j));
                assert!(f.row_weight(j) > 0.0 && f.row_weight(j) <= 1.0);
            }
        }
    }

    #[test]
    fn zero_dimension() {
        assert!(erp_weights::<f64>(0, 4).is_err());
        assert!(erp_weights::<f64>(4, 0).is_err());
    }
}
