use crate::Real;

/// Precomputed bilinear lookup at a continuous ERP position.
///
/// Columns wrap around (longitude is periodic); rows clamp at the poles.
#[derive(Debug, Clone, Copy)]
pub struct BilinearTap<T> {
    idx: [u32; 4],
    fx: T,
    fy: T,
}

impl<T: Real> BilinearTap<T> {
    pub fn new(width: usize, height: usize, u: T, v: T) -> Self {
        let half = T::lit(0.5);
        let x = u - half;
        let y = v - half;
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let w = width as i64;
        let h = height as i64;
        let xi = x0.to_i64().unwrap_or(0);
        let yi = y0.to_i64().unwrap_or(0);
        let col = |c: i64| c.rem_euclid(w) as usize;
        let row = |r: i64| r.clamp(0, h - 1) as usize;
        let (c0, c1) = (col(xi), col(xi + 1));
        let (r0, r1) = (row(yi), row(yi + 1));
        let at = |r: usize, c: usize| (r * width + c) as u32;
        Self {
            idx: [at(r0, c0), at(r0, c1), at(r1, c0), at(r1, c1)],
            fx,
            fy,
        }
    }

    /// Interpolates `data` (row-major, dimensions as given to `new`).
    ///
    /// Written in lerp form so constant and affine fields reproduce exactly.
    #[inline]
    pub fn sample<S: Copy>(&self, data: &[S], to_real: impl Fn(S) -> T) -> T {
        let p = |k: usize| to_real(data[self.idx[k] as usize]);
        let (p00, p10, p01, p11) = (p(0), p(1), p(2), p(3));
        let top = p00 + self.fx * (p10 - p00);
        let bottom = p01 + self.fx * (p11 - p01);
        top + self.fy * (bottom - top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_centres_hit_samples() {
        let data: Vec<u8> = (0..12).collect();
        for j in 0..3 {
            for i in 0..4 {
                let tap = BilinearTap::new(4, 3, i as f64 + 0.5, j as f64 + 0.5);
                assert_eq!(tap.sample(&data, |s| s as f64), (j * 4 + i) as f64);
            }
        }
    }

    #[test]
    fn columns_wrap_rows_clamp() {
        let data = [0u8, 10, 20, 30];
        // halfway between last and first column
        let tap = BilinearTap::new(4, 1, 4.0, 0.5);
        assert_eq!(tap.sample(&data, |s| s as f64), 15.0);
        let tap = BilinearTap::new(4, 1, 1.5, 0.0);
        assert_eq!(tap.sample(&data, |s| s as f64), 10.0);
    }
}
