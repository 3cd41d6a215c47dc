use crate::media::{PlaneRef, VideoFrame};
use crate::Real;

use super::{lonlat_to_erp, BilinearTap, GeometryError};

/// Lookup table from a Craster parabolic (equal-area) target raster to ERP source positions.
#[derive(Debug, Clone)]
pub struct CppGrid<T> {
    src_width: usize,
    src_height: usize,
    width: usize,
    height: usize,
    /// `None` outside the parabolic outline.
    taps: Vec<Option<BilinearTap<T>>>,
    sources: Vec<Option<(T, T)>>,
}

/// Output of [`cpp_resample`]: a row-major plane plus its validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CppResampled<T> {
    pub width: usize,
    pub height: usize,
    pub values: Vec<T>,
    pub mask: Vec<bool>,
}

impl<T: Real> CppGrid<T> {
    /// Grid whose target raster has the same size as the ERP source.
    pub fn for_plane(width: usize, height: usize) -> Result<Self, GeometryError> {
        Self::new(width, height, width, height)
    }

    /// Craster parabolic inverse mapping. The target raster spans the projection's
    /// bounding box `[-sqrt(3 pi), sqrt(3 pi)] x [-sqrt(3 pi)/2, sqrt(3 pi)/2]`.
    pub fn new(src_width: usize, src_height: usize, width: usize, height: usize) -> Result<Self, GeometryError> {
        for (w, h) in [(src_width, src_height), (width, height)] {
            if w == 0 || h == 0 {
                return Err(GeometryError::ZeroDimension { width: w, height: h });
            }
        }
        let pi = T::PI();
        let three = T::lit(3.0);
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        let extent = (three * pi).sqrt();
        let x_scale = (three / pi).sqrt();
        let mut taps = Vec::with_capacity(width * height);
        let mut sources = Vec::with_capacity(width * height);
        for j in 0..height {
            let y = (half - (T::from_count(j) + half) / T::from_count(height)) * extent;
            let lat = three * (y / extent).asin();
            let denom = two * (two * lat / three).cos() - T::one();
            for i in 0..width {
                let x = ((T::from_count(i) + half) / T::from_count(width) - half) * two * extent;
                let lon = x / (x_scale * denom);
                if lon.abs() <= pi {
                    let (u, v) = lonlat_to_erp(lon, lat, src_width, src_height);
                    taps.push(Some(BilinearTap::new(src_width, src_height, u, v)));
                    sources.push(Some((u, v)));
                } else {
                    taps.push(None);
                    sources.push(None);
                }
            }
        }
        Ok(Self {
            src_width,
            src_height,
            width,
            height,
            taps,
            sources,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn source_dims(&self) -> (usize, usize) {
        (self.src_width, self.src_height)
    }

    /// ERP source position for each target pixel, `None` outside the outline.
    pub fn sources(&self) -> &[Option<(T, T)>] {
        &self.sources
    }

    pub fn mask(&self) -> Vec<bool> {
        self.taps.iter().map(Option::is_some).collect()
    }

    /// Valid pixels over bounding-box pixels; 2/3 for a fine raster.
    pub fn mask_fraction(&self) -> f64 {
        self.taps.iter().filter(|t| t.is_some()).count() as f64 / self.taps.len() as f64
    }

    pub(crate) fn taps(&self) -> &[Option<BilinearTap<T>>] {
        &self.taps
    }
}

/// Bilinearly resamples one ERP plane onto the grid.
pub fn cpp_resample_plane<T: Real>(plane: PlaneRef<'_>, grid: &CppGrid<T>) -> Result<CppResampled<T>, GeometryError> {
    if (plane.width, plane.height) != grid.source_dims() {
        return Err(GeometryError::DimensionMismatch {
            expected: grid.source_dims(),
            actual: (plane.width, plane.height),
        });
    }
    let mut values = Vec::with_capacity(grid.taps.len());
    let mut mask = Vec::with_capacity(grid.taps.len());
    for tap in &grid.taps {
        match tap {
            Some(t) => {
                values.push(t.sample(plane.data, T::from_sample));
                mask.push(true);
            }
            None => {
                values.push(T::zero());
                mask.push(false);
            }
        }
    }
    Ok(CppResampled {
        width: grid.width,
        height: grid.height,
        values,
        mask,
    })
}

/// Resamples the luma plane of an ERP frame.
pub fn cpp_resample<T: Real>(frame: &VideoFrame, grid: &CppGrid<T>) -> Result<CppResampled<T>, GeometryError> {
    cpp_resample_plane(frame.plane(crate::media::PlaneKind::Y), grid)
}
