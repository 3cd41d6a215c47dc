//! Spherical geometry for equirectangular (ERP) frames.
//!
//! Conventions used throughout:
//!
//! * longitude `lon` in `[-pi, pi)`, latitude `lat` in `[-pi/2, pi/2]`, north up;
//! * continuous ERP coordinates `u = (lon / 2pi + 0.5) * width`,
//!   `v = (0.5 - lat / pi) * height`, so pixel `(i, j)` has its centre at
//!   `(i + 0.5, j + 0.5)`;
//! * unit vector `(cos lat cos lon, cos lat sin lon, sin lat)`.

mod cpp;
mod fibonacci;
mod interp;
mod weights;

pub use cpp::{cpp_resample, cpp_resample_plane, CppGrid, CppResampled};
pub use fibonacci::{sphere_samples, SphereSampleSet, DEFAULT_SPHERE_POINTS, MIN_SPHERE_POINTS};
pub use interp::BilinearTap;
pub use weights::{erp_weights, WeightMap};

use crate::Real;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("dimensions must be non-zero, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("need at least {min} sphere points, got {count}")]
    TooFewPoints { count: usize, min: usize },
    #[error("grid built for {expected:?} but plane is {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("sphere point file line {line}: {reason}")]
    PointFile { line: usize, reason: String },
    #[error("reading sphere point file: {0}")]
    Io(#[from] std::io::Error),
}

/// Longitude/latitude of a (not necessarily normalized) direction vector.
pub fn vector_to_lonlat<T: Real>(p: [T; 3]) -> (T, T) {
    let lon = p[1].atan2(p[0]);
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let lat = (p[2] / r).max(-T::one()).min(T::one()).asin();
    (lon, lat)
}

pub fn lonlat_to_vector<T: Real>(lon: T, lat: T) -> [T; 3] {
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

/// Continuous ERP coordinates of a longitude/latitude pair.
pub fn lonlat_to_erp<T: Real>(lon: T, lat: T, width: usize, height: usize) -> (T, T) {
    let half = T::lit(0.5);
    let u = (lon / T::TAU() + half) * T::from_count(width);
    let v = (half - lat / T::PI()) * T::from_count(height);
    (u, v)
}

pub fn erp_to_lonlat<T: Real>(u: T, v: T, width: usize, height: usize) -> (T, T) {
    let half = T::lit(0.5);
    let lon = (u / T::from_count(width) - half) * T::TAU();
    let lat = (half - v / T::from_count(height)) * T::PI();
    (lon, lat)
}
