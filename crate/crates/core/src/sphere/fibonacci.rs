use std::collections::HashMap;
use std::io::BufRead;

use crate::Real;

use super::{lonlat_to_erp, vector_to_lonlat, GeometryError};

/// Point count used when none is configured.
pub const DEFAULT_SPHERE_POINTS: usize = 655_362;
pub const MIN_SPHERE_POINTS: usize = 12;

/// Near-uniform unit vectors covering the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSampleSet<T> {
    points: Vec<[T; 3]>,
}

/// Spherical Fibonacci lattice with `count` points.
///
/// Point `i` sits at height `z = 1 - (2i + 1) / n` and longitude `i` times the
/// golden angle.
pub fn sphere_samples<T: Real>(count: usize) -> Result<SphereSampleSet<T>, GeometryError> {
    if count < MIN_SPHERE_POINTS {
        return Err(GeometryError::TooFewPoints {
            count,
            min: MIN_SPHERE_POINTS,
        });
    }
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let n = count as f64;
    let points = (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n;
            let r = (1.0 - z * z).sqrt();
            let theta = (i as f64 * golden_angle).rem_euclid(std::f64::consts::TAU);
            [T::lit(r * theta.cos()), T::lit(r * theta.sin()), T::lit(z)]
        })
        .collect();
    Ok(SphereSampleSet { points })
}

impl<T: Real> SphereSampleSet<T> {
    /// Wraps caller-supplied points, normalizing each to unit length.
    pub fn from_points(points: Vec<[T; 3]>) -> Result<Self, GeometryError> {
        if points.len() < MIN_SPHERE_POINTS {
            return Err(GeometryError::TooFewPoints {
                count: points.len(),
                min: MIN_SPHERE_POINTS,
            });
        }
        let mut out = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if !(norm > T::zero()) || !norm.is_finite() {
                return Err(GeometryError::PointFile {
                    line: i + 1,
                    reason: "point has zero or non-finite length".into(),
                });
            }
            out.push([p[0] / norm, p[1] / norm, p[2] / norm]);
        }
        Ok(Self { points: out })
    }

    /// Parses one whitespace-separated `x y z` triple per line. Blank lines and `#` comments are skipped.
    pub fn from_reader(reader: impl BufRead) -> Result<Self, GeometryError> {
        let mut points = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let coords: Vec<T> = text
                .split_whitespace()
                .map(|t| t.parse::<T>())
                .collect::<Result<_, _>>()
                .map_err(|_| GeometryError::PointFile {
                    line: n + 1,
                    reason: format!("cannot parse `{text}`"),
                })?;
            if coords.len() != 3 {
                return Err(GeometryError::PointFile {
                    line: n + 1,
                    reason: format!("expected 3 coordinates, got {}", coords.len()),
                });
            }
            points.push([coords[0], coords[1], coords[2]]);
        }
        Self::from_points(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[T; 3]] {
        &self.points
    }

    /// Continuous ERP coordinates of every point for a plane of the given size.
    pub fn erp_coords(&self, width: usize, height: usize) -> Vec<(T, T)> {
        self.points
            .iter()
            .map(|&p| {
                let (lon, lat) = vector_to_lonlat(p);
                lonlat_to_erp(lon, lat, width, height)
            })
            .collect()
    }

    /// Angular distance from each point to its nearest neighbour, in radians.
    pub fn nearest_neighbor_angles(&self) -> Vec<T> {
        let pts: Vec<[f64; 3]> = self
            .points
            .iter()
            .map(|p| [p[0].to_f64_lossy(), p[1].to_f64_lossy(), p[2].to_f64_lossy()])
            .collect();
        let cell = 1.5 * (4.0 * std::f64::consts::PI / pts.len() as f64).sqrt();
        let key = |p: &[f64; 3]| {
            [
                (p[0] / cell).floor() as i64,
                (p[1] / cell).floor() as i64,
                (p[2] / cell).floor() as i64,
            ]
        };
        let mut grid: HashMap<[i64; 3], Vec<u32>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            grid.entry(key(p)).or_default().push(i as u32);
        }
        let max_ring = (2.0 / cell).ceil() as i64 + 1;
        pts.iter()
            .enumerate()
            .map(|(i, p)| {
                let k = key(p);
                let mut best = f64::INFINITY;
                let mut ring = 1i64;
                loop {
                    for dx in -ring..=ring {
                        for dy in -ring..=ring {
                            for dz in -ring..=ring {
                                // only the shell of this ring; the interior was already scanned
                                if ring > 1 && dx.abs() < ring && dy.abs() < ring && dz.abs() < ring {
                                    continue;
                                }
                                if let Some(bucket) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                                    for &j in bucket {
                                        if j as usize == i {
                                            continue;
                                        }
                                        let q = &pts[j as usize];
                                        let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                                        best = best.min(d2);
                                    }
                                }
                            }
                        }
                    }
                    // every point within `ring * cell` has now been seen
                    if best.sqrt() <= ring as f64 * cell || ring >= max_ring {
                        break;
                    }
                    ring += 1;
                }
                T::lit(2.0 * (best.sqrt() / 2.0).min(1.0).asin())
            })
            .collect()
    }
}
