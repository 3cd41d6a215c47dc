use std::path::Path;

use crate::media::RatingsMatrix;
use crate::Real;

use super::EvalError;

/// MOS per sequence on the 0-100 scale plus the rescaled z-scores behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct MosTable<T> {
    pub sequence_ids: Vec<String>,
    pub mos: Vec<T>,
    /// `z_prime[i][j]` for subject i and sequence j.
    pub z_prime: Vec<Vec<T>>,
}

impl<T: Real> MosTable<T> {
    pub fn get(&self, sequence_id: &str) -> Option<T> {
        self.sequence_ids.iter().position(|s| s == sequence_id).map(|j| self.mos[j])
    }

    /// Writes `sequence_id,mos`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| EvalError::Csv(e.to_string());
        w.write_record(["sequence_id", "mos"]).map_err(csv_err)?;
        for (id, m) in self.sequence_ids.iter().zip(&self.mos) {
            w.write_record([id.clone(), m.to_string()]).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| EvalError::Csv(e.to_string()))?;
        crate::store::write_atomic(path.as_ref(), &bytes)?;
        Ok(())
    }
}

/// Per-subject z-scores (sample standard deviation) mapped by `100 (z + 3) / 6`, averaged over subjects.
///
/// Each z is evaluated as `sign(D) sqrt((n - 1) D^2 / sum D^2)` with
/// `D = n r - sum r`, which is exactly invariant to integer affine rating maps
/// of integer ratings.
pub fn compute_mos<T: Real>(ratings: &RatingsMatrix<T>) -> Result<MosTable<T>, EvalError> {
    let n = ratings.sequence_ids.len();
    if n < 2 {
        return Err(EvalError::TooFewSequences(n));
    }
    let nt = T::from_count(n);
    let (hundred, six) = (T::lit(100.0), T::lit(6.0));
    let three = T::lit(3.0);
    let mut z_prime = Vec::with_capacity(ratings.raw.len());
    for (subject, row) in ratings.subject_ids.iter().zip(&ratings.raw) {
        let sum: T = row.iter().copied().sum();
        let dev: Vec<T> = row.iter().map(|&r| nt * r - sum).collect();
        let ss: T = dev.iter().map(|&d| d * d).sum();
        if !(ss > T::zero()) {
            return Err(EvalError::ConstantRater(subject.clone()));
        }
        let dof = T::from_count(n - 1);
        z_prime.push(
            dev.iter()
                .map(|&d| {
                    let z = (dof * d * d / ss).sqrt();
                    let z = if d < T::zero() { -z } else { z };
                    (z + three) * hundred / six
                })
                .collect::<Vec<T>>(),
        );
    }
    let subjects = T::from_count(z_prime.len());
    let mos = (0..n)
        .map(|j| z_prime.iter().map(|row| row[j]).sum::<T>() / subjects)
        .collect();
    Ok(MosTable {
        sequence_ids: ratings.sequence_ids.clone(),
        mos,
        z_prime,
    })
}
