//! Rank and linear correlation between predictions and subjective scores.

use crate::Real;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {min} points, got {n}")]
    TooFew { n: usize, min: usize },
    #[error("correlation undefined for a constant vector")]
    Constant,
}

fn check<T: Real>(x: &[T], y: &[T]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFew { n: x.len(), min: 3 });
    }
    Ok(())
}

/// 1-based ranks with ties sharing their average rank. Also reports whether any tie occurred.
pub fn average_ranks<T: Real>(x: &[T]) -> (Vec<T>, bool) {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![T::zero(); x.len()];
    let mut tied = false;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        tied |= j - i > 1;
        // positions i..j hold ranks i+1..=j
        let rank = T::from_count(i + j + 1) / T::lit(2.0);
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    (ranks, tied)
}

/// Pearson linear correlation.
pub fn plcc<T: Real>(x: &[T], y: &[T]) -> Result<T, StatsError> {
    check(x, y)?;
    let n = T::from_count(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (a, b) = (a - mx, b - my);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if !(sxx > T::zero() && syy > T::zero()) {
        return Err(StatsError::Constant);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one()))
}

/// Spearman rank correlation, average ranks for ties.
///
/// Without ties this is `1 - 6 sum d^2 / (n (n^2 - 1))`, evaluated exactly in
/// that form; with ties it is the Pearson correlation of the ranks.
pub fn srcc<T: Real>(x: &[T], y: &[T]) -> Result<T, StatsError> {
    check(x, y)?;
    let (rx, tx) = average_ranks(x);
    let (ry, ty) = average_ranks(y);
    if tx || ty {
        return plcc(&rx, &ry);
    }
    let n = T::from_count(x.len());
    let d2: T = rx.iter().zip(&ry).map(|(&a, &b)| (a - b) * (a - b)).sum();
    Ok(T::one() - T::lit(6.0) * d2 / (n * (n * n - T::one())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn srcc_examples() {
        let p = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(srcc(&p, &p).unwrap(), 1.0);
        let rev = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(srcc(&p, &rev).unwrap(), -1.0);
        assert_eq!(srcc(&p, &[1.0, 3.0, 2.0, 5.0, 4.0]).unwrap(), 0.8);
        assert_eq!(srcc(&p, &[2.0; 5]), Err(StatsError::Constant));
        assert!(matches!(srcc(&p[..2], &p[..2]), Err(StatsError::TooFew { .. })));
    }

    #[test]
    fn ties_use_average_ranks() {
        let (r, tied) = average_ranks(&[10.0, 20.0, 10.0, 30.0]);
        assert!(tied);
        assert_eq!(r, vec![1.5, 3.0, 1.5, 4.0]);
        let s: f64 = srcc(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((s - 0.948_683_298_050_513_8).abs() < 1e-12);
    }

    #[test]
    fn plcc_examples() {
        let p = [1.0, 2.0, 3.0];
        let affine: Vec<f64> = p.iter().map(|v| 2.0 * v + 3.0).collect();
        assert!((plcc(&p, &affine).unwrap() - 1.0).abs() < 1e-15);
        let anti: Vec<f64> = p.iter().map(|v| -2.0 * v + 3.0).collect();
        assert!((plcc(&p, &anti).unwrap() + 1.0).abs() < 1e-15);
        assert!((plcc(&p, &[1.0, 2.0, 4.0]).unwrap() - 0.9820).abs() < 5e-5);
    }

    proptest! {
        #[test]
        fn srcc_monotone_invariance(xs in prop::collection::vec(-100.0f64..100.0, 3..30), ys in prop::collection::vec(-100.0f64..100.0, 30)) {
            let ys = &ys[..xs.len()];
            if let Ok(s) = srcc(&xs, ys) {
                let cubed: Vec<f64> = xs.iter().map(|v| v.powi(3) + 7.0).collect();
                prop_assert_eq!(srcc(&cubed, ys).unwrap(), s);
                prop_assert!((-1.0..=1.0).contains(&s));
            }
        }

        #[test]
        fn plcc_affine_invariance(xs in prop::collection::vec(-100.0f64..100.0, 3..30), ys in prop::collection::vec(-100.0f64..100.0, 30), a in 0.1f64..10.0, b in -50.0f64..50.0) {
            let ys = &ys[..xs.len()];
            if let Ok(r) = plcc(&xs, ys) {
                let t: Vec<f64> = xs.iter().map(|v| a * v + b).collect();
                prop_assert!((plcc(&t, ys).unwrap() - r).abs() < 1e-9);
            }
        }
    }
}
