//! Epsilon-support vector regression with an RBF kernel, solved by SMO
//! (second-order working set selection, as in LIBSVM).

use serde::{Deserialize, Serialize};

use crate::Real;

use super::FusionError;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SvrConfig<T> {
    pub gamma: T,
    pub c: T,
    pub epsilon: T,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: T,
    /// `None` means `max(10^7, 100 * l)`.
    pub max_iterations: Option<usize>,
}

impl<T: Real> Default for SvrConfig<T> {
    fn default() -> Self {
        Self {
            gamma: T::lit(0.05),
            c: T::lit(1024.0),
            epsilon: T::lit(0.1),
            tolerance: T::lit(1e-3),
            max_iterations: None,
        }
    }
}

impl<T: Real> SvrConfig<T> {
    pub fn validate(&self) -> Result<(), FusionError> {
        let ok = self.gamma > T::zero() && self.c > T::zero() && self.epsilon >= T::zero() && self.tolerance > T::zero();
        if ok {
            Ok(())
        } else {
            Err(FusionError::InvalidConfig(format!(
                "gamma {} and C {} must be positive, epsilon {} non-negative, tolerance {} positive",
                self.gamma, self.c, self.epsilon, self.tolerance
            )))
        }
    }
}

/// Per-dimension min-max map onto `[0, 1]`, fitted on training inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MinMaxScaling<T> {
    pub min: Vec<T>,
    pub max: Vec<T>,
}

impl<T: Real> MinMaxScaling<T> {
    pub fn fit(inputs: &[Vec<T>]) -> Self {
        let dim = inputs.first().map_or(0, Vec::len);
        let mut min = vec![T::infinity(); dim];
        let mut max = vec![T::neg_infinity(); dim];
        for x in inputs {
            for (k, &v) in x.iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Self { min, max }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Scaled copy; constant dimensions map to 0 and everything is clamped to `[0, 1]`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .enumerate()
            .map(|(k, &v)| {
                let span = self.max[k] - self.min[k];
                if span > T::zero() {
                    ((v - self.min[k]) / span).max(T::zero()).min(T::one())
                } else {
                    T::zero()
                }
            })
            .collect()
    }
}

/// Trained regressor: `f(x) = sum_i coef_i exp(-gamma |s(x) - sv_i|^2) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SvrModel<T> {
    pub config: SvrConfig<T>,
    pub scaling: MinMaxScaling<T>,
    /// Support vectors in scaled coordinates.
    pub support_vectors: Vec<Vec<T>>,
    /// `alpha_i - alpha_i*`, bounded by `C` in magnitude.
    pub coefficients: Vec<T>,
    pub bias: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrDiagnostics {
    pub iterations: usize,
    /// Dual objective after each SMO step (index 0 is the starting point).
    pub objective_history: Vec<f64>,
    /// Maximal KKT violation at exit.
    pub kkt_gap: f64,
    pub support_vectors: usize,
    pub bounded_support_vectors: usize,
}

fn rbf<T: Real>(gamma: T, a: &[T], b: &[T]) -> T {
    let d2: T = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl<T: Real> SvrModel<T> {
    pub fn dim(&self) -> usize {
        self.scaling.dim()
    }

    pub fn predict(&self, x: &[T]) -> Result<T, FusionError> {
        if x.len() != self.dim() {
            return Err(FusionError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let s = self.scaling.apply(x);
        let mut acc = T::zero();
        for (sv, &c) in self.support_vectors.iter().zip(&self.coefficients) {
            acc += c * rbf(self.config.gamma, sv, &s);
        }
        Ok(acc + self.bias)
    }

    /// Largest KKT violation over a training set, in target units.
    ///
    /// Points off the support set must lie inside the tube, free support
    /// vectors on its edge; bounded ones may lie anywhere outside.
    pub fn kkt_violation(&self, inputs: &[Vec<T>], targets: &[T]) -> Result<T, FusionError> {
        let eps = self.config.epsilon;
        let mut worst = T::zero();
        for (x, &y) in inputs.iter().zip(targets) {
            let s = self.scaling.apply(x);
            let coef = self
                .support_vectors
                .iter()
                .zip(&self.coefficients)
                .filter(|(sv, _)| **sv == s)
                .map(|(_, &c)| c)
                .sum::<T>();
            let residual = y - self.predict(x)?;
            let v = if coef == T::zero() {
                (residual.abs() - eps).max(T::zero())
            } else if coef.abs() < self.config.c {
                // sign of the coefficient says which tube edge the point sits on
                (residual - eps * coef.signum()).abs()
            } else {
                (eps - residual * coef.signum()).max(T::zero())
            };
            worst = worst.max(v);
        }
        Ok(worst)
    }
}

/// Trains an epsilon-SVR on raw inputs (scaled internally).
pub fn train_svr<T: Real>(
    inputs: &[Vec<T>],
    targets: &[T],
    config: &SvrConfig<T>,
) -> Result<(SvrModel<T>, SvrDiagnostics), FusionError> {
    config.validate()?;
    let l = inputs.len();
    if l < 2 {
        return Err(FusionError::TooFewSamples { n: l, min: 2 });
    }
    if targets.len() != l {
        return Err(FusionError::DimensionMismatch {
            expected: l,
            actual: targets.len(),
        });
    }
    let dim = inputs[0].len();
    if let Some(bad) = inputs.iter().find(|x| x.len() != dim) {
        return Err(FusionError::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    if inputs.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(FusionError::NonFinite);
    }
    let scaling = MinMaxScaling::fit(inputs);
    let x: Vec<Vec<T>> = inputs.iter().map(|v| scaling.apply(v)).collect();
    let kernel: Vec<T> = (0..l * l).map(|k| rbf(config.gamma, &x[k / l], &x[k % l])).collect();

    let n = 2 * l;
    let c = config.c;
    let tau = T::lit(TAU);
    let y = |t: usize| if t < l { T::one() } else { -T::one() };
    let q = |a: usize, b: usize| y(a) * y(b) * kernel[(a % l) * l + (b % l)];
    let qd: Vec<T> = (0..n).map(|t| kernel[(t % l) * l + (t % l)]).collect();
    let p: Vec<T> = (0..n)
        .map(|t| {
            if t < l {
                config.epsilon - targets[t]
            } else {
                config.epsilon + targets[t - l]
            }
        })
        .collect();
    let mut alpha = vec![T::zero(); n];
    let mut grad = p.clone();
    let upper = |a: T| a >= c;
    let lower = |a: T| a <= T::zero();
    let objective = |alpha: &[T], grad: &[T]| -> f64 {
        let half = T::lit(0.5);
        alpha
            .iter()
            .zip(grad)
            .zip(&p)
            .map(|((&a, &g), &pp)| a * (g + pp))
            .sum::<T>()
            .to_f64_lossy()
            * half.to_f64_lossy()
    };

    let max_iter = config.max_iterations.unwrap_or_else(|| (100 * l).max(10_000_000));
    let mut history = vec![objective(&alpha, &grad)];
    let mut iter = 0;
    let mut gap;
    loop {
        // working set: maximal violating i, then j by second-order gain
        let mut gmax = T::neg_infinity();
        let mut gmax_idx = None;
        for t in 0..n {
            if y(t) > T::zero() {
                if !upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    gmax_idx = Some(t);
                }
            } else if !lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                gmax_idx = Some(t);
            }
        }
        let mut gmax2 = T::neg_infinity();
        let mut gmin_idx = None;
        let mut obj_diff_min = T::infinity();
        if let Some(i) = gmax_idx {
            for j in 0..n {
                let qij = q(i, j);
                let (diff, quad) = if y(j) > T::zero() {
                    if lower(alpha[j]) {
                        continue;
                    }
                    gmax2 = gmax2.max(grad[j]);
                    (gmax + grad[j], qd[i] + qd[j] - T::lit(2.0) * y(i) * qij)
                } else {
                    if upper(alpha[j]) {
                        continue;
                    }
                    gmax2 = gmax2.max(-grad[j]);
                    (gmax - grad[j], qd[i] + qd[j] + T::lit(2.0) * y(i) * qij)
                };
                if diff > T::zero() {
                    let quad = if quad > T::zero() { quad } else { tau };
                    let od = -(diff * diff) / quad;
                    if od <= obj_diff_min {
                        gmin_idx = Some(j);
                        obj_diff_min = od;
                    }
                }
            }
        }
        gap = gmax + gmax2;
        let (Some(i), Some(j)) = (gmax_idx, gmin_idx) else {
            break;
        };
        if gap < config.tolerance {
            break;
        }
        if iter >= max_iter {
            return Err(FusionError::NotConverged {
                iterations: iter,
                kkt_gap: gap.to_f64_lossy(),
            });
        }
        iter += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        if y(i) != y(j) {
            let mut quad = qd[i] + qd[j] + T::lit(2.0) * qij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > T::zero() {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = diff;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = -diff;
            }
            if diff > T::zero() {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = qd[i] + qd[j] - T::lit(2.0) * qij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < T::zero() {
                alpha[j] = T::zero();
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(i, t) * di + q(j, t) * dj;
        }
        history.push(objective(&alpha, &grad));
    }

    // threshold from free variables, else midpoint of the feasible interval
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    let (mut free_sum, mut free_n) = (T::zero(), 0usize);
    for t in 0..n {
        let yg = y(t) * grad[t];
        if upper(alpha[t]) {
            if y(t) < T::zero() {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y(t) > T::zero() {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_n += 1;
        }
    }
    let rho = if free_n > 0 {
        free_sum / T::from_count(free_n)
    } else {
        (ub + lb) / T::lit(2.0)
    };

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    let mut bounded = 0;
    for k in 0..l {
        let coef = alpha[k] - alpha[k + l];
        if coef != T::zero() {
            if coef.abs() >= c {
                bounded += 1;
            }
            support_vectors.push(x[k].clone());
            coefficients.push(coef);
        }
    }
    let diagnostics = SvrDiagnostics {
        iterations: iter,
        objective_history: history,
        kkt_gap: gap.to_f64_lossy(),
        support_vectors: support_vectors.len(),
        bounded_support_vectors: bounded,
    };
    Ok((
        SvrModel {
            config: *config,
            scaling,
            support_vectors,
            coefficients,
            bias: -rho,
        },
        diagnostics,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_d(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn interpolates_a_line() {
        let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let cfg = SvrConfig {
            epsilon: 0.01,
            ..SvrConfig::default()
        };
        let (m, d) = train_svr(&one_d(&xs), &ys, &cfg).unwrap();
        for (&x, &y) in xs.iter().zip(&ys) {
            let p = m.predict(&[x]).unwrap();
            assert!((p - y).abs() < 0.05, "x={x}: {p} vs {y}");
        }
        assert!(d.kkt_gap < 1e-3);
        for w in d.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn flat_targets_give_flat_function() {
        let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let ys = vec![3.5; 8];
        let (m, _) = train_svr(&xs, &ys, &SvrConfig::default()).unwrap();
        assert!(m.support_vectors.is_empty());
        for probe in [[0.0, 0.0], [3.3, 10.0], [100.0, -4.0]] {
            assert!((m.predict(&probe).unwrap() - 3.5).abs() <= 0.1);
        }
    }

    #[test]
    fn conflicting_duplicates() {
        let xs = one_d(&[0.0, 0.0, 1.0]);
        let ys = [1.0, 3.0, 2.0];
        let (m, _) = train_svr(&xs, &ys, &SvrConfig::default()).unwrap();
        let p = m.predict(&[0.0]).unwrap();
        assert!((1.0..=3.0).contains(&p), "{p}");
    }

    #[test]
    fn kkt_and_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<Vec<f64>> = (0..60).map(|_| vec![rng.random_range(0.0..10.0), rng.random_range(-1.0..1.0)]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x[0] / 2.0).sin() + x[1] * x[1] + rng.random_range(-0.1..0.1)).collect();
        let (m, _) = train_svr(&xs, &ys, &SvrConfig::default()).unwrap();
        assert!(m.kkt_violation(&xs, &ys).unwrap() <= 1e-3);
        assert!(m.coefficients.iter().all(|c| c.abs() <= 1024.0));
        for x in &xs {
            let s = m.scaling.apply(x);
            let mut oracle = 0.0;
            for (sv, c) in m.support_vectors.iter().zip(&m.coefficients) {
                let d2 = (s[0] - sv[0]).powi(2) + (s[1] - sv[1]).powi(2);
                oracle += c * (-0.05 * d2).exp();
            }
            oracle += m.bias;
            assert!((m.predict(x).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_model_predicts_bias() {
        let m = SvrModel {
            config: SvrConfig::default(),
            scaling: MinMaxScaling { min: vec![0.0], max: vec![1.0] },
            support_vectors: vec![],
            coefficients: vec![],
            bias: 0.42,
        };
        assert_eq!(m.predict(&[0.7]).unwrap(), 0.42);
        assert!(matches!(m.predict(&[0.7, 1.0]), Err(FusionError::DimensionMismatch { .. })));
    }

    #[test]
    fn iteration_cap_reports_gap() {
        let xs = one_d(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        let ys = [0.0, 1.0, 0.0, 1.0, 0.0];
        let cfg = SvrConfig {
            max_iterations: Some(1),
            epsilon: 0.0,
            ..SvrConfig::default()
        };
        match train_svr(&xs, &ys, &cfg) {
            Err(FusionError::NotConverged { iterations: 1, kkt_gap }) => assert!(kkt_gap > 1e-3),
            other => panic!("{other:?}"),
        }
    }
}
