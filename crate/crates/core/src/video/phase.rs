//! Phase congruency from a log-Gabor filter bank (Kovesi's formulation as used by FSIM).

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::Real;

use super::plane::Plane;

const NSCALE: usize = 4;
const NORIENT: usize = 4;
const MIN_WAVELENGTH: f64 = 6.0;
const MULT: f64 = 2.0;
const SIGMA_ON_F: f64 = 0.55;
const D_THETA_ON_SIGMA: f64 = 1.2;
const K: f64 = 2.0;
const EPSILON: f64 = 1e-4;
const LOWPASS_CUTOFF: f64 = 0.45;
const LOWPASS_ORDER: i32 = 15;

/// Frequency of FFT bin `k` on an axis of length `n`, in cycles per sample
/// (odd lengths use the `n - 1` normalisation of the reference code).
fn axis_frequency(k: usize, n: usize) -> f64 {
    let d = if n % 2 == 0 { n } else { n - 1 }.max(1) as f64;
    let signed = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
    signed / d
}

struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            col_fwd: planner.plan_fft_forward(rows),
            row_inv: planner.plan_fft_inverse(cols),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    fn run(&self, data: &mut [Complex<f64>], inverse: bool) {
        let (row_fft, col_fft) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };
        row_fft.process(data);
        let mut column = vec![Complex::default(); self.rows];
        for c in 0..self.cols {
            for r in 0..self.rows {
                column[r] = data[r * self.cols + c];
            }
            col_fft.process(&mut column);
            for r in 0..self.rows {
                data[r * self.cols + c] = column[r];
            }
        }
        if inverse {
            let norm = 1.0 / (self.rows * self.cols) as f64;
            for v in data.iter_mut() {
                *v *= norm;
            }
        }
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    let n = xs.len();
    let mid = n / 2;
    let (_, &mut hi, _) = xs.select_nth_unstable_by(mid, f64::total_cmp);
    if n % 2 == 1 {
        hi
    } else {
        let lo = xs[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo + hi) / 2.0
    }
}

/// Phase congruency map of a plane, values in `[0, 1]`.
///
/// Filtering is done in the frequency domain, so the image is treated as periodic.
pub fn phase_congruency<T: Real>(image: &Plane<T>) -> Plane<T> {
    let (rows, cols) = (image.height, image.width);
    let n = rows * cols;
    let fft = Fft2::new(rows, cols);
    let mut spectrum: Vec<Complex<f64>> = image.data.iter().map(|v| Complex::new(v.to_f64_lossy(), 0.0)).collect();
    fft.run(&mut spectrum, false);

    let mut radius = vec![0.0; n];
    let mut sin_t = vec![0.0; n];
    let mut cos_t = vec![0.0; n];
    let mut lowpass = vec![0.0; n];
    for r in 0..rows {
        let fy = axis_frequency(r, rows);
        for c in 0..cols {
            let fx = axis_frequency(c, cols);
            let i = r * cols + c;
            let rad = (fx * fx + fy * fy).sqrt();
            lowpass[i] = 1.0 / (1.0 + (rad / LOWPASS_CUTOFF).powi(2 * LOWPASS_ORDER));
            radius[i] = rad;
            let theta = (-fy).atan2(fx);
            sin_t[i] = theta.sin();
            cos_t[i] = theta.cos();
        }
    }
    radius[0] = 1.0;

    let log_sigma = 2.0 * SIGMA_ON_F.ln().powi(2);
    let log_gabor: Vec<Vec<f64>> = (0..NSCALE)
        .map(|s| {
            let fo = 1.0 / (MIN_WAVELENGTH * MULT.powi(s as i32));
            let mut g: Vec<f64> = radius
                .iter()
                .zip(&lowpass)
                .map(|(&rad, &lp)| (-(rad / fo).ln().powi(2) / log_sigma).exp() * lp)
                .collect();
            g[0] = 0.0;
            g
        })
        .collect();

    let theta_sigma = std::f64::consts::PI / NORIENT as f64 / D_THETA_ON_SIGMA;
    let mut energy_all = vec![0.0; n];
    let mut an_all = vec![0.0; n];
    let sqrt_n = (n as f64).sqrt();

    for o in 0..NORIENT {
        let angle = o as f64 * std::f64::consts::PI / NORIENT as f64;
        let (sa, ca) = angle.sin_cos();
        let spread: Vec<f64> = (0..n)
            .map(|i| {
                let ds = sin_t[i] * ca - cos_t[i] * sa;
                let dc = cos_t[i] * ca + sin_t[i] * sa;
                let dtheta = ds.atan2(dc).abs();
                (-dtheta * dtheta / (2.0 * theta_sigma * theta_sigma)).exp()
            })
            .collect();

        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        let mut sum_an = vec![0.0; n];
        let mut eo: Vec<Vec<Complex<f64>>> = Vec::with_capacity(NSCALE);
        let mut spatial: Vec<Vec<f64>> = Vec::with_capacity(NSCALE);
        let mut em_n = 0.0;
        for (s, lg) in log_gabor.iter().enumerate() {
            let filter: Vec<f64> = lg.iter().zip(&spread).map(|(a, b)| a * b).collect();
            if s == 0 {
                em_n = filter.iter().map(|f| f * f).sum();
            }
            let mut f: Vec<Complex<f64>> = filter.iter().map(|&v| Complex::new(v, 0.0)).collect();
            fft.run(&mut f, true);
            spatial.push(f.iter().map(|c| c.re * sqrt_n).collect());

            let mut resp: Vec<Complex<f64>> = spectrum.iter().zip(&filter).map(|(x, &h)| x * h).collect();
            fft.run(&mut resp, true);
            for i in 0..n {
                sum_an[i] += resp[i].norm();
                sum_e[i] += resp[i].re;
                sum_o[i] += resp[i].im;
            }
            eo.push(resp);
        }

        let mut energy = vec![0.0; n];
        for i in 0..n {
            let x_energy = (sum_e[i] * sum_e[i] + sum_o[i] * sum_o[i]).sqrt() + EPSILON;
            let mean_e = sum_e[i] / x_energy;
            let mean_o = sum_o[i] / x_energy;
            for resp in &eo {
                let (e, od) = (resp[i].re, resp[i].im);
                energy[i] += e * mean_e + od * mean_o - (e * mean_o - od * mean_e).abs();
            }
        }

        let median_e2n = median(eo[0].iter().map(|c| c.norm_sqr()).collect());
        let mean_e2n = -median_e2n / 0.5f64.ln();
        let noise_power = if em_n > 0.0 { mean_e2n / em_n } else { 0.0 };
        let mut sum_an2 = 0.0;
        let mut sum_aiaj = 0.0;
        for i in 0..n {
            for si in 0..NSCALE {
                sum_an2 += spatial[si][i] * spatial[si][i];
                for sj in si + 1..NSCALE {
                    sum_aiaj += spatial[si][i] * spatial[sj][i];
                }
            }
        }
        let est_noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_aiaj;
        let tau = (est_noise_energy2 / 2.0).max(0.0).sqrt();
        let est_noise_energy = tau * (std::f64::consts::PI / 2.0).sqrt();
        let est_noise_sigma = ((2.0 - std::f64::consts::PI / 2.0) * tau * tau).sqrt();
        let threshold = (est_noise_energy + K * est_noise_sigma) / 1.7;

        for i in 0..n {
            energy_all[i] += (energy[i] - threshold).max(0.0);
            an_all[i] += sum_an[i];
        }
    }

    let data = energy_all
        .iter()
        .zip(&an_all)
        .map(|(&e, &a)| T::lit(if a > 0.0 { e / a } else { 0.0 }))
        .collect();
    Plane::new(cols, rows, data)
}
