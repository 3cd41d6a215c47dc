use crate::Real;

/// Zero crossings of the sinc kept on each side of the centre tap.
const ZERO_CROSSINGS: f64 = 24.0;
/// Passband edge as a fraction of the lower sample rate.
const CUTOFF: f64 = 0.44;
/// Kaiser shape; about 85 dB stopband attenuation.
const KAISER_BETA: f64 = 8.6;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let q = x * x / 4.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Rational-ratio polyphase resampling with a Kaiser-windowed sinc.
///
/// Output sample `n` sits at input time `n * from / to`; every phase is
/// normalized to unit DC gain.
pub fn resample<T: Real>(x: &[T], from: u32, to: u32) -> Vec<T> {
    if from == to || x.is_empty() {
        return x.to_vec();
    }
    let g = gcd(from as u64, to as u64);
    let (up, down) = (to as u64 / g, from as u64 / g);
    // cutoff in cycles per input sample
    let fc = CUTOFF * (from.min(to) as f64) / from as f64;
    let half = (ZERO_CROSSINGS / (2.0 * fc)).ceil() as i64;
    let i0_beta = bessel_i0(KAISER_BETA);

    let phases: Vec<Vec<T>> = (0..up)
        .map(|p| {
            let frac = p as f64 / up as f64;
            let mut taps: Vec<f64> = (-half..=half)
                .map(|k| {
                    let t = k as f64 - frac;
                    let r = t / (half as f64 + 1.0);
                    if r.abs() >= 1.0 {
                        return 0.0;
                    }
                    let arg = 2.0 * fc * t;
                    let sinc = if arg == 0.0 {
                        1.0
                    } else {
                        (std::f64::consts::PI * arg).sin() / (std::f64::consts::PI * arg)
                    };
                    2.0 * fc * sinc * bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / i0_beta
                })
                .collect();
            let sum: f64 = taps.iter().sum();
            taps.iter_mut().for_each(|t| *t /= sum);
            taps.into_iter().map(T::lit).collect()
        })
        .collect();

    let out_len = (x.len() as u64 * up).div_ceil(down) as usize;
    let n = x.len() as i64;
    (0..out_len)
        .map(|m| {
            let pos = m as u64 * down;
            let base = (pos / up) as i64;
            let taps = &phases[(pos % up) as usize];
            let mut acc = T::zero();
            for (j, &h) in taps.iter().enumerate() {
                let idx = base + (j as i64 - half);
                if (0..n).contains(&idx) {
                    acc += h * x[idx as usize];
                }
            }
            acc
        })
        .collect()
}
