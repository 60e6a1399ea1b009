//! Synthetic signals with known scaling, and correlation-destroying
//! surrogates. All generators are deterministic in their seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurrogateError {
    #[error("cascade weight must lie in (0.5, 1), got {0}")]
    InvalidWeight(f64),
    #[error("cascade depth must be between 1 and 30, got {0}")]
    InvalidDepth(u32),
    #[error("target Hurst exponent must lie in (0, 1), got {0}")]
    InvalidHurst(f64),
    #[error("length must be a power of two, got {0}")]
    NotPowerOfTwo(usize),
    #[error("length must be at least 1")]
    Empty,
}

/// Binomial multiplicative cascade: `2^depth` cells obtained by splitting
/// every cell's mass into fractions `weight` and `1 - weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeSpec {
    weight: f64,
    depth: u32,
}

impl CascadeSpec {
    pub fn new(weight: f64, depth: u32) -> Result<Self, SurrogateError> {
        if !(weight > 0.5 && weight < 1.0) {
            return Err(SurrogateError::InvalidWeight(weight));
        }
        if !(1..=30).contains(&depth) {
            return Err(SurrogateError::InvalidDepth(depth));
        }
        Ok(Self { weight, depth })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        1 << self.depth
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2)`, continuous at `q = 0`.
    pub fn hurst_exponent(&self, q: f64) -> f64 {
        let (a, b) = (self.weight, 1.0 - self.weight);
        if q == 0.0 {
            // limit of the expression above
            return -(a.ln() + b.ln()) / (2.0 * std::f64::consts::LN_2);
        }
        1.0 / q - (a.powf(q) + b.powf(q)).ln() / (q * std::f64::consts::LN_2)
    }

    /// `alpha_max - alpha_min` over all q: `ln(a / (1-a)) / ln 2`.
    pub fn spectrum_width(&self) -> f64 {
        let (a, b) = (self.weight, 1.0 - self.weight);
        ((1.0 / b).ln() - (1.0 / a).ln()) / std::f64::consts::LN_2
    }
}

pub fn binomial_cascade(spec: CascadeSpec, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    let (a, b) = (spec.weight, 1.0 - spec.weight);
    let mut cells = vec![1.0f64];
    for _ in 0..spec.depth {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for v in cells {
            if rng.random::<bool>() {
                next.extend([v * a, v * b]);
            } else {
                next.extend([v * b, v * a]);
            }
        }
        cells = next;
    }
    cells
}

/// I.i.d. standard Gaussian values.
pub fn white_noise(n: usize, seed: u64) -> Result<Vec<f64>, SurrogateError> {
    if n == 0 {
        return Err(SurrogateError::Empty);
    }
    let mut rng = seeded(seed);
    Ok((0..n).map(|_| rng.sample(StandardNormal)).collect())
}

/// Gaussian noise whose power spectrum falls off as `f^-(2H - 1)`, built by
/// Fourier synthesis with random Gaussian coefficients. The output has zero
/// mean and unit variance; its DFA exponent approaches `target_hurst`.
pub fn persistent_noise(
    n: usize,
    target_hurst: f64,
    seed: u64,
) -> Result<Vec<f64>, SurrogateError> {
    if !(target_hurst > 0.0 && target_hurst < 1.0) {
        return Err(SurrogateError::InvalidHurst(target_hurst));
    }
    if n == 0 {
        return Err(SurrogateError::Empty);
    }
    if !n.is_power_of_two() || n < 2 {
        return Err(SurrogateError::NotPowerOfTwo(n));
    }
    let mut rng = seeded(seed);
    let exponent = (2.0 * target_hurst - 1.0) / 2.0;
    let half = n / 2;

    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    for k in 1..=half {
        let amplitude = (k as f64).powf(-exponent);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        if k == half {
            spectrum[k] = Complex::new(amplitude * re, 0.0);
        } else {
            let c = Complex::new(re, im) * (amplitude / std::f64::consts::SQRT_2);
            spectrum[k] = c;
            spectrum[n - k] = c.conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);

    let values: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Uniform random permutation (Fisher-Yates).
pub fn shuffle<T: Clone>(series: &[T], seed: u64) -> Vec<T> {
    let mut out = series.to_vec();
    out.shuffle(&mut seeded(seed));
    out
}
