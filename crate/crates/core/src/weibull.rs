//! Discrete Weibull distribution on the positive integers.
//!
//! With survival function `S(k) = (1-p)^(k^beta)` (so `S(0) = 1`), the mass
//! function is `f(k) = S(k-1) - S(k)` for `k >= 1` and the hazard is
//! `lambda(k) = f(k) / S(k-1) = 1 - (1-p)^(k^beta - (k-1)^beta)`. In
//! particular `lambda(1) = p`, and `beta = 1` recovers the geometric
//! distribution with constant hazard `p`.
//!
//! All quantities are evaluated through `ln(1-p)` and `expm1`, which keeps
//! them accurate for small `p`, large `k`, and `beta` near 1.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::{self, SimplexOptions};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeibullError {
    #[error("p must lie in (0, 1), got {0}")]
    InvalidP(f64),
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("k must be at least 1, got {0}")]
    InvalidK(u64),
    #[error("no intervals")]
    NoIntervals,
    #[error("degenerate sample: all {n} values equal {value}")]
    DegenerateSample { n: usize, value: u64 },
    #[error("zero-length interval in sample; the distribution is supported on k >= 1")]
    ZeroInterval,
    #[error("sample size must be at least 1")]
    EmptyDraw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullParams {
    p: f64,
    beta: f64,
    ln_q: f64,
}

impl WeibullParams {
    pub fn new(p: f64, beta: f64) -> Result<Self, WeibullError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(WeibullError::InvalidP(p));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(WeibullError::InvalidBeta(beta));
        }
        Ok(Self {
            p,
            beta,
            ln_q: (-p).ln_1p(),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln S(k) = k^beta * ln(1-p)`.
    pub fn ln_survival(&self, k: u64) -> f64 {
        if k == 0 {
            0.0
        } else {
            (k as f64).powf(self.beta) * self.ln_q
        }
    }

    pub fn survival(&self, k: u64) -> f64 {
        self.ln_survival(k).exp()
    }

    pub fn cdf(&self, k: u64) -> f64 {
        -self.ln_survival(k).exp_m1()
    }

    pub fn pmf(&self, k: u64) -> Result<f64, WeibullError> {
        Ok(self.ln_pmf(k)?.exp())
    }

    /// `ln f(k) = ln S(k-1) + ln(1 - exp(ln S(k) - ln S(k-1)))`.
    pub fn ln_pmf(&self, k: u64) -> Result<f64, WeibullError> {
        check_k(k)?;
        Ok(ln_pmf_raw(k, self.beta, self.ln_q))
    }

    pub fn hazard(&self, k: u64) -> Result<f64, WeibullError> {
        check_k(k)?;
        Ok(-(power_step(k, self.beta) * self.ln_q).exp_m1())
    }

    /// Draws `n` values by inversion of the survival function: the
    /// smallest `k` with `S(k) < U` for `U` uniform on (0, 1).
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<u64>, WeibullError> {
        if n == 0 {
            return Err(WeibullError::EmptyDraw);
        }
        let mut rng = seeded(seed);
        let inv_beta = 1.0 / self.beta;
        let draws = (0..n)
            .map(|_| {
                let u: f64 = loop {
                    let u = rng.random::<f64>();
                    if u > 0.0 {
                        break u;
                    }
                };
                // S(k) < u  <=>  k^beta > ln(u) / ln(1-p)
                let threshold = u.ln() / self.ln_q;
                // f64::min also maps NaN to the cap
                let k = threshold.powf(inv_beta).floor().min(9.0e15);
                let mut k = k as u64 + 1;
                while k > 1 && ((k - 1) as f64).powf(self.beta) > threshold {
                    k -= 1;
                }
                while (k as f64).powf(self.beta) <= threshold {
                    k += 1;
                }
                k
            })
            .collect();
        Ok(draws)
    }
}

fn check_k(k: u64) -> Result<(), WeibullError> {
    if k == 0 {
        Err(WeibullError::InvalidK(k))
    } else {
        Ok(())
    }
}

/// `k^beta - (k-1)^beta`, computed without cancellation.
fn power_step(k: u64, beta: f64) -> f64 {
    if k == 1 {
        return 1.0;
    }
    let prev = (k - 1) as f64;
    prev.powf(beta) * (beta * (1.0 / prev).ln_1p()).exp_m1()
}

fn ln_pmf_raw(k: u64, beta: f64, ln_q: f64) -> f64 {
    let ln_prev = if k == 1 {
        0.0
    } else {
        ((k - 1) as f64).powf(beta) * ln_q
    };
    // 1 - S(k)/S(k-1) = -expm1(step * ln q)
    ln_prev + (-(power_step(k, beta) * ln_q).exp_m1()).ln()
}

pub type Histogram = BTreeMap<u64, u64>;

pub fn histogram(values: &[u64]) -> Histogram {
    let mut h = Histogram::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardCurve {
    /// `(k, lambda(k))` for `k = 1..=support_max`.
    pub values: Vec<(u64, f64)>,
    /// Number of observations `>= k`, aligned with `values`.
    pub at_risk: Vec<u64>,
    pub support_max: u64,
}

impl HazardCurve {
    pub fn get(&self, k: u64) -> Option<f64> {
        if k == 0 || k > self.support_max {
            None
        } else {
            Some(self.values[(k - 1) as usize].1)
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,hazard\n");
        for &(k, h) in &self.values {
            out.push_str(&format!("{k},{}\n", crate::export::float(h)));
        }
        out
    }
}

/// Life-table hazard estimate: events at `k` over the number still at risk.
pub fn empirical_hazard(values: &[u64]) -> Result<HazardCurve, WeibullError> {
    if values.is_empty() {
        return Err(WeibullError::NoIntervals);
    }
    if values.contains(&0) {
        return Err(WeibullError::ZeroInterval);
    }
    let hist = histogram(values);
    let support_max = *hist.keys().next_back().expect("non-empty");
    let mut at_risk_now = values.len() as u64;
    let mut out = Vec::with_capacity(support_max as usize);
    let mut at_risk = Vec::with_capacity(support_max as usize);
    for k in 1..=support_max {
        let events = hist.get(&k).copied().unwrap_or(0);
        out.push((k, events as f64 / at_risk_now as f64));
        at_risk.push(at_risk_now);
        at_risk_now -= events;
    }
    Ok(HazardCurve {
        values: out,
        at_risk,
        support_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeibullFit {
    pub params: WeibullParams,
    pub log_likelihood: f64,
    pub n: usize,
    pub converged: bool,
    pub evaluations: usize,
    pub histogram: Histogram,
}

/// Serialized form of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub p: f64,
    pub beta: f64,
    pub log_likelihood: f64,
    pub n: usize,
    pub converged: bool,
}

impl WeibullFit {
    pub fn summary(&self) -> FitSummary {
        FitSummary {
            p: self.params.p,
            beta: self.params.beta,
            log_likelihood: self.log_likelihood,
            n: self.n,
            converged: self.converged,
        }
    }
}

/// Log-likelihood of a histogram under the given parameters.
pub fn log_likelihood(hist: &Histogram, params: &WeibullParams) -> f64 {
    hist.iter()
        .map(|(&k, &n)| n as f64 * ln_pmf_raw(k, params.beta, params.ln_q))
        .sum()
}

/// Maximum-likelihood estimate of `(p, beta)`.
///
/// The search runs over `(logit p, ln beta)` with a Nelder-Mead simplex,
/// starting at `p` equal to the share of ones in the sample (clipped to
/// [0.01, 0.99]) and `beta = 1`. The objective is the mean negative
/// log-likelihood, so the tolerance does not scale with sample size. The
/// fit depends on the data only through its histogram.
pub fn fit_mle(values: &[u64]) -> Result<WeibullFit, WeibullError> {
    fit_mle_with(values, SimplexOptions::default())
}

pub fn fit_mle_with(values: &[u64], options: SimplexOptions) -> Result<WeibullFit, WeibullError> {
    if values.is_empty() {
        return Err(WeibullError::NoIntervals);
    }
    if values.contains(&0) {
        return Err(WeibullError::ZeroInterval);
    }
    let hist = histogram(values);
    if hist.len() < 2 {
        return Err(WeibullError::DegenerateSample {
            n: values.len(),
            value: values[0],
        });
    }
    let n = values.len();
    let total = n as f64;
    let ones = hist.get(&1).copied().unwrap_or(0) as f64 / total;
    let p0 = ones.clamp(0.01, 0.99);
    let start = [(p0 / (1.0 - p0)).ln(), 0.0];

    let objective = |x: &[f64]| {
        let beta = x[1].exp();
        // ln(1-p) for p = logistic(x0) is -softplus(x0)
        let ln_q = -softplus(x[0]);
        if !(beta.is_finite() && beta > 0.0 && ln_q < 0.0) {
            return f64::INFINITY;
        }
        let ll: f64 = hist
            .iter()
            .map(|(&k, &c)| c as f64 * ln_pmf_raw(k, beta, ln_q))
            .sum();
        -ll / total
    };
    let min = optimize::minimize(objective, &start, options);

    let p = logistic(min.point[0]);
    let beta = min.point[1].exp();
    let params = WeibullParams::new(p, beta)?;
    let log_likelihood = log_likelihood(&hist, &params);
    Ok(WeibullFit {
        params,
        log_likelihood,
        n,
        converged: min.converged && log_likelihood.is_finite(),
        evaluations: min.evaluations,
        histogram: hist,
    })
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
