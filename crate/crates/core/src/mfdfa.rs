//! Multifractal detrended fluctuation analysis.
//!
//! The series is mean-centred and integrated into a profile. For every scale
//! `s` the profile is cut into `M_s = floor(T / s)` windows from the front
//! and another `M_s` from the back. Each window is detrended with a
//! least-squares polynomial of order `m` and the mean squared residual
//! `f2(v, s)` recorded. The order-`q` fluctuation function is the
//! generalized mean
//!
//! ```text
//! F_q(s) = { 1/(2 M_s) * sum_v f2(v, s)^(q/2) }^(1/q)      q != 0
//! F_0(s) = exp{ 1/(4 M_s) * sum_v ln f2(v, s) }
//! ```
//!
//! and `h(q)` is the slope of `ln F_q(s)` against `ln s`. The singularity
//! spectrum follows from the Legendre transform `alpha = h + q h'(q)`,
//! `f(alpha) = q (alpha - h) + 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::export::float;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfdfaError {
    #[error("empty series")]
    EmptySeries,
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("zero fluctuation: {0}")]
    ZeroFluctuation(String),
    #[error("underdetermined fit: window of {s} points for a polynomial of order {order}")]
    Underdetermined { s: usize, order: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("series of length {length} is too short; at least {required} values are needed")]
    TooShort { length: usize, required: usize },
    #[error("q grid too sparse: {0} points, at least 5 are needed")]
    QGridTooSparse(usize),
}

/// Parameters of the analysis. `None` scale bounds are resolved per series:
/// the lower bound to `max(10, longest constant run + 1, order + 2)` and the
/// upper bound to `floor(T / 5)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfdfaConfig {
    pub detrend_order: usize,
    pub q_grid: Vec<f64>,
    pub s_min: Option<usize>,
    pub s_max: Option<usize>,
    /// Number of log-spaced scales before rounding and de-duplication.
    pub scale_count: usize,
    /// Explicit scale list; overrides the bounds when present.
    pub scales: Option<Vec<usize>>,
}

impl Default for MfdfaConfig {
    fn default() -> Self {
        Self {
            detrend_order: 2,
            q_grid: q_grid(-4.0, 4.0, 0.25),
            s_min: None,
            s_max: None,
            scale_count: 25,
            scales: None,
        }
    }
}

/// Evenly spaced q values from `min` to `max` inclusive. Values within a
/// rounding error of zero are snapped to exactly zero.
pub fn q_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0 && max >= min) {
        return Vec::new();
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let q = min + i as f64 * step;
            if q.abs() < step * 1e-9 {
                0.0
            } else {
                q
            }
        })
        .collect()
}

impl MfdfaConfig {
    pub fn validate(&self) -> Result<(), MfdfaError> {
        let bad = |msg: String| Err(MfdfaError::InvalidConfig(msg));
        if self.detrend_order < 1 {
            return bad("detrend order must be at least 1".into());
        }
        if self.q_grid.is_empty() {
            return bad("empty q grid".into());
        }
        if self.q_grid.iter().any(|q| !q.is_finite()) {
            return bad("q grid contains a non-finite value".into());
        }
        if self.q_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("q grid must be strictly increasing".into());
        }
        let min_window = self.detrend_order + 2;
        if let Some(s) = self.s_min {
            if s < min_window.max(2) {
                return bad(format!("s_min {s} is below order + 2 = {min_window}"));
            }
        }
        if let (Some(lo), Some(hi)) = (self.s_min, self.s_max) {
            if lo >= hi {
                return bad(format!("s_min {lo} must be below s_max {hi}"));
            }
        }
        if self.scales.is_none() && self.scale_count < 2 {
            return bad("scale_count must be at least 2".into());
        }
        if let Some(scales) = &self.scales {
            if scales.windows(2).any(|w| w[0] >= w[1]) {
                return bad("scales must be strictly increasing".into());
            }
            if let Some(&s) = scales.iter().find(|&&s| s < min_window.max(2)) {
                return bad(format!("scale {s} is below order + 2 = {min_window}"));
            }
        }
        Ok(())
    }

    /// Scale grid used for `series`.
    pub fn resolve_scales(&self, series: &[f64]) -> Result<Vec<usize>, MfdfaError> {
        self.validate()?;
        let length = series.len();
        let min_window = self.detrend_order + 2;
        if let Some(scales) = &self.scales {
            if let Some(&s) = scales.last() {
                if s > length {
                    return Err(MfdfaError::TooShort {
                        length,
                        required: s,
                    });
                }
            }
            if scales.len() < 3 {
                return Err(MfdfaError::InvalidConfig(
                    "at least 3 scales are needed for the scaling fit".into(),
                ));
            }
            return Ok(scales.clone());
        }

        let s_min = self
            .s_min
            .unwrap_or_else(|| 10.max(longest_constant_run(series) + 1).max(min_window));
        if length < 5 * s_min {
            return Err(MfdfaError::TooShort {
                length,
                required: 5 * s_min,
            });
        }
        let s_max = self.s_max.unwrap_or(length / 5).min(length);
        if s_max <= s_min {
            return Err(MfdfaError::TooShort {
                length,
                required: 5 * (s_min + 2),
            });
        }

        let (lo, hi) = ((s_min as f64).ln(), (s_max as f64).ln());
        let n = self.scale_count;
        let mut scales: Vec<usize> = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                ((lo + t * (hi - lo)).exp().round() as usize).clamp(s_min, s_max)
            })
            .collect();
        scales.dedup();
        if scales.len() < 3 {
            return Err(MfdfaError::TooShort {
                length,
                required: 5 * (s_min + 2),
            });
        }
        Ok(scales)
    }
}

/// Length of the longest run of identical consecutive values.
pub fn longest_constant_run(series: &[f64]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (i, x) in series.iter().enumerate() {
        if i > 0 && *x == series[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        best = best.max(run);
    }
    best
}

/// Cumulative sum `x_i = u_1 + ... + u_i`.
pub fn profile(series: &[f64]) -> Result<Vec<f64>, MfdfaError> {
    if series.is_empty() {
        return Err(MfdfaError::EmptySeries);
    }
    let mut acc = 0.0;
    Ok(series
        .iter()
        .map(|u| {
            acc += u;
            acc
        })
        .collect())
}

/// Series minus its arithmetic mean.
pub fn centered(series: &[f64]) -> Vec<f64> {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    series.iter().map(|u| u - mean).collect()
}

/// Least-squares polynomial detrending over a fixed window length, using an
/// orthonormal basis of the polynomial space on the window's index grid.
#[derive(Debug, Clone)]
pub struct Detrender {
    len: usize,
    basis: Vec<Vec<f64>>,
}

impl Detrender {
    pub fn new(len: usize, order: usize) -> Result<Self, MfdfaError> {
        if len < order + 2 {
            return Err(MfdfaError::Underdetermined { s: len, order });
        }
        let mid = (len as f64 - 1.0) / 2.0;
        let scale = len as f64;
        let t: Vec<f64> = (0..len).map(|i| (i as f64 - mid) / scale).collect();

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for degree in 0..=order {
            let mut v: Vec<f64> = t.iter().map(|x| x.powi(degree as i32)).collect();
            // Gram-Schmidt, applied twice for orthogonality at full precision
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= c * bi;
                    }
                }
            }
            let norm = dot(&v, &v).sqrt();
            for vi in &mut v {
                *vi /= norm;
            }
            basis.push(v);
        }
        Ok(Self { len, basis })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Mean squared residual of `window` after removing its least-squares
    /// polynomial. `scratch` is reused between calls.
    pub fn variance(&self, window: &[f64], scratch: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(window.len(), self.len);
        let origin = window[0];
        scratch.clear();
        scratch.extend(window.iter().map(|x| x - origin));
        for b in &self.basis {
            let c = dot(b, scratch);
            for (r, bi) in scratch.iter_mut().zip(b) {
                *r -= c * bi;
            }
        }
        dot(scratch, scratch) / self.len as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Variance of `window` around its least-squares polynomial of order `order`.
pub fn detrended_variance(window: &[f64], order: usize) -> Result<f64, MfdfaError> {
    let d = Detrender::new(window.len(), order)?;
    Ok(d.variance(window, &mut Vec::with_capacity(window.len())))
}

/// Detrended variances of the `2 * floor(T / s)` windows, front windows
/// first, then back windows from the end of the profile inwards.
pub fn window_variances(profile: &[f64], detrender: &Detrender) -> Vec<f64> {
    let s = detrender.len();
    let segments = profile.len() / s;
    let total = profile.len();
    let mut scratch = Vec::with_capacity(s);
    let front = (0..segments).map(|v| &profile[v * s..(v + 1) * s]);
    let back = (0..segments).map(|v| &profile[total - (v + 1) * s..total - v * s]);
    front
        .chain(back)
        .map(|w| detrender.variance(w, &mut scratch))
        .collect()
}

/// Ordinary least squares of `ln F_q(s)` on `ln s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub q: f64,
    pub h: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn scaling_fit(q: f64, ln_s: &[f64], ln_f: &[f64]) -> ScalingFit {
    let n = ln_s.len() as f64;
    let mx = ln_s.iter().sum::<f64>() / n;
    let my = ln_f.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in ln_s.iter().zip(ln_f) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let h = sxy / sxx;
    let intercept = my - h * mx;
    let sse: f64 = ln_s
        .iter()
        .zip(ln_f)
        .map(|(x, y)| (y - intercept - h * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    ScalingFit {
        q,
        h,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSurface {
    pub q: Vec<f64>,
    pub scales: Vec<usize>,
    /// `M_s` for each scale; `2 * M_s` windows are formed.
    pub segments: Vec<usize>,
    /// Windows with numerically zero variance at each scale, left out of
    /// the `q <= 0` moments.
    pub excluded_windows: Vec<usize>,
    /// `F_q(s)` indexed `[q][scale]`.
    pub fluctuation: Vec<Vec<f64>>,
    pub exponents: Vec<ScalingFit>,
    /// Fit at `q = 2`.
    pub hurst: ScalingFit,
    pub length: usize,
    pub detrend_order: usize,
}

/// JSON summary of a surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub length: usize,
    pub detrend_order: usize,
    pub scales: Vec<usize>,
    pub hurst: f64,
    pub hurst_r_squared: f64,
    pub exponents: Vec<ScalingFit>,
    pub excluded_windows: usize,
}

impl FluctuationSurface {
    pub fn h(&self) -> Vec<f64> {
        self.exponents.iter().map(|f| f.h).collect()
    }

    /// Number of windows entering the order-`q` moment at scale index `si`.
    pub fn windows_used(&self, q: f64, si: usize) -> usize {
        let all = 2 * self.segments[si];
        if q <= 0.0 {
            all - self.excluded_windows[si]
        } else {
            all
        }
    }

    pub fn summary(&self) -> SurfaceSummary {
        SurfaceSummary {
            length: self.length,
            detrend_order: self.detrend_order,
            scales: self.scales.clone(),
            hurst: self.hurst.h,
            hurst_r_squared: self.hurst.r_squared,
            exponents: self.exponents.clone(),
            excluded_windows: self.excluded_windows.iter().sum(),
        }
    }

    /// Long-format CSV with columns `q,s,F`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,s,F\n");
        for (qi, q) in self.q.iter().enumerate() {
            for (si, s) in self.scales.iter().enumerate() {
                out.push_str(&format!(
                    "{},{s},{}\n",
                    float(*q),
                    float(self.fluctuation[qi][si])
                ));
            }
        }
        out
    }
}

struct ScaleMoments {
    segments: usize,
    excluded: usize,
    ln_f: Vec<f64>,
    ln_f2: f64,
}

fn moments(variances: &[f64], q_grid: &[f64]) -> Result<(usize, Vec<f64>, f64), MfdfaError> {
    let peak = variances.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(MfdfaError::ZeroFluctuation(
            "every window has zero detrended variance".into(),
        ));
    }
    let floor = peak * 1e-24;
    let logs: Vec<f64> = variances
        .iter()
        .filter(|&&v| v > floor)
        .map(|v| v.ln())
        .collect();
    let excluded = variances.len() - logs.len();
    let all = variances.len() as f64;

    let ln_moment = |q: f64| -> f64 {
        if q == 0.0 {
            return logs.iter().sum::<f64>() / (2.0 * logs.len() as f64);
        }
        // zero windows contribute nothing for q > 0 and are excluded for q < 0
        let count = if q > 0.0 { all } else { logs.len() as f64 };
        let half = q / 2.0;
        let top = logs
            .iter()
            .map(|l| half * l)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (half * l - top).exp()).sum();
        (top + sum.ln() - count.ln()) / q
    };
    let ln_f = q_grid.iter().map(|&q| ln_moment(q)).collect();
    Ok((excluded, ln_f, ln_moment(2.0)))
}

/// Computes `F_q(s)` over the configured grids and the scaling exponent for
/// every `q`. Scales are processed in parallel; each scale's windows are
/// reduced in index order, so the result does not depend on scheduling.
pub fn fluctuation_surface(
    series: &[f64],
    config: &MfdfaConfig,
) -> Result<FluctuationSurface, MfdfaError> {
    if series.is_empty() {
        return Err(MfdfaError::EmptySeries);
    }
    if let Some(i) = series.iter().position(|x| !x.is_finite()) {
        return Err(MfdfaError::NonFinite(i));
    }
    if series.iter().all(|&x| x == series[0]) {
        return Err(MfdfaError::ZeroFluctuation("constant series".into()));
    }
    let scales = config.resolve_scales(series)?;
    let profile = profile(&centered(series))?;
    let order = config.detrend_order;

    let per_scale: Vec<ScaleMoments> = scales
        .par_iter()
        .map(|&s| {
            let detrender = Detrender::new(s, order)?;
            let variances = window_variances(&profile, &detrender);
            let (excluded, ln_f, ln_f2) = moments(&variances, &config.q_grid)?;
            Ok(ScaleMoments {
                segments: profile.len() / s,
                excluded,
                ln_f,
                ln_f2,
            })
        })
        .collect::<Result<_, MfdfaError>>()?;

    let ln_s: Vec<f64> = scales.iter().map(|&s| (s as f64).ln()).collect();
    let mut fluctuation = Vec::with_capacity(config.q_grid.len());
    let mut exponents = Vec::with_capacity(config.q_grid.len());
    for (qi, &q) in config.q_grid.iter().enumerate() {
        let ln_f: Vec<f64> = per_scale.iter().map(|m| m.ln_f[qi]).collect();
        if ln_f.iter().any(|v| !v.is_finite()) {
            return Err(MfdfaError::ZeroFluctuation(format!(
                "non-finite fluctuation at q = {q}"
            )));
        }
        exponents.push(scaling_fit(q, &ln_s, &ln_f));
        fluctuation.push(ln_f.iter().map(|v| v.exp()).collect());
    }
    let ln_f2: Vec<f64> = per_scale.iter().map(|m| m.ln_f2).collect();
    let hurst = scaling_fit(2.0, &ln_s, &ln_f2);

    Ok(FluctuationSurface {
        q: config.q_grid.clone(),
        segments: per_scale.iter().map(|m| m.segments).collect(),
        excluded_windows: per_scale.iter().map(|m| m.excluded).collect(),
        scales,
        fluctuation,
        exponents,
        hurst,
        length: series.len(),
        detrend_order: order,
    })
}

/// Generalized Hurst exponent at `q = 2`.
pub fn hurst(series: &[f64], config: &MfdfaConfig) -> Result<f64, MfdfaError> {
    Ok(fluctuation_surface(series, config)?.hurst.h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub q: f64,
    pub h: f64,
    pub alpha: f64,
    pub f: f64,
}

/// Singularity spectrum with its width and asymmetry.
///
/// The asymmetry is `(L - R) / (L + R)` with `L = alpha_at_max - alpha_min`
/// and `R = alpha_max - alpha_at_max`, so a positive value means the wing
/// below the peak is the wider one. It is zero for a degenerate spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularitySpectrum {
    pub points: Vec<SpectrumPoint>,
    pub alpha_at_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub width: f64,
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub width: f64,
    pub asymmetry: f64,
    pub alpha_at_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl SingularitySpectrum {
    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            width: self.width,
            asymmetry: self.asymmetry,
            alpha_at_max: self.alpha_at_max,
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
        }
    }

    /// CSV with columns `alpha,f`, one row per q.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,f\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", float(p.alpha), float(p.f)));
        }
        out
    }
}

pub fn singularity_spectrum(
    surface: &FluctuationSurface,
) -> Result<SingularitySpectrum, MfdfaError> {
    legendre_spectrum(&surface.q, &surface.h())
}

/// Legendre transform of `h(q)` sampled on `q`, with `h'(q)` from central
/// differences (one-sided at the ends of the grid).
pub fn legendre_spectrum(q: &[f64], h: &[f64]) -> Result<SingularitySpectrum, MfdfaError> {
    if q.len() != h.len() {
        return Err(MfdfaError::InvalidConfig(format!(
            "{} q values but {} exponents",
            q.len(),
            h.len()
        )));
    }
    let n = q.len();
    if n < 5 {
        return Err(MfdfaError::QGridTooSparse(n));
    }
    if q.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MfdfaError::InvalidConfig(
            "q grid must be strictly increasing".into(),
        ));
    }
    let derivative = |i: usize| -> f64 {
        let (a, b) = match i {
            0 => (0, 1),
            i if i == n - 1 => (n - 2, n - 1),
            i => (i - 1, i + 1),
        };
        (h[b] - h[a]) / (q[b] - q[a])
    };
    let points: Vec<SpectrumPoint> = (0..n)
        .map(|i| {
            let alpha = h[i] + q[i] * derivative(i);
            SpectrumPoint {
                q: q[i],
                h: h[i],
                alpha,
                f: q[i] * (alpha - h[i]) + 1.0,
            }
        })
        .collect();

    let peak = points
        .iter()
        .fold(&points[0], |best, p| if p.f > best.f { p } else { best });
    let alpha_at_max = peak.alpha;
    let alpha_min = points.iter().map(|p| p.alpha).fold(f64::INFINITY, f64::min);
    let alpha_max = points
        .iter()
        .map(|p| p.alpha)
        .fold(f64::NEG_INFINITY, f64::max);
    let left = alpha_at_max - alpha_min;
    let right = alpha_max - alpha_at_max;
    let asymmetry = if left + right > 0.0 {
        (left - right) / (left + right)
    } else {
        0.0
    };
    Ok(SingularitySpectrum {
        points,
        alpha_at_max,
        alpha_min,
        alpha_max,
        width: alpha_max - alpha_min,
        asymmetry,
    })
}
