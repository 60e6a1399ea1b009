//! JSON report layout and the per-series analysis that fills it.

use punctus_core::export::float;
use punctus_core::mfdfa::{ScalingFit, SpectrumSummary};
use punctus_core::weibull::{fit_mle_with, histogram, FitSummary};
use punctus_core::{
    empirical_hazard, fluctuation_surface, singularity_spectrum, FluctuationSurface, MfdfaConfig,
    MfdfaError, SimplexOptions, SingularitySpectrum,
};
use serde::Serialize;

use crate::config::Settings;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Skipped,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Text,
    Series,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub text_id: String,
    pub source: String,
    pub input_kind: InputKind,
    pub status: Status,
    pub error: Option<String>,
    pub word_count: Option<usize>,
    pub ipi: Option<IntervalSection>,
    pub slv: Option<IntervalSection>,
    pub series: Option<IntervalSection>,
    pub mfdfa_ipi: Option<MfdfaSection>,
    pub mfdfa_slv: Option<MfdfaSection>,
    pub mfdfa_series: Option<MfdfaSection>,
    pub rng: &'static str,
    pub config: Settings,
}

impl Report {
    pub fn empty(text_id: &str, source: &str, kind: InputKind, settings: &Settings) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            text_id: text_id.to_owned(),
            source: source.to_owned(),
            input_kind: kind,
            status: Status::Ok,
            error: None,
            word_count: None,
            ipi: None,
            slv: None,
            series: None,
            mfdfa_ipi: None,
            mfdfa_slv: None,
            mfdfa_series: None,
            rng: punctus_core::rng::GENERATOR,
            config: settings.clone(),
        }
    }

    pub fn failed(mut self, message: String) -> Self {
        self.status = Status::Error;
        self.error = Some(message);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Bin {
    pub k: u64,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Serialize)]
pub struct HazardRow {
    pub k: u64,
    pub hazard: f64,
    pub at_risk: u64,
}

#[derive(Debug, Serialize)]
pub struct IntervalSection {
    pub count: usize,
    pub dropped_tail: Option<usize>,
    pub collapsed_runs: Option<usize>,
    pub histogram: Vec<Bin>,
    pub weibull_fit: Option<FitSummary>,
    pub fit_error: Option<String>,
    pub empirical_hazard: Vec<HazardRow>,
    pub hazard_error: Option<String>,
}

impl IntervalSection {
    /// Histogram, Weibull fit and life-table hazard of a count series.
    pub fn of_counts(values: &[u64], options: SimplexOptions) -> Self {
        let total = values.len() as f64;
        let hist = histogram(values)
            .into_iter()
            .map(|(k, count)| Bin {
                k,
                count,
                frequency: count as f64 / total,
            })
            .collect();
        let (weibull_fit, fit_error) = match fit_mle_with(values, options) {
            Ok(fit) => (Some(fit.summary()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let (empirical_hazard, hazard_error) = match empirical_hazard(values) {
            Ok(curve) => (
                curve
                    .values
                    .iter()
                    .zip(&curve.at_risk)
                    .map(|(&(k, hazard), &at_risk)| HazardRow { k, hazard, at_risk })
                    .collect(),
                None,
            ),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        Self {
            count: values.len(),
            dropped_tail: None,
            collapsed_runs: None,
            histogram: hist,
            weibull_fit,
            fit_error,
            empirical_hazard,
            hazard_error,
        }
    }

    /// Section for a series that is not made of counts.
    pub fn not_counts(len: usize, reason: &str) -> Self {
        Self {
            count: len,
            dropped_tail: None,
            collapsed_runs: None,
            histogram: Vec::new(),
            weibull_fit: None,
            fit_error: Some(reason.to_owned()),
            empirical_hazard: Vec::new(),
            hazard_error: Some(reason.to_owned()),
        }
    }

    pub fn distribution_csv(&self) -> String {
        let mut out = String::from("k,count,frequency\n");
        for b in &self.histogram {
            out.push_str(&format!("{},{},{}\n", b.k, b.count, float(b.frequency)));
        }
        out
    }

    pub fn hazard_csv(&self) -> String {
        let mut out = String::from("k,hazard,at_risk\n");
        for r in &self.empirical_hazard {
            out.push_str(&format!("{},{},{}\n", r.k, float(r.hazard), r.at_risk));
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct MfdfaSection {
    pub status: Status,
    pub reason: Option<String>,
    pub length: usize,
    pub scales: Vec<usize>,
    pub excluded_windows: Option<usize>,
    pub hurst: Option<f64>,
    pub hurst_r_squared: Option<f64>,
    pub h: Vec<ScalingFit>,
    pub spectrum: Option<SpectrumSummary>,
    pub spectrum_error: Option<String>,
}

/// Result of running MFDFA on one series: the section plus the data for
/// the CSV sidecars when the analysis ran.
pub struct MfdfaOutcome {
    pub section: MfdfaSection,
    pub surface: Option<FluctuationSurface>,
    pub spectrum: Option<SingularitySpectrum>,
}

pub fn run_mfdfa(series: &[f64], config: &MfdfaConfig) -> MfdfaOutcome {
    let surface = match fluctuation_surface(series, config) {
        Ok(s) => s,
        Err(e) => {
            let status = match e {
                MfdfaError::InvalidConfig(_) => Status::Error,
                _ => Status::Skipped,
            };
            return MfdfaOutcome {
                section: MfdfaSection {
                    status,
                    reason: Some(e.to_string()),
                    length: series.len(),
                    scales: Vec::new(),
                    excluded_windows: None,
                    hurst: None,
                    hurst_r_squared: None,
                    h: Vec::new(),
                    spectrum: None,
                    spectrum_error: None,
                },
                surface: None,
                spectrum: None,
            };
        }
    };
    let (spectrum, spectrum_error) = match singularity_spectrum(&surface) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = surface.summary();
    MfdfaOutcome {
        section: MfdfaSection {
            status: Status::Ok,
            reason: None,
            length: summary.length,
            scales: summary.scales,
            excluded_windows: Some(summary.excluded_windows),
            hurst: Some(summary.hurst),
            hurst_r_squared: Some(summary.hurst_r_squared),
            h: summary.exponents,
            spectrum: spectrum.as_ref().map(|s| s.summary()),
            spectrum_error,
        },
        surface: Some(surface),
        spectrum,
    }
}
