//! Effective configuration: built-in defaults, then an optional TOML file,
//! then command-line flags and their environment variables.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use punctus_core::corpus::WordPolicy;
use punctus_core::mfdfa::q_grid;
use punctus_core::{MfdfaConfig, PunctuationConfig, SimplexOptions};
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub seed: u64,
    pub punctuation: PunctuationSettings,
    pub mfdfa: MfdfaSettings,
    pub fit: FitSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PunctuationSettings {
    pub internal_marks: Vec<String>,
    pub terminal_marks: Vec<String>,
    pub collapse_runs: bool,
    pub joiners: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfdfaSettings {
    pub detrend_order: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
    pub s_min: Option<usize>,
    pub s_max: Option<usize>,
    pub scale_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSettings {
    pub tolerance: f64,
    pub max_evaluations: usize,
    pub initial_step: f64,
}

impl Default for PunctuationSettings {
    fn default() -> Self {
        let base = PunctuationConfig::default();
        Self {
            internal_marks: base.internal_marks.into_iter().collect(),
            terminal_marks: base.terminal_marks.into_iter().collect(),
            collapse_runs: base.collapse_runs,
            joiners: base
                .word_policy
                .joiners
                .iter()
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

impl Default for MfdfaSettings {
    fn default() -> Self {
        let base = MfdfaConfig::default();
        Self {
            detrend_order: base.detrend_order,
            q_min: -4.0,
            q_max: 4.0,
            q_step: 0.25,
            s_min: None,
            s_max: None,
            scale_count: base.scale_count,
        }
    }
}

impl Default for FitSettings {
    fn default() -> Self {
        let base = SimplexOptions::default();
        Self {
            tolerance: base.tolerance,
            max_evaluations: base.max_evaluations,
            initial_step: base.initial_step,
        }
    }
}

/// Flags shared by the analysis subcommands. Each has a `PUNCTUS_*`
/// environment variable; flags win over the environment, which wins over
/// the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long, env = "PUNCTUS_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "PUNCTUS_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "PUNCTUS_Q_MIN", allow_negative_numbers = true)]
    pub q_min: Option<f64>,
    #[arg(long, env = "PUNCTUS_Q_MAX", allow_negative_numbers = true)]
    pub q_max: Option<f64>,
    #[arg(long, env = "PUNCTUS_Q_STEP")]
    pub q_step: Option<f64>,
    #[arg(long, env = "PUNCTUS_S_MIN")]
    pub s_min: Option<usize>,
    #[arg(long, env = "PUNCTUS_S_MAX")]
    pub s_max: Option<usize>,
    #[arg(long, env = "PUNCTUS_DETREND_ORDER")]
    pub detrend_order: Option<usize>,
    /// Whitespace-separated list, e.g. ". ! ? …".
    #[arg(long, env = "PUNCTUS_TERMINAL_MARKS", allow_hyphen_values = true)]
    pub terminal_marks: Option<String>,
    /// Whitespace-separated list, e.g. ", ; : ( )".
    #[arg(long, env = "PUNCTUS_INTERNAL_MARKS", allow_hyphen_values = true)]
    pub internal_marks: Option<String>,
    #[arg(long, env = "PUNCTUS_COLLAPSE_RUNS", value_name = "BOOL")]
    pub collapse_runs: Option<bool>,
}

fn mark_list(raw: &str) -> Vec<String> {
    raw.split_whitespace().map(str::to_owned).collect()
}

impl Settings {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }

    pub fn resolve(overrides: &Overrides) -> anyhow::Result<Self> {
        let mut settings = match &overrides.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        settings.apply(overrides);
        settings.canonicalize();
        settings.punctuation_config()?;
        settings.mfdfa_config()?;
        settings.simplex_options()?;
        Ok(settings)
    }

    /// Mark and joiner lists are sets; sorting them makes equivalent
    /// configurations echo identically.
    fn canonicalize(&mut self) {
        let p = &mut self.punctuation;
        for list in [&mut p.internal_marks, &mut p.terminal_marks, &mut p.joiners] {
            list.sort();
            list.dedup();
        }
    }

    fn apply(&mut self, o: &Overrides) {
        let m = &mut self.mfdfa;
        let p = &mut self.punctuation;
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.q_min {
            m.q_min = v;
        }
        if let Some(v) = o.q_max {
            m.q_max = v;
        }
        if let Some(v) = o.q_step {
            m.q_step = v;
        }
        if o.s_min.is_some() {
            m.s_min = o.s_min;
        }
        if o.s_max.is_some() {
            m.s_max = o.s_max;
        }
        if let Some(v) = o.detrend_order {
            m.detrend_order = v;
        }
        if let Some(v) = &o.terminal_marks {
            p.terminal_marks = mark_list(v);
        }
        if let Some(v) = &o.internal_marks {
            p.internal_marks = mark_list(v);
        }
        if let Some(v) = o.collapse_runs {
            p.collapse_runs = v;
        }
    }

    pub fn punctuation_config(&self) -> anyhow::Result<PunctuationConfig> {
        let p = &self.punctuation;
        let mut joiners = BTreeSet::new();
        for j in &p.joiners {
            let mut chars = j.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => {
                    joiners.insert(c);
                }
                _ => {
                    return Err(
                        UsageError(format!("joiner {j:?} must be a single character")).into(),
                    )
                }
            }
        }
        let config = PunctuationConfig {
            internal_marks: p.internal_marks.iter().cloned().collect(),
            terminal_marks: p.terminal_marks.iter().cloned().collect(),
            collapse_runs: p.collapse_runs,
            word_policy: WordPolicy { joiners },
        };
        config
            .validate()
            .map_err(|e| UsageError(format!("punctuation: {e}")))?;
        Ok(config)
    }

    pub fn mfdfa_config(&self) -> anyhow::Result<MfdfaConfig> {
        let m = &self.mfdfa;
        let grid = q_grid(m.q_min, m.q_max, m.q_step);
        let config = MfdfaConfig {
            detrend_order: m.detrend_order,
            q_grid: grid,
            s_min: m.s_min,
            s_max: m.s_max,
            scale_count: m.scale_count,
            scales: None,
        };
        config
            .validate()
            .map_err(|e| UsageError(format!("mfdfa: {e}")))?;
        Ok(config)
    }

    pub fn simplex_options(&self) -> anyhow::Result<SimplexOptions> {
        let f = &self.fit;
        if !(f.tolerance >= 0.0 && f.initial_step > 0.0) || f.max_evaluations == 0 {
            return Err(UsageError(
                "fit: tolerance must be >= 0, initial_step > 0 and max_evaluations > 0".into(),
            )
            .into());
        }
        Ok(SimplexOptions {
            tolerance: f.tolerance,
            max_evaluations: f.max_evaluations,
            initial_step: f.initial_step,
        })
    }
}
