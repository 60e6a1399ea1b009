//! The smaller subcommands: profile-excerpt, generate, fit and mfdfa.

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use punctus_core::export::float;
use punctus_core::surrogate::{self, CascadeSpec};
use punctus_core::{extract_ipi, extract_slv, punctuation_profile, tokenize, WeibullParams};
use serde::Serialize;

use crate::analyze::jobs;
use crate::config::Settings;
use crate::io::{read_input, read_series, write_atomic};
use crate::report::{run_mfdfa, IntervalSection, MfdfaSection, Status};
use crate::UsageError;

/// Parses `a:b`, `a:` or `:b` into an inclusive word-index range; open
/// ends are filled in per text.
pub fn parse_range(raw: &str) -> Result<(Option<usize>, Option<usize>), String> {
    let (a, b) = raw
        .split_once(':')
        .ok_or_else(|| format!("range {raw:?} must look like START:END"))?;
    let bound = |s: &str| -> Result<Option<usize>, String> {
        if s.trim().is_empty() {
            Ok(None)
        } else {
            s.trim()
                .parse()
                .map(Some)
                .map_err(|_| format!("bad range bound {s:?}"))
        }
    };
    Ok((bound(a)?, bound(b)?))
}

type OpenRange = (Option<usize>, Option<usize>);

fn close_range(range: OpenRange, total_words: usize) -> anyhow::Result<RangeInclusive<usize>> {
    let start = range.0.unwrap_or(0);
    let end = range.1.unwrap_or(total_words);
    if start > end || end > total_words {
        bail!("range {start}:{end} is outside 0:{total_words}");
    }
    Ok(start..=end)
}

/// Writes one CSV of mark positions for all inputs. Returns false if any
/// input failed.
pub fn profile_excerpt(
    inputs: &[PathBuf],
    ranges: &[OpenRange],
    settings: &Settings,
    out: Option<&Path>,
) -> anyhow::Result<bool> {
    if ranges.len() > 1 && ranges.len() != inputs.len() {
        return Err(UsageError(format!(
            "{} ranges given for {} inputs; pass one range for all or one per input",
            ranges.len(),
            inputs.len()
        ))
        .into());
    }
    let config = settings.punctuation_config()?;
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(["text_id", "word_index", "mark_class"])?;
    let mut ok = true;
    for (i, job) in jobs(inputs).iter().enumerate() {
        let range = ranges
            .get(i)
            .or(ranges.first())
            .copied()
            .unwrap_or((None, None));
        let result = read_input(&job.path).and_then(|text| {
            let stream = tokenize(&text, &config);
            let range = close_range(range, stream.total_words)?;
            Ok(punctuation_profile(&stream, range, &job.text_id))
        });
        match result {
            Ok(profile) => {
                for p in &profile.positions {
                    writer.write_record([
                        profile.text_id.as_str(),
                        &p.word_index.to_string(),
                        p.class.as_str(),
                    ])?;
                }
            }
            Err(e) => {
                eprintln!("punctus: {}: {e:#}", job.path.display());
                ok = false;
            }
        }
    }
    let bytes = writer.into_inner()?;
    match out {
        Some(path) => write_atomic(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(ok)
}

pub enum Generator {
    Cascade { weight: f64, depth: u32 },
    WhiteNoise { n: usize },
    Persistent { n: usize, hurst: f64 },
    Weibull { p: f64, beta: f64, n: usize },
    Shuffle { input: PathBuf },
}

/// Writes one value per line.
pub fn generate(generator: Generator, seed: u64, out: &mut dyn Write) -> anyhow::Result<()> {
    let usage = |e: &dyn std::fmt::Display| anyhow::Error::from(UsageError(e.to_string()));
    let lines: Vec<String> = match generator {
        Generator::Cascade { weight, depth } => {
            let spec = CascadeSpec::new(weight, depth).map_err(|e| usage(&e))?;
            surrogate::binomial_cascade(spec, seed)
                .into_iter()
                .map(float)
                .collect()
        }
        Generator::WhiteNoise { n } => surrogate::white_noise(n, seed)
            .map_err(|e| usage(&e))?
            .into_iter()
            .map(float)
            .collect(),
        Generator::Persistent { n, hurst } => surrogate::persistent_noise(n, hurst, seed)
            .map_err(|e| usage(&e))?
            .into_iter()
            .map(float)
            .collect(),
        Generator::Weibull { p, beta, n } => WeibullParams::new(p, beta)
            .and_then(|w| w.sample(n, seed))
            .map_err(|e| usage(&e))?
            .into_iter()
            .map(|k| k.to_string())
            .collect(),
        Generator::Shuffle { input } => {
            let text = read_input(&input)?;
            let lines: Vec<&str> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect();
            surrogate::shuffle(&lines, seed)
                .into_iter()
                .map(str::to_owned)
                .collect()
        }
    };
    let mut buffer = std::io::BufWriter::new(out);
    for line in lines {
        writeln!(buffer, "{line}")?;
    }
    buffer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Extract {
    Ipi,
    Slv,
}

#[derive(Serialize)]
struct FitOutput<'a> {
    source: String,
    intervals: IntervalSection,
    rng: &'static str,
    config: &'a Settings,
}

/// Weibull fit of a count series, or of the intervals of a text when
/// `extract` is set.
pub fn fit(
    input: &Path,
    extract: Option<Extract>,
    settings: &Settings,
    out: Option<&Path>,
) -> anyhow::Result<bool> {
    let text = read_input(input)?;
    let values: Vec<u64> = match extract {
        Some(kind) => {
            let config = settings.punctuation_config()?;
            let stream = tokenize(&text, &config);
            match kind {
                Extract::Ipi => extract_ipi(&stream, &config).values,
                Extract::Slv => extract_slv(&stream, &config).values,
            }
        }
        None => read_series(&text)?
            .into_iter()
            .map(|v| {
                if v >= 0.0 && v.fract() == 0.0 && v <= 9.0e15 {
                    Ok(v as u64)
                } else {
                    bail!("{v} is not a non-negative integer")
                }
            })
            .collect::<anyhow::Result<_>>()?,
    };
    let intervals = IntervalSection::of_counts(&values, settings.simplex_options()?);
    let ok = intervals.weibull_fit.as_ref().is_some_and(|f| f.converged);
    if let Some(e) = &intervals.fit_error {
        eprintln!("punctus: fit failed: {e}");
    }
    let id = &jobs(&[input.to_path_buf()])[0].text_id;
    let hazard = (!intervals.empirical_hazard.is_empty()).then(|| intervals.hazard_csv());
    let distribution = intervals.distribution_csv();
    let output = FitOutput {
        source: source_name(input),
        intervals,
        rng: punctus_core::rng::GENERATOR,
        config: settings,
    };
    emit_json(&output, out, &format!("{id}.fit.json"))?;
    if let Some(dir) = out {
        write_atomic(
            &dir.join(format!("{id}.distribution.csv")),
            distribution.as_bytes(),
        )?;
        if let Some(h) = hazard {
            write_atomic(&dir.join(format!("{id}.hazard.csv")), h.as_bytes())?;
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct MfdfaOutput<'a> {
    source: String,
    mfdfa: MfdfaSection,
    rng: &'static str,
    config: &'a Settings,
}

/// MFDFA of a numeric series.
pub fn mfdfa(input: &Path, settings: &Settings, out: Option<&Path>) -> anyhow::Result<bool> {
    let values = read_series(&read_input(input)?)?;
    let outcome = run_mfdfa(&values, &settings.mfdfa_config()?);
    let ok = outcome.section.status == Status::Ok;
    if let Some(reason) = &outcome.section.reason {
        eprintln!("punctus: mfdfa {:?}: {reason}", outcome.section.status);
    }
    let id = &jobs(&[input.to_path_buf()])[0].text_id;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        if let Some(surface) = &outcome.surface {
            write_atomic(
                &dir.join(format!("{id}.fluctuation.csv")),
                surface.to_csv().as_bytes(),
            )?;
        }
        if let Some(spectrum) = &outcome.spectrum {
            write_atomic(
                &dir.join(format!("{id}.spectrum.csv")),
                spectrum.to_csv().as_bytes(),
            )?;
        }
    }
    let output = MfdfaOutput {
        source: source_name(input),
        mfdfa: outcome.section,
        rng: punctus_core::rng::GENERATOR,
        config: settings,
    };
    emit_json(&output, out, &format!("{id}.mfdfa.json"))?;
    Ok(ok)
}

fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "-".to_owned())
}

fn emit_json<T: Serialize>(value: &T, dir: Option<&Path>, name: &str) -> anyhow::Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            write_atomic(&dir.join(name), json.as_bytes())
        }
        None => Ok(std::io::stdout().write_all(json.as_bytes())?),
    }
}
