//! The `analyze` pipeline: one JSON report and a set of CSV sidecars per
//! input file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use punctus_core::{
    extract_ipi, extract_slv, tokenize, MfdfaConfig, PunctuationConfig, SimplexOptions,
};
use rayon::prelude::*;

use crate::config::Settings;
use crate::io::{read_input, read_series, write_atomic};
use crate::report::{run_mfdfa, InputKind, IntervalSection, MfdfaOutcome, Report, Status};

pub struct Job {
    pub path: PathBuf,
    pub text_id: String,
}

/// Unique, order-stable text ids derived from file stems.
pub fn jobs(paths: &[PathBuf]) -> Vec<Job> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    paths
        .iter()
        .map(|path| {
            let stem = if path.as_os_str() == "-" {
                "stdin".to_owned()
            } else {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "input".to_owned())
            };
            let n = seen.entry(stem.clone()).or_insert(0);
            *n += 1;
            let text_id = if *n == 1 { stem } else { format!("{stem}-{n}") };
            Job {
                path: path.clone(),
                text_id,
            }
        })
        .collect()
}

struct Resolved {
    punctuation: PunctuationConfig,
    mfdfa: MfdfaConfig,
    simplex: SimplexOptions,
}

/// Output file name and contents.
type Sidecar = (String, String);

/// Runs every job on a pool of `threads` workers (0 picks the default) and
/// writes the results into `out`. Returns the reports in input order.
pub fn analyze(
    inputs: &[PathBuf],
    out: &Path,
    settings: &Settings,
    series_mode: bool,
    threads: usize,
) -> anyhow::Result<Vec<Report>> {
    let resolved = Resolved {
        punctuation: settings.punctuation_config()?,
        mfdfa: settings.mfdfa_config()?,
        simplex: settings.simplex_options()?,
    };
    std::fs::create_dir_all(out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let jobs = jobs(inputs);
    let results: Vec<(Report, Vec<Sidecar>)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| process(job, settings, &resolved, series_mode))
            .collect()
    });

    let mut reports = Vec::with_capacity(results.len());
    for (report, sidecars) in results {
        for (name, body) in &sidecars {
            write_atomic(&out.join(name), body.as_bytes())?;
        }
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        write_atomic(
            &out.join(format!("{}.report.json", report.text_id)),
            json.as_bytes(),
        )?;
        reports.push(report);
    }
    Ok(reports)
}

fn process(
    job: &Job,
    settings: &Settings,
    resolved: &Resolved,
    series_mode: bool,
) -> (Report, Vec<Sidecar>) {
    let source = if job.path.as_os_str() == "-" {
        "-".to_owned()
    } else {
        job.path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let kind = if series_mode {
        InputKind::Series
    } else {
        InputKind::Text
    };
    let report = Report::empty(&job.text_id, &source, kind, settings);
    let text = match read_input(&job.path) {
        Ok(t) => t,
        Err(e) => return (report.failed(format!("{e:#}")), Vec::new()),
    };
    if series_mode {
        analyze_series(report, &text, resolved)
    } else {
        analyze_text(report, &text, resolved)
    }
}

fn analyze_text(mut report: Report, text: &str, r: &Resolved) -> (Report, Vec<Sidecar>) {
    let stream = tokenize(text, &r.punctuation);
    if stream.total_words == 0 {
        return (report.failed("input contains no words".into()), Vec::new());
    }
    report.word_count = Some(stream.total_words);
    let mut sidecars = Vec::new();
    let id = report.text_id.clone();

    for (label, series) in [
        ("ipi", extract_ipi(&stream, &r.punctuation)),
        ("slv", extract_slv(&stream, &r.punctuation)),
    ] {
        let mut section = IntervalSection::of_counts(&series.values, r.simplex);
        section.dropped_tail = Some(series.dropped_tail);
        section.collapsed_runs = Some(series.collapsed_runs);
        let mfdfa = run_mfdfa(&series.as_f64(), &r.mfdfa);
        push_sidecars(&mut sidecars, &id, label, &section, &mfdfa);
        match label {
            "ipi" => {
                report.ipi = Some(section);
                report.mfdfa_ipi = Some(mfdfa.section);
            }
            _ => {
                report.slv = Some(section);
                report.mfdfa_slv = Some(mfdfa.section);
            }
        }
    }
    (report, sidecars)
}

fn analyze_series(mut report: Report, text: &str, r: &Resolved) -> (Report, Vec<Sidecar>) {
    let values = match read_series(text) {
        Ok(v) if v.is_empty() => {
            return (report.failed("input contains no values".into()), Vec::new())
        }
        Ok(v) => v,
        Err(e) => return (report.failed(format!("{e:#}")), Vec::new()),
    };
    let section = match as_counts(&values) {
        Some(counts) => IntervalSection::of_counts(&counts, r.simplex),
        None => IntervalSection::not_counts(values.len(), "values are not positive integers"),
    };
    let mfdfa = run_mfdfa(&values, &r.mfdfa);
    let mut sidecars = Vec::new();
    let id = report.text_id.clone();
    push_sidecars(&mut sidecars, &id, "series", &section, &mfdfa);
    report.series = Some(section);
    report.mfdfa_series = Some(mfdfa.section);
    (report, sidecars)
}

fn as_counts(values: &[f64]) -> Option<Vec<u64>> {
    values
        .iter()
        .map(|&v| (v >= 1.0 && v.fract() == 0.0 && v <= 9.0e15).then_some(v as u64))
        .collect()
}

fn push_sidecars(
    out: &mut Vec<Sidecar>,
    id: &str,
    label: &str,
    section: &IntervalSection,
    mfdfa: &MfdfaOutcome,
) {
    if !section.histogram.is_empty() {
        out.push((
            format!("{id}.{label}.distribution.csv"),
            section.distribution_csv(),
        ));
    }
    if !section.empirical_hazard.is_empty() {
        out.push((format!("{id}.{label}.hazard.csv"), section.hazard_csv()));
    }
    if mfdfa.section.status == Status::Ok {
        if let Some(surface) = &mfdfa.surface {
            out.push((format!("{id}.{label}.fluctuation.csv"), surface.to_csv()));
        }
        if let Some(spectrum) = &mfdfa.spectrum {
            out.push((format!("{id}.{label}.spectrum.csv"), spectrum.to_csv()));
        }
    }
}
