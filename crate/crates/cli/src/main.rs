use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod analyze;
mod commands;
mod config;
mod io;
mod report;

use commands::{Extract, Generator};
use config::{Overrides, Settings};
use report::Status;

/// Error caused by the invocation rather than by the data; exits with 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "punctus",
    version,
    about = "Punctuation interval statistics for plain-text corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: intervals, Weibull fits, hazards and MFDFA per input.
    Analyze {
        /// Input files; `-` reads standard input.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output directory for reports and CSV sidecars.
        #[arg(long, env = "PUNCTUS_OUT", default_value = ".")]
        out: PathBuf,
        /// Treat inputs as numeric series, one value per line.
        #[arg(long, env = "PUNCTUS_SERIES")]
        series: bool,
        /// Worker threads; 0 uses all cores.
        #[arg(long, env = "PUNCTUS_THREADS", default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Mark positions with their class, as CSV (text_id, word_index, mark_class).
    ProfileExcerpt {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Inclusive word-index range START:END; one for all inputs or one per input.
        #[arg(long = "range", value_parser = commands::parse_range)]
        ranges: Vec<(Option<usize>, Option<usize>)>,
        /// Output file; standard output when absent.
        #[arg(long, env = "PUNCTUS_OUT")]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Synthetic series on standard output, one value per line.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        #[arg(long, env = "PUNCTUS_SEED", default_value_t = 0, global = true)]
        seed: u64,
    },
    /// Discrete Weibull fit of a count series.
    Fit {
        input: PathBuf,
        /// Read the input as text and fit its interval series.
        #[arg(long, value_enum)]
        extract: Option<Extract>,
        /// Output directory; JSON goes to standard output when absent.
        #[arg(long, env = "PUNCTUS_OUT")]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// MFDFA of a numeric series.
    Mfdfa {
        input: PathBuf,
        /// Output directory; JSON goes to standard output when absent.
        #[arg(long, env = "PUNCTUS_OUT")]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Binomial multiplicative cascade of length 2^depth.
    Cascade {
        #[arg(long, default_value_t = 0.7)]
        weight: f64,
        #[arg(long, default_value_t = 14)]
        depth: u32,
    },
    /// I.i.d. standard Gaussian values.
    WhiteNoise {
        #[arg(long)]
        n: usize,
    },
    /// Long-range correlated Gaussian noise; n must be a power of two.
    Persistent {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.75)]
        hurst: f64,
    },
    /// Discrete Weibull draws.
    Weibull {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n: usize,
    },
    /// Random permutation of the lines of a file.
    Shuffle { input: PathBuf },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Analyze {
            inputs,
            out,
            series,
            threads,
            overrides,
        } => {
            let settings = Settings::resolve(&overrides)?;
            let reports = analyze::analyze(&inputs, &out, &settings, series, threads)?;
            for r in reports.iter().filter(|r| r.status == Status::Error) {
                eprintln!(
                    "punctus: {}: {}",
                    r.text_id,
                    r.error.as_deref().unwrap_or("error")
                );
            }
            Ok(reports.iter().all(|r| r.status == Status::Ok))
        }
        Command::ProfileExcerpt {
            inputs,
            ranges,
            out,
            overrides,
        } => {
            let settings = Settings::resolve(&overrides)?;
            commands::profile_excerpt(&inputs, &ranges, &settings, out.as_deref())
        }
        Command::Generate { kind, seed } => {
            let generator = match kind {
                GenerateKind::Cascade { weight, depth } => Generator::Cascade { weight, depth },
                GenerateKind::WhiteNoise { n } => Generator::WhiteNoise { n },
                GenerateKind::Persistent { n, hurst } => Generator::Persistent { n, hurst },
                GenerateKind::Weibull { p, beta, n } => Generator::Weibull { p, beta, n },
                GenerateKind::Shuffle { input } => Generator::Shuffle { input },
            };
            commands::generate(generator, seed, &mut std::io::stdout().lock())?;
            Ok(true)
        }
        Command::Fit {
            input,
            extract,
            out,
            overrides,
        } => {
            let settings = Settings::resolve(&overrides)?;
            commands::fit(&input, extract, &settings, out.as_deref())
        }
        Command::Mfdfa {
            input,
            out,
            overrides,
        } => {
            let settings = Settings::resolve(&overrides)?;
            commands::mfdfa(&input, &settings, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("punctus: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
