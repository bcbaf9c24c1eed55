//! Command-line front end for the multifractal zeta library.
//!
//! Every subcommand reads a TOML model file, resolves flag overrides into a
//! single canonical configuration, runs one computation, and writes a JSON
//! report (plus an optional CSV table) into the output directory. The report
//! embeds a SHA-256 hash of the resolved configuration so downstream tooling
//! can tie results back to their inputs; identical configurations produce
//! byte-identical reports.
//!
//! Exit codes: `0` success, `2` configuration errors (unreadable or malformed
//! model files, invalid targets or flags), `3` numeric failures (enumeration
//! budgets, bracketing, inapplicable factorizations).

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfzeta::Error;

/// Version of the report envelope layout.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "mfzeta",
    version,
    about = "Multifractal zeta-functions on self-similar symbolic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the closed-form multifractal spectrum on an exponent grid.
    Spectrum(CommonArgs),
    /// Estimate the abscissa of convergence of a filtered zeta-function.
    ZetaAbscissa(CommonArgs),
    /// Run abscissa estimates along a shrinking ladder of filter radii.
    ShrinkSweep(CommonArgs),
    /// Box-count stopping-set covers across a ladder of scales.
    Coarse(CommonArgs),
    /// Cross-check the truncated zeta sum against its Euler prime form.
    Euler(CommonArgs),
    /// Maximize the dimension functional over a constrained measure family.
    Variational(CommonArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Spectrum(a) => ("spectrum", a),
            Command::ZetaAbscissa(a) => ("zeta-abscissa", a),
            Command::ShrinkSweep(a) => ("shrink-sweep", a),
            Command::Coarse(a) => ("coarse", a),
            Command::Euler(a) => ("euler", a),
            Command::Variational(a) => ("variational", a),
        }
    }
}

/// Flags shared by every subcommand. Lists are comma separated; each flag
/// overrides the matching `[defaults]` entry of the model file.
#[derive(Args)]
pub struct CommonArgs {
    /// TOML model file.
    #[arg(long)]
    pub model: PathBuf,

    /// Target spec: "point:a;b", "box:lo,hi;lo,hi", or "ball:a;b,r".
    #[arg(long)]
    pub target: Option<String>,

    /// Filter radius, or a strictly decreasing comma-separated ladder.
    #[arg(long)]
    pub radius: Option<String>,

    /// Word-length levels; the deepest entry sets the truncation depth.
    #[arg(long)]
    pub levels: Option<String>,

    /// Directory the reports are written into.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// "json", or "csv" to also write a flat table.
    #[arg(long, default_value = "json")]
    pub format: String,

    /// Seed for the stochastic search phases.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Exponent probed by the Euler check.
    #[arg(long)]
    pub s: Option<f64>,

    /// Longest prime word length inspected by the Euler check.
    #[arg(long)]
    pub max_len: Option<usize>,

    /// Strictly decreasing comma-separated ladder of coarse scales.
    #[arg(long)]
    pub deltas: Option<String>,

    /// Abscissa mode: "fixed" (one radius) or "shrink" (radius ladder).
    #[arg(long)]
    pub mode: Option<String>,

    /// Measure family for the variational search: "bernoulli" or "markov1".
    #[arg(long)]
    pub family: Option<String>,
}

/// CLI-level error, carrying the process exit code.
#[derive(Debug)]
pub enum AppError {
    /// Bad inputs: unreadable or malformed files, invalid flags, models,
    /// targets, or statistics. Exit code 2.
    Config(String),
    /// The computation itself failed: budgets, bracketing, inapplicable
    /// identities, or output I/O. Exit code 3.
    Numeric(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "configuration error: {msg}"),
            AppError::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyWord
            | Error::SymbolOutOfRange { .. }
            | Error::AlphabetTooSmall(_)
            | Error::ZeroLevel
            | Error::InvalidModel(_)
            | Error::InvalidTarget(_)
            | Error::InvalidStatistic(_)
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::AlphabetMismatch { .. } => AppError::Config(e.to_string()),
            Error::EnumerationBudget { .. }
            | Error::StoppingBudget(_)
            | Error::NotMultiplicative
            | Error::NotCompositionMeasurable
            | Error::BracketFailure(_) => AppError::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = cli.command.parts();
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(name: &'static str, args: &CommonArgs) -> Result<(), AppError> {
    match args.format.as_str() {
        "json" | "csv" => {}
        other => {
            return Err(AppError::Config(format!(
                "unknown format {other:?} (expected \"json\" or \"csv\")"
            )))
        }
    }
    let (cfg, rt) = config::load(name, args)?;
    let out = commands::dispatch(name, &cfg, &rt)?;

    let envelope = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "library_version": env!("CARGO_PKG_VERSION"),
        "config_sha256": cfg.sha256(),
        "command": name,
        "result": out.result,
    });
    let mut body = serde_json::to_vec_pretty(&envelope)
        .map_err(|e| AppError::Numeric(format!("cannot serialize report: {e}")))?;
    body.push(b'\n');

    let stem = name.replace('-', "_");
    let json_path = config::write_output(&args.out, &format!("{stem}.json"), &body)?;
    println!("{}", out.summary);
    println!("wrote {}", json_path.display());
    if args.format == "csv" {
        if let Some(csv) = &out.csv {
            let csv_path = config::write_output(&args.out, &format!("{stem}.csv"), csv.as_bytes())?;
            println!("wrote {}", csv_path.display());
        }
    }
    Ok(())
}
