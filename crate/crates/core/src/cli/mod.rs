//! Command-line front end. The `fredholm-lab` binary only calls [`main`].
//!
//! Exit codes: 0 success, 1 disagreement between routes or a failed
//! cross-check, 2 bad input, 3 non-stabilizing evidence, 4 numerical refusal.

mod commands;
mod matrix_file;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOLERANCE;

pub use matrix_file::{parse_complex, read_matrix};
pub use render::{Outcome, Status, Table};

/// Version of every JSON document the CLI writes.
pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "FREDHOLM_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fredholm-lab",
    version,
    about = "Fredholm indices, Chern pairings and s-numbers on truncated models"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random draw [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Relative singular-value cutoff for ranks and null spaces [default: 1e-8]
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    /// Boundary mass below which a kernel vector counts as interior [default: 1e-6]
    #[arg(long, global = true)]
    pub mass_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Keys accepted in a `--config` file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub rank_tolerance: Option<f64>,
    pub mass_threshold: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::invalid(format!("config `{}`: {e}", path.display())))
    }
}

/// Global settings after merging flags, config file and defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub rank_tolerance: f64,
    pub mass_threshold: f64,
}

impl Settings {
    pub fn resolve(global: &GlobalArgs) -> Result<Self> {
        let file = match &global.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let settings = Self {
            format: global.format.or(file.format).unwrap_or(Format::Json),
            output: global.output.clone().or(file.output),
            seed: global.seed.or(file.seed).unwrap_or(0),
            rank_tolerance: global
                .rank_tol
                .or(file.rank_tolerance)
                .unwrap_or(DEFAULT_RANK_TOLERANCE),
            mass_threshold: global.mass_threshold.or(file.mass_threshold).unwrap_or(1e-6),
        };
        for (name, v) in [
            ("rank tolerance", settings.rank_tolerance),
            ("mass threshold", settings.mass_threshold),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!("{name} {v} must lie in (0, 1)")));
            }
        }
        Ok(settings)
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Index of the Toeplitz operator T_f by winding number and finite sections.
    ToeplitzIndex(ToeplitzArgs),
    /// Odd Chern pairing tr(F (du⁻¹du)^N) on the circle.
    Chern(ChernArgs),
    /// Index pairing of random invertible matrices with the triangular projection.
    Schur(SchurArgs),
    /// Toeplitz index over an ordered group from per-radius kernel counts.
    GroupIndex(GroupIndexArgs),
    /// Approximation numbers and S^q_app norm of a matrix read from a file.
    Snumbers(SnumbersArgs),
    /// Free Hilbert transform and its commutator with a left translation.
    FreeHilbert(FreeHilbertArgs),
    /// Quick pass over every module.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ToeplitzIndex(_) => "toeplitz-index",
            Command::Chern(_) => "chern",
            Command::Schur(_) => "schur",
            Command::GroupIndex(_) => "group-index",
            Command::Snumbers(_) => "snumbers",
            Command::FreeHilbert(_) => "free-hilbert",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Winding,
    Stabilize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgesArg {
    Leading,
    Trailing,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ToeplitzArgs {
    /// Trigonometric polynomial, e.g. "z^3" or "(1+2i)*z^-1 + 0.5".
    #[arg(long, allow_hyphen_values = true)]
    pub symbol: String,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "winding,stabilize")]
    pub routes: Vec<RouteArg>,
    #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
    pub scales: Vec<usize>,
    /// Boundary rows ignored by the kernel filter [default: 4 × bandwidth]
    #[arg(long)]
    pub margin: Option<usize>,
    #[arg(long, value_enum, default_value = "trailing")]
    pub edges: EdgesArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChernArgs {
    /// Invertible trigonometric polynomial u.
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    /// Odd degree n.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchurArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GroupIndexArgs {
    /// Z, Z^d (lexicographic) or B3.
    #[arg(long)]
    pub group: String,
    /// Word such as "3", "(2,-1)" or "s1^2 s2^-1".
    #[arg(long, allow_hyphen_values = true)]
    pub element: String,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
    pub radii: Vec<usize>,
    /// Index to compare against; a stable mismatch exits with code 1.
    #[arg(long, allow_hyphen_values = true)]
    pub expect: Option<i64>,
    /// Handle-reduction step budget per word [default: 1000000]
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SnumbersArgs {
    /// JSON (array of rows) or CSV file of complex literals.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Exponent p of ℓ^p, a number ≥ 1 or "inf".
    #[arg(long, default_value = "2")]
    pub p: String,
    /// Exponent q of the S^q_app quasi-norm.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Random contractions tried by the Weyl-number lower bound.
    #[arg(long, default_value_t = 64)]
    pub weyl_samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FreeHilbertArgs {
    /// One (ε⁺, ε⁻) pair per generator, e.g. "+-,-+,++".
    #[arg(long, conflicts_with = "random_signs", required_unless_present = "random_signs")]
    pub signs: Option<String>,
    /// Draw random signs for this many generators from the seed.
    #[arg(long)]
    pub random_signs: Option<usize>,
    /// Translation word, e.g. "g1 g2^-1".
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
}

/// Exit code for an error class.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::NonSquare { .. }
        | Error::DimensionMismatch(_)
        | Error::WindowMismatch { .. }
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_) => 2,
        Error::NumericalRefusal(_) | Error::BudgetExceeded { .. } | Error::Overflow(_) => 4,
        Error::CrossCheck(_) => 1,
    }
}

/// A finished run: the rendered document and where it should go.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub text: String,
    pub outcome: Outcome,
    pub output: Option<PathBuf>,
}

/// Runs a parsed command line and renders the result in the chosen format.
pub fn run(cli: &Cli) -> Result<Rendered> {
    let settings = Settings::resolve(&cli.global)?;
    let outcome = commands::dispatch(&cli.command, &settings)?;
    let text = render::render(&outcome, &settings)?;
    Ok(Rendered {
        text,
        outcome,
        output: settings.output,
    })
}

/// Parses `args` (program name first) and runs them without touching stdout.
pub fn run_args<I, T>(args: I) -> Result<Rendered>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::invalid(e.to_string()))?;
    run(&cli)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::invalid(format!("{THREADS_ENV}={value} is not a positive integer")))?;
    // a pool that already exists (tests, embedding) is left alone
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(&cli)).and_then(|r| {
        match &r.output {
            Some(path) => std::fs::write(path, &r.text)?,
            None => print!("{}", r.text),
        }
        Ok(r.outcome)
    });
    match result {
        Ok(outcome) => {
            if let Status::Disagreement(msg) | Status::NonStabilizing(msg) = &outcome.status {
                eprintln!("{}: {msg}", outcome.status.label());
            }
            ExitCode::from(outcome.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
