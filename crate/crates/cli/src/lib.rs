//! Command-line driver for `opsysdual`.
//!
//! [`run`] parses arguments, executes one subcommand, writes its
//! certificates under `--cert-dir` and prints a [`RunReport`]. Exit codes:
//! `0` success, `1` a verification or suite check failed, `2` invalid input
//! or usage, `3` a solver could not decide.

pub mod commands;
pub mod inputs;
pub mod output;
pub mod suites;

use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

pub use output::{CsvRow, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

/// Smallest accepted `--tol`; below it residuals are rounding noise.
pub const MIN_TOL: f64 = 1e-14;

#[derive(Parser, Debug)]
#[command(
    name = "opsysdual",
    version,
    about = "Operator systems, their duals and certificates"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct GlobalArgs {
    /// Highest amplification level searched.
    #[arg(long, global = true, default_value_t = 4)]
    pub level: usize,
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,
    /// Random starts per level for see-saw searches.
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,
    /// Decimal or `0x` hexadecimal.
    #[arg(long, global = true, default_value = "0x5EED", value_parser = parse_seed)]
    pub seed: u64,
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value = "./certs")]
    pub cert_dir: PathBuf,
}

impl Default for GlobalArgs {
    fn default() -> Self {
        Self {
            level: 4,
            tol: 1e-7,
            restarts: 16,
            seed: 0x5EED,
            json: false,
            cert_dir: PathBuf::from("./certs"),
        }
    }
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let r = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    r.map_err(|_| format!("'{s}' is not a decimal or 0x-hexadecimal seed"))
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a named system (or the corpus manifest) and write it as JSON.
    Make {
        /// `linfty:N`, `m:D`, `toeplitz:N`, `path:N`, `graph:N:i-j,..`,
        /// `offdiag-m2`, `sym-offdiag-m2`, `random:SEED:D:K[:u]` or a file.
        spec: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit the built-in corpus with provenance and expectations.
        #[arg(long, conflicts_with = "spec")]
        manifest: bool,
    },
    /// Membership of an element in the matrix cone.
    ConeCheck(ElementArgs),
    /// Operator norm of an element.
    Norm(ElementArgs),
    /// `‖f‖_{M_m(S*)}` by the extension SDP.
    DualNorm {
        #[command(flatten)]
        args: FunctionalArgs,
        /// Also run the see-saw lower bound.
        #[arg(long)]
        seesaw: bool,
    },
    /// The positive-part norm `‖f‖^d`.
    DNorm(FunctionalArgs),
    /// Both norms and their ratio.
    Ratio {
        #[command(flatten)]
        args: FunctionalArgs,
        /// Append the row to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Decomposition value of an element, or `r̂_N` over samples.
    Decomp {
        #[arg(long)]
        system: String,
        #[arg(long)]
        element: Option<String>,
        /// Random elements per level when no element is given.
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Dualizability verdict.
    Verdict {
        #[arg(long)]
        system: String,
        /// Random functionals and random elements per level.
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Decomposition of a complete contraction into four CP parts.
    Wittstock(FunctionalArgs),
    /// CP and contraction checks for a map and its dual.
    DualMap {
        #[arg(long)]
        source: String,
        /// Defaults to the source.
        #[arg(long)]
        target: Option<String>,
        /// `identity`, `transpose`, `diagonal`, or a JSON list of images.
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Norm of an element computed through the double dual.
    Bidual(ElementArgs),
    /// Comparison with the exact LP norms on a diagonal system.
    Oracle(FunctionalArgs),
    /// Run acceptance suites: `all`, a number `1`..`10`, or a name.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Re-verify certificates, or write a CSV ratio table for a system.
    Report {
        /// Certificate files or directories.
        #[arg(long = "verify-cert", num_args = 1..)]
        verify_cert: Vec<PathBuf>,
        #[arg(long, requires = "system")]
        csv: Option<PathBuf>,
        #[arg(long)]
        system: Option<String>,
        /// Random functionals added to the structured sample.
        #[arg(long, default_value_t = 8)]
        random: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Make { .. } => "make",
            Command::ConeCheck(_) => "cone-check",
            Command::Norm(_) => "norm",
            Command::DualNorm { .. } => "dual-norm",
            Command::DNorm(_) => "d-norm",
            Command::Ratio { .. } => "ratio",
            Command::Decomp { .. } => "decomp",
            Command::Verdict { .. } => "verdict",
            Command::Wittstock(_) => "wittstock",
            Command::DualMap { .. } => "dual-map",
            Command::Bidual(_) => "bidual",
            Command::Oracle(_) => "oracle",
            Command::Verify { .. } => "verify",
            Command::Report { .. } => "report",
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct ElementArgs {
    #[arg(long)]
    pub system: String,
    /// JSON matrix, `{"level", "matrix"}`, `unit[:n]`, `basis:s`,
    /// `random:SEED[:n]`, or a file.
    #[arg(long)]
    pub element: String,
}

#[derive(Args, Clone, Debug)]
pub struct FunctionalArgs {
    #[arg(long)]
    pub system: String,
    /// Basis values `[v_1, ..]`, functional JSON, `trace`, `identity`,
    /// `transpose`, `entry:i:j`, `random:SEED[:m]`, or a file.
    #[arg(long)]
    pub functional: String,
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invalid(String),
    Undecided(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Invalid(_) => EXIT_INVALID,
            CliError::Undecided(_) => EXIT_UNDECIDED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Invalid(m) => f.write_str(m),
            CliError::Undecided(m) => write!(f, "undecided: {m}"),
        }
    }
}

impl From<opsysdual::Error> for CliError {
    fn from(e: opsysdual::Error) -> Self {
        match e {
            opsysdual::Error::Solver(m) => CliError::Undecided(m),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// Parses `argv` (program name first) and executes the command. Help and
/// version requests come back as `Usage` errors carrying the rendered text.
pub fn execute<I, S>(argv: I) -> Result<RunReport, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.render().to_string()))?;
    execute_cli(&cli)
}

pub fn execute_cli(cli: &Cli) -> Result<RunReport, CliError> {
    let g = &cli.global;
    if g.level == 0 {
        return Err(CliError::Invalid("--level must be at least 1".into()));
    }
    if !(g.tol.is_finite() && g.tol >= MIN_TOL) {
        return Err(CliError::Invalid(format!("--tol must be at least {MIN_TOL:e}")));
    }
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.command, g)?;
    output::finish(cli.command.name(), g, outcome, start.elapsed().as_secs_f64())
}

/// Entry point used by the binary: prints the report and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute_cli(&cli) {
        Ok(report) => {
            if cli.global.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", output::render_text(&report));
            }
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("{}", <Cli as clap::CommandFactory>::command().render_usage());
            }
            e.exit_code()
        }
    }
}
