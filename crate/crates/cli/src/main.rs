//! `thetagenus`: lattice catalog checks, theta-coefficient windows and
//! standard-parameter analysis from the command line.

mod lattice;
mod param;
mod report;
mod theta;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use thetagenus::arthur::ArthurError;
use thetagenus::catalog::CatalogError;
use thetagenus::enumerate::{EnumError, MAX_VECTORS_ENV};
use thetagenus::param_syntax::ParseError;
use thetagenus::theta::ThetaError;
use thetagenus::{Catalog, EnumConfig};

use report::RunReport;

const PARAM_GRAMMAR: &str = "\
Parameter syntax (whitespace is ignored):
  param    := summand (\"+\" summand)*
  summand  := label (\"[\" d \"]\")?      d defaults to 1
  label    := \"1\" | \"D\" k (\".\" index)? flag?
  flag     := \"!0\" | \"!nz\"             force L(1/2) = 0 or != 0
Dk is the level-one eigenform of weight k; D24.2 picks the second of two.
Examples: \"1[7]+1\", \"D12[4]+1[7]+1\", \"D12!0[12]\"";

#[derive(Debug, Parser)]
#[command(
    name = "thetagenus",
    version,
    about = "Theta series of even unimodular lattices and standard parameters"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Worker threads for representation counting (default: all cores).
    #[arg(long, global = true, env = "THETA_THREADS")]
    threads: Option<usize>,
    /// Abort when a short-vector enumeration exceeds this many vectors.
    #[arg(long, global = true, env = "THETA_MAX_VECTORS")]
    max_vectors: Option<usize>,
    /// Read lattices from this catalog file instead of the built-in one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Omit the wall-time line so output is byte-identical across runs.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Print `key=value` lines instead of aligned tables.
    #[arg(long, global = true)]
    kv: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank, determinant, minimum, kissing number and root count checks.
    Lattice(lattice::LatticeArgs),
    /// Tables of representation numbers r_L(S) and their rank.
    #[command(subcommand)]
    Theta(theta::ThetaCommand),
    /// Validate, analyze or scan standard parameters.
    #[command(subcommand, after_help = PARAM_GRAMMAR)]
    Param(param::ParamCommand),
}

/// Shared state handed to every subcommand.
pub struct Session {
    pub catalog: Catalog,
    pub enum_config: EnumConfig,
}

/// The command line with execution-only flags removed, so the echo does not
/// depend on thread count or output mode.
fn command_echo() -> String {
    let mut out = vec!["thetagenus".to_string()];
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        match a.as_str() {
            "--threads" => {
                args.next();
            }
            "--deterministic" | "--kv" => {}
            _ if a.starts_with("--threads=") => {}
            _ if a.is_empty() || a.contains(|c: char| c.is_whitespace() || "\"'$".contains(c)) => {
                out.push(format!("{a:?}"))
            }
            _ => out.push(a),
        }
    }
    out.join(" ")
}

/// Exit status by error kind: 2 usage, 3 capacity, 4 validation, 1 other.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<EnumError>() {
            if matches!(e, EnumError::CapacityExceeded { .. }) {
                return 3;
            }
        }
        if let Some(e) = cause.downcast_ref::<ThetaError>() {
            return match e {
                ThetaError::Enumeration(EnumError::CapacityExceeded { .. }) => 3,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<CatalogError>() {
            return match e {
                CatalogError::UnknownName { .. } => 2,
                CatalogError::Enumeration(EnumError::CapacityExceeded { .. }) => 3,
                CatalogError::Io { .. } | CatalogError::Parse { .. } => 2,
                _ => 4,
            };
        }
        if cause.downcast_ref::<ParseError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<ArthurError>() {
            return match e {
                ArthurError::InvalidParameter(_) => 4,
                _ => 2,
            };
        }
        if cause.is::<param::ValidationFailed>() || cause.is::<lattice::CheckFailed>() {
            return 4;
        }
    }
    1
}

fn run(cli: Cli) -> Result<(RunReport, Option<anyhow::Error>)> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let catalog = match &cli.global.catalog {
        Some(path) => Catalog::load(path)?,
        None => Catalog::embedded().clone(),
    };
    let enum_config = match cli.global.max_vectors {
        Some(max_vectors) => {
            // cached lattice minima read the limit from the environment
            std::env::set_var(MAX_VECTORS_ENV, max_vectors.to_string());
            EnumConfig { max_vectors }
        }
        None => EnumConfig::default(),
    };
    let ctx = Session { catalog, enum_config };
    let mut report = RunReport::new(command_echo(), ctx.catalog.version());
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Lattice(args) => lattice::run(&ctx, args, &mut report),
        Command::Theta(cmd) => theta::run(&ctx, cmd, &mut report),
        Command::Param(cmd) => param::run(cmd, &mut report),
    };
    if !cli.global.deterministic {
        report.wall_time = Some(start.elapsed());
    }
    match outcome {
        Ok(()) => Ok((report, None)),
        // the report is still printed when a check fails
        Err(e) if e.is::<param::ValidationFailed>() || e.is::<lattice::CheckFailed>() => Ok((report, Some(e))),
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kv = cli.global.kv;
    match run(cli) {
        Ok((report, failure)) => {
            print!("{}", if kv { report.render_kv() } else { report.render() });
            match failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(exit_code(&e))
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
