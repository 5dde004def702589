//! Command-line front end: parses flags, loads the run configuration, dispatches a
//! command and writes its tables under the output directory.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand, ValueEnum};
use commands::Command;
use config::{Format, Overrides, ReplicateTarget, RunConfig};
use std::path::{Path, PathBuf};
use tangent_spde::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "tangent-spde",
    version,
    about = "Simulate fractional SPDE tangent fields on the sphere"
)]
pub struct Cli {
    /// JSON run configuration; the shipped default is used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Evaluation time.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Start time of the driving noise.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Spectral truncation degree.
    #[arg(long = "L", global = true)]
    pub l: Option<usize>,
    /// Decay exponent of the noise angular power spectrum.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Threshold for the Chebyshev tail check.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Replicate count of the selected command.
    #[arg(long, global = true)]
    pub replicates: Option<usize>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// Tabulate Mittag-Leffler functions and E*(t, z).
    Ml,
    /// Check the addition theorem, kernel trace and transform round trip.
    VshCheck,
    /// Sample the noise-driven solution pathwise.
    Sample,
    /// Sample the deterministic evolution of a random initial field.
    Cauchy,
    /// Sample initial field plus noise at the exact law.
    Combined,
    /// Covariance tensor between configured point pairs.
    Covariance,
    /// Decay rate of the truncation error in L.
    TruncationStudy,
    /// Temporal increment exponent and large-time bounds.
    IncrementStudy,
    /// Monte Carlo check of the Chebyshev tail bound.
    Chebyshev,
    /// Run the full invariant suite.
    Validate,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Ml => Command::Ml,
            Sub::VshCheck => Command::VshCheck,
            Sub::Sample => Command::Sample,
            Sub::Cauchy => Command::Cauchy,
            Sub::Combined => Command::Combined,
            Sub::Covariance => Command::Covariance,
            Sub::TruncationStudy => Command::TruncationStudy,
            Sub::IncrementStudy => Command::IncrementStudy,
            Sub::Chebyshev => Command::Chebyshev,
            Sub::Validate => Command::Validate,
        }
    }

    fn replicate_target(self) -> ReplicateTarget {
        match self {
            Sub::Sample | Sub::Cauchy | Sub::Combined => ReplicateTarget::Samples,
            Sub::Chebyshev => ReplicateTarget::Chebyshev,
            Sub::Validate => ReplicateTarget::FbmPaths,
            _ => ReplicateTarget::None,
        }
    }
}

/// Exit status for an error: 2 bad input, 3 inadmissible model, 4 numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Admissibility(_) => 3,
        Error::Divergent(_) => 4,
        e if e.is_numerical() => 4,
        _ => 2,
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::parse(
            &std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        )?,
        None => RunConfig::default_config(),
    };
    let o = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        t: cli.t,
        t0: cli.t0,
        l: cli.l,
        nu: cli.nu,
        eps: cli.eps,
        replicates: cli.replicates,
    };
    cfg.apply(&o, cli.command.replicate_target())?;
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a parsed invocation and returns the process exit status.
pub fn execute(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    let command = cli.command.command();
    let artifacts = commands::run(command, &cfg)?;
    let written =
        output::write_artifacts(&artifacts, command.name(), &cfg, Path::new(&cfg.output.dir))?;
    for p in written {
        println!("{}", p.display());
    }
    if !artifacts.passed {
        eprintln!("{}: check failed", command.name());
    }
    Ok(artifacts.passed)
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
