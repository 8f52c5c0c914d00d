use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use commands::Kind;
use config::{ConfigError, Overrides, RunConfig};
use output::emit;

/// Spectral analysis of the modulated Jacobi family b_n = c_n n^α, q_n = n^α.
#[derive(Debug, Parser)]
#[command(name = "jacobi", version)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Phase region of (c1, c2).
    Classify {
        #[arg(allow_negative_numbers = true)]
        c1: Option<f64>,
        #[arg(allow_negative_numbers = true)]
        c2: Option<f64>,
    },
    /// Exact Poincaré coefficients and β against their large-n expansions.
    Expand,
    /// Envelope scan, trapping, backward-limit certificates and sharpness.
    Kelley,
    /// Eigenvalues on the window by truncation and by shooting.
    Spectrum,
    /// Dump a solution of the recurrence as (n, sign, logmag) triples.
    Solve {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "first-kind")]
        kind: Kind,
        /// Two starting values (f1 f2 forward, f_m f_{m+1} backward).
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        seed: Option<Vec<f64>>,
        /// Check an earlier dump against the recurrence instead of solving.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Print the resolved configuration as key=value lines.
    Defaults,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_VERDICT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    use jacobi_core::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_VALIDATION;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::InvalidParameter(_)
            | E::OffCriticalBoundary { .. }
            | E::ZeroSeed
            | E::BelowAdmissible { .. },
        ) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.downcast_ref::<std::io::Error>()
        .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = RunConfig::load(&cli.overrides)?;
    let report = match cli.command {
        Command::Defaults => {
            print!("{}", cfg.to_lines()?);
            return Ok(true);
        }
        Command::Classify { c1, c2 } => {
            commands::classify(c1.unwrap_or(cfg.c1), c2.unwrap_or(cfg.c2))?
        }
        Command::Expand => commands::expand(&cfg)?,
        Command::Kelley => commands::kelley(&cfg)?,
        Command::Spectrum => commands::spectrum(&cfg)?,
        Command::Solve {
            lambda,
            kind,
            seed,
            verify,
        } => match verify {
            Some(path) => commands::verify_dump(&cfg, lambda, &path)?,
            None => commands::solve(&cfg, lambda, kind, seed.map(|s| (s[0], s[1])))?,
        },
    };
    emit(&cfg, &report)?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERDICT),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
