//! Command-line front end for `projkit`: scenario configs in, JSON reports
//! and CSV profiles out.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or a solver
//! gives up, 2 for configuration and usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_profile, cmd_project, cmd_solve_eq, cmd_verify, ProfileChoice};
pub use config::ScenarioConfig;
pub use error::CliError;
pub use report::{CheckReport, Status, VerifyReport};
pub use suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "projkit", version, about = "Verify metric-projection identities on scenario configs")]
pub struct Cli {
    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the seed from the config
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the projection of a point as a JSON array
    Project {
        config: PathBuf,
        /// Coordinates, space- or comma-separated
        #[arg(required = true, allow_negative_numbers = true, value_delimiter = ',')]
        point: Vec<f64>,
    },
    /// Run a verification suite and print the JSON report
    Verify {
        config: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Write a CSV profile
    Profile {
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: ProfileChoice,
    },
    /// Solve P(x) + λQ(x) = 0 with the config's potential
    SolveEq {
        config: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
    },
}

fn load(path: &std::path::Path, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    match &cli.command {
        Command::Project { config, point } => Ok((cmd_project(&load(config, cli.seed)?, point)?, 0)),
        Command::Verify { config, suite } => {
            let report = cmd_verify(&load(config, cli.seed)?, *suite)?;
            Ok((format::json(&report), report.exit_code()))
        }
        Command::Profile { config, kind } => Ok((cmd_profile(&load(config, cli.seed)?, *kind)?, 0)),
        Command::SolveEq { config, lambda } => cmd_solve_eq(&load(config, cli.seed)?, *lambda),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 2;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let result = execute(&cli).and_then(|(text, code)| {
        match &cli.out {
            Some(path) => std::fs::write(path, text.as_bytes())?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
