//! Command-line front end for the alphagate library.
//!
//! Exit codes: 0 success, 1 usage error, 2 input validation failure,
//! 3 runtime failure. Results go to stdout (or `--out`), diagnostics to stderr,
//! and nothing is written to the result stream unless the command succeeds.

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::commands::{execute, Env};
use crate::error::CliError;

pub const SEED_ENV: &str = "ALPHAGATE_SEED";

fn parse_env_seed(raw: Option<String>) -> Result<Option<u64>, CliError> {
    raw.map(|s| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| CliError::Validation(format!("{SEED_ENV} must be an unsigned 64-bit integer, got `{s}`")))
    })
    .transpose()
}

fn run_inner<I, T>(args: I, env_seed: Option<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(stdout, "{e}").map_err(|e| CliError::Runtime(e.to_string()))?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };

    let env = Env {
        seed: parse_env_seed(env_seed)?,
        default_threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let report = execute(&cli.command, &env)?;
    let rendered = report
        .table
        .render(cli.global.format, cli.global.precision as usize);

    for line in &report.diagnostics {
        let _ = writeln!(stderr, "{line}");
    }
    match &cli.global.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Runtime(format!("{}: cannot write: {e}", path.display()))),
        None => stdout
            .write_all(rendered.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, env_seed: Option<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run_inner(args, env_seed, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let prefix = match e {
                CliError::Usage(_) => "",
                _ => "error: ",
            };
            let _ = writeln!(stderr, "{prefix}{e}");
            e.exit_code()
        }
    }
}
