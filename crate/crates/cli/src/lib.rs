//! The `depmark` command line: validate, solve, sweep, simulate and audit.
//!
//! Exit codes: 0 success, 1 domain/validation/audit finding, 2 usage, parse
//! or I/O error, 3 numeric failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod report;

use clap::Parser;

pub use args::Cli;
pub use commands::Outcome;
pub use error::{exit, CliError};
pub use report::{OutputFormat, Report, RunManifest};

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    use args::Command::*;
    match &cli.command {
        Validate { file } => commands::validate_cmd(file),
        Solve(a) => commands::solve_cmd(a),
        Sweep(a) => commands::sweep_cmd(a),
        Simulate(a) => commands::simulate_cmd(a),
        Audit(a) => commands::audit_cmd(a),
    }
}

/// Parses `argv` and runs the command. Usage errors, `--help` and
/// `--version` come back as outcomes with clap's rendered text.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: exit::USAGE,
                    stdout: Vec::new(),
                    notes: vec![text.trim_end().to_string()],
                }
            } else {
                Outcome {
                    code: exit::OK,
                    stdout: text.into_bytes(),
                    notes: Vec::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: Vec::new(),
            notes: vec![format!("error: {e}")],
        },
    }
}
