use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use depmark_core::Method;

use crate::report::OutputFormat;

#[derive(Debug, Parser)]
#[command(name = "depmark", version, about = "Dependability analysis of Markov reliability models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and report findings.
    Validate {
        file: PathBuf,
    },
    /// State probabilities and dependability metrics at one time or on a grid.
    Solve(SolveArgs),
    /// Metrics at one time for each value of a parameter.
    Sweep(SweepArgs),
    /// Monte Carlo estimates with 99% confidence intervals.
    Simulate(SimulateArgs),
    /// Consistency check of a reliability/safety table.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file.
    pub file: PathBuf,
    /// Parameter override NAME=VALUE, applied before validation (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_override)]
    pub overrides: Vec<(String, f64)>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value = "uniformization", value_parser = parse_method)]
    pub method: Method,
    /// Poisson truncation tolerance (uniformization).
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Step size in hours (euler, paper-literal).
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Time in hours; defaults to the model horizon.
    #[arg(long, conflicts_with = "grid")]
    pub at: Option<f64>,
    /// Time grid START:STOP:STEP in hours, STOP inclusive.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub values: Vec<f64>,
    /// Time in hours; defaults to the model horizon.
    #[arg(long)]
    pub at: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Time in hours; defaults to the model horizon.
    #[arg(long)]
    pub at: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// CSV with columns param, R, S, Pfs, Pfu; `#` lines are comments.
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl std::fmt::Display for GridSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use crate::format::fmt_g;
        write!(f, "{}:{}:{}", fmt_g(self.start), fmt_g(self.stop), fmt_g(self.step))
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::from_name(s)
        .ok_or_else(|| format!("unknown method `{s}` (uniformization, expm, euler, paper-literal)"))
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format!("missing parameter name in `{s}`"));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", value.trim()))?;
    Ok((name.to_string(), value))
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("expected START:STOP:STEP, got `{s}`"));
    };
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number"));
    let g = GridSpec {
        start: num(start)?,
        stop: num(stop)?,
        step: num(step)?,
    };
    if !(g.step > 0.0 && g.step.is_finite()) {
        return Err("grid step must be positive".into());
    }
    if !(g.start >= 0.0 && g.stop >= g.start && g.stop.is_finite()) {
        return Err("grid needs 0 <= START <= STOP".into());
    }
    Ok(g)
}
