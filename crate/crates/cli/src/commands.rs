use std::path::Path;

use depmark_core::analysis::{sorted_values, sweep_row};
use depmark_core::lang::parse_unvalidated;
use depmark_core::mc::{merge_counts, Simulator};
use depmark_core::solver::{linear_grid, solve_paper_literal_grid};
use depmark_core::{
    audit_table, export_timeseries, solve_grid, validate, MarkovModel, Method, SolverConfig,
    TableRow, SIX_MONTHS_HOURS,
};
use rayon::prelude::*;

use crate::args::{AuditArgs, ModelArgs, SimulateArgs, SolveArgs, SolverArgs, SweepArgs};
use crate::error::{exit, CliError};
use crate::format::fmt_g;
use crate::report::{Cell, Report, RunManifest};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: Vec<u8>,
    /// Lines for stderr, such as validation warnings.
    pub notes: Vec<String>,
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_text(path: &Path, bytes: &[u8]) -> Result<MarkovModel, CliError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| CliError::Parse(format!("{}: not UTF-8: {e}", path.display())))?;
    parse_unvalidated(text).map_err(|errs| {
        let lines: Vec<String> = errs.0.iter().map(|e| format!("{}:{e}", path.display())).collect();
        CliError::Parse(lines.join("\n"))
    })
}

struct Loaded {
    model: MarkovModel,
    manifest: RunManifest,
    notes: Vec<String>,
}

/// Reads, parses, applies overrides, then validates.
fn load_model(command: &'static str, args: &ModelArgs) -> Result<Loaded, CliError> {
    let bytes = read_input(&args.file)?;
    let mut model = parse_text(&args.file, &bytes)?;
    for (name, value) in &args.overrides {
        model.set_param(name, *value)?;
    }
    let report = validate(&model);
    if report.has_fatal() {
        let lines: Vec<String> = report.fatal().map(|f| format!("{}: {f}", args.file.display())).collect();
        return Err(CliError::Domain(lines.join("\n")));
    }
    let notes = report
        .warnings()
        .map(|f| format!("{}: {f}", args.file.display()))
        .collect();
    let mut manifest = RunManifest::new(command, &args.file.display().to_string(), &bytes);
    manifest.overrides = args.overrides.clone();
    Ok(Loaded { model, manifest, notes })
}

fn solver_config(args: &SolverArgs, manifest: &mut RunManifest) -> SolverConfig {
    manifest.setting("method", args.method.name());
    match args.method {
        Method::Uniformization => manifest.setting("eps", fmt_g(args.eps)),
        Method::Euler | Method::PaperLiteral => manifest.setting("dt", fmt_g(args.dt)),
        Method::MatrixExp => {}
    }
    SolverConfig {
        method: args.method,
        eps: args.eps,
        dt: args.dt,
        ..Default::default()
    }
}

fn horizon(model: &MarkovModel, at: Option<f64>) -> f64 {
    at.or(model.horizon).unwrap_or(SIX_MONTHS_HOURS)
}

fn finish(report: Report, code: u8, notes: Vec<String>, format: crate::report::OutputFormat) -> Result<Outcome, CliError> {
    Ok(Outcome {
        code,
        stdout: report.render(format)?,
        notes,
    })
}

pub fn validate_cmd(file: &Path) -> Result<Outcome, CliError> {
    let bytes = read_input(file)?;
    let model = parse_text(file, &bytes)?;
    let report = validate(&model);
    let manifest = RunManifest::new("validate", &file.display().to_string(), &bytes);
    let mut out = Report::new(manifest, vec!["severity".into(), "finding".into()]);
    for f in &report.findings {
        let text = f.to_string();
        let (severity, message) = text.split_once(": ").unwrap_or(("", &text));
        out.rows.push(vec![Cell::Text(severity.into()), Cell::Text(message.into())]);
    }
    let code = if report.has_fatal() { exit::FINDING } else { exit::OK };
    finish(out, code, Vec::new(), Default::default())
}

pub fn solve_cmd(args: &SolveArgs) -> Result<Outcome, CliError> {
    let Loaded { model, mut manifest, mut notes } = load_model("solve", &args.model)?;
    let config = solver_config(&args.solver, &mut manifest);
    let times = match (args.grid, args.at) {
        (Some(g), _) => {
            manifest.setting("grid", g);
            linear_grid(g.start, g.stop, g.step)
        }
        (None, at) => {
            let t = horizon(&model, at);
            manifest.setting("at", fmt_g(t));
            vec![t]
        }
    };

    let (traj, defects) = if config.method == Method::PaperLiteral {
        let (traj, report) = solve_paper_literal_grid(&model, &config, &times)?;
        (traj, Some(report))
    } else {
        (solve_grid(&model, &config, &times)?, None)
    };
    let table = export_timeseries(&traj, &model)?;

    let mut columns = table.columns.clone();
    if defects.is_some() {
        columns.push("mass_defect".into());
    }
    let mut out = Report::new(manifest, columns);
    for row in &table.rows {
        let mut cells: Vec<Cell> = row.iter().map(|&x| Cell::Num(x)).collect();
        if let Some(d) = &defects {
            cells.push(Cell::Num(d.at(row[0])));
        }
        out.rows.push(cells);
    }
    if let Some(d) = &defects {
        out.summary.push(("max_abs_mass_defect", d.max_abs()));
        notes.push(format!(
            "paper-literal: max |1 - sum(P)| over {} steps = {}",
            d.defects.len(),
            fmt_g(d.max_abs())
        ));
    }
    finish(out, exit::OK, notes, args.output)
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<Outcome, CliError> {
    let Loaded { model, mut manifest, notes } = load_model("sweep", &args.model)?;
    if !model.params.contains(&args.param) {
        return Err(CliError::Usage(format!("unknown parameter `{}`", args.param)));
    }
    let config = solver_config(&args.solver, &mut manifest);
    let t = horizon(&model, args.at);
    let values = sorted_values(&args.values);
    manifest.setting("param", &args.param);
    manifest.setting(
        "values",
        values.iter().map(|v| fmt_g(*v)).collect::<Vec<_>>().join(","),
    );
    manifest.setting("at", fmt_g(t));

    let results: Vec<_> = values
        .par_iter()
        .map(|&v| sweep_row(&model, &args.param, v, t, &config))
        .collect();
    let mut out = Report::new(manifest, ["param", "R", "S", "Pfs", "Pfu"].map(String::from).to_vec());
    for r in results {
        let row = TableRow::from(&r?);
        out.rows.push(
            [row.param, row.reliability, row.safety, row.fail_safe, row.fail_unsafe]
                .map(Cell::Num)
                .to_vec(),
        );
    }
    finish(out, exit::OK, notes, args.output)
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let Loaded { model, mut manifest, notes } = load_model("simulate", &args.model)?;
    let t = horizon(&model, args.at);
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::Usage(format!("time {t} must be finite and non-negative")));
    }
    if args.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    manifest.setting("at", fmt_g(t));
    manifest.setting("trials", args.trials);
    manifest.setting("seed", args.seed);
    manifest.setting("rng", "chacha8");

    let sim = Simulator::new(&model)?;
    let batches: Vec<(u64, u64)> = Simulator::batches(args.trials)
        .into_iter()
        .enumerate()
        .map(|(b, size)| (b as u64, size))
        .collect();
    let per_batch: Vec<Vec<u64>> = batches
        .par_iter()
        .map(|&(b, size)| sim.run_batch(t, size, args.seed, b))
        .collect();
    let mut counts = vec![0u64; sim.n()];
    for c in &per_batch {
        merge_counts(&mut counts, c);
    }
    let result = sim.finish(t, counts);

    let columns = ["state", "label", "count", "estimate", "ci99_half_width"].map(String::from);
    let mut out = Report::new(manifest, columns.to_vec());
    for (i, state) in model.states.iter().enumerate() {
        out.rows.push(vec![
            Cell::Int(state.id.into()),
            Cell::Text(state.label.clone()),
            Cell::Int(result.counts[i]),
            Cell::Num(result.estimates[i]),
            Cell::Num(result.half_widths[i]),
        ]);
    }
    finish(out, exit::OK, notes, args.output)
}

const AUDIT_COLUMNS: [&str; 5] = ["param", "R", "S", "Pfs", "Pfu"];

/// Reads a reliability/safety table; `#` lines are comments.
pub fn read_table(path: &Path, bytes: &[u8]) -> Result<Vec<TableRow>, CliError> {
    let malformed = |msg: String| CliError::Usage(format!("{}: malformed table: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader.headers().map_err(|e| malformed(e.to_string()))?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(AUDIT_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| malformed(format!("missing column `{name}`")))?;
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let mut vals = [0.0; 5];
        for (v, (&i, name)) in vals.iter_mut().zip(idx.iter().zip(AUDIT_COLUMNS)) {
            let field = record.get(i).unwrap_or("");
            *v = field
                .parse()
                .map_err(|_| malformed(format!("row {}: {name} = `{field}` is not a number", n + 1)))?;
        }
        let [param, reliability, safety, fail_safe, fail_unsafe] = vals;
        rows.push(TableRow {
            param,
            reliability,
            safety,
            fail_safe,
            fail_unsafe,
        });
    }
    Ok(rows)
}

pub fn audit_cmd(args: &AuditArgs) -> Result<Outcome, CliError> {
    let bytes = read_input(&args.table)?;
    let rows = read_table(&args.table, &bytes)?;
    let report = audit_table(&rows);
    let manifest = RunManifest::new("audit", &args.table.display().to_string(), &bytes);
    let columns = ["param", "identity_defect", "total_defect", "flagged"].map(String::from);
    let mut out = Report::new(manifest, columns.to_vec());
    let mut notes = Vec::new();
    for f in &report.rows {
        out.rows.push(vec![
            Cell::Num(f.param),
            Cell::Num(f.identity_defect),
            Cell::Num(f.total_defect),
            Cell::Bool(f.flagged),
        ]);
        if f.flagged {
            notes.push(format!(
                "row param = {}: R + Pfs - S = {}, S + Pfu - 1 = {}",
                fmt_g(f.param),
                fmt_g(f.identity_defect),
                fmt_g(f.total_defect)
            ));
        }
    }
    let code = if report.is_clean() { exit::OK } else { exit::FINDING };
    finish(out, code, notes, args.output)
}
