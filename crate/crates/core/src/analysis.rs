//! Dependability metrics, coverage sweeps, requirement checks and result-table audits.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{MarkovModel, ModelError, StateClass};
use crate::solver::{solve_at, SolveError, SolverConfig, Trajectory};

/// Required reliability at the horizon (inclusive).
pub const RELIABILITY_TARGET: f64 = 0.99;
/// Maximum fail-unsafe probability at the horizon (inclusive).
pub const UNSAFE_LIMIT: f64 = 1e-3;

/// Band on `|R + Pfs - S|` for audited tables.
pub const AUDIT_IDENTITY_TOL: f64 = 1e-6;
/// Band on `|S + Pfu - 1|` for audited tables; loose enough for rounded transcriptions.
pub const AUDIT_TOTAL_TOL: f64 = 1e-3;

/// Class-aggregated probabilities at one time.
///
/// `reliability` sums operational and fail-operational states, `fail_safe` and
/// `fail_unsafe` sum their classes, and `safety = reliability + fail_safe`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependabilityMetrics {
    pub t: f64,
    pub reliability: f64,
    pub safety: f64,
    pub fail_safe: f64,
    pub fail_unsafe: f64,
}

impl DependabilityMetrics {
    /// `R = 1, Pfs = Pfu = 0`; identity of [`compose_independent`].
    pub fn perfect(t: f64) -> Self {
        DependabilityMetrics {
            t,
            reliability: 1.0,
            safety: 1.0,
            fail_safe: 0.0,
            fail_unsafe: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("distribution has {found} entries, model has {expected} states")]
    LengthMismatch { expected: usize, found: usize },
    #[error("metrics at different times ({0} h vs {1} h)")]
    TimeMismatch(f64, f64),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("{param} = {value}: {source}")]
    Domain {
        param: String,
        value: f64,
        source: ModelError,
    },
    #[error("{param} = {value}: {source}")]
    Solve {
        param: String,
        value: f64,
        source: SolveError,
    },
}

pub fn metrics(dist: &[f64], model: &MarkovModel, t: f64) -> Result<DependabilityMetrics, AnalysisError> {
    if dist.len() != model.states.len() {
        return Err(AnalysisError::LengthMismatch {
            expected: model.states.len(),
            found: dist.len(),
        });
    }
    let class_sum = |pred: &dyn Fn(StateClass) -> bool| -> f64 {
        model
            .states
            .iter()
            .zip(dist)
            .filter(|(s, _)| pred(s.class))
            .map(|(_, p)| p)
            .sum::<f64>()
            + 0.0
    };
    let reliability = class_sum(&|c| c.is_up());
    let fail_safe = class_sum(&|c| c == StateClass::FailSafe);
    let fail_unsafe = class_sum(&|c| c == StateClass::FailUnsafe);
    Ok(DependabilityMetrics {
        t,
        reliability,
        safety: reliability + fail_safe,
        fail_safe,
        fail_unsafe,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: DependabilityMetrics,
}

/// Solves one sweep point: `param` set to `value`, metrics at `t`.
pub fn sweep_row(
    model: &MarkovModel,
    param: &str,
    value: f64,
    t: f64,
    config: &SolverConfig,
) -> Result<SweepRow, AnalysisError> {
    let mut m = model.clone();
    m.set_param(param, value).map_err(|source| match source {
        ModelError::UnknownParameter(name) => AnalysisError::UnknownParameter(name),
        source => AnalysisError::Domain {
            param: param.into(),
            value,
            source,
        },
    })?;
    let solve_err = |source| AnalysisError::Solve {
        param: param.into(),
        value,
        source,
    };
    let dist = solve_at(&m, config, t).map_err(solve_err)?;
    let metrics = metrics(&dist, &m, t)?;
    Ok(SweepRow { value, metrics })
}

/// One independent solve per value, rows in ascending value order.
/// The first failing value aborts the sweep and is named in the error.
pub fn sweep(
    model: &MarkovModel,
    param: &str,
    values: &[f64],
    t: f64,
    config: &SolverConfig,
) -> Result<Vec<SweepRow>, AnalysisError> {
    if !model.params.contains(param) {
        return Err(AnalysisError::UnknownParameter(param.into()));
    }
    sorted_values(values)
        .into_iter()
        .map(|v| sweep_row(model, param, v, t, config))
        .collect()
}

/// Values in the order sweeps report them.
pub fn sorted_values(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequirementVerdict {
    pub reliability_ok: bool,
    pub unsafe_ok: bool,
    pub horizon: f64,
    pub reliability: f64,
    pub fail_unsafe: f64,
}

impl RequirementVerdict {
    pub fn all_ok(&self) -> bool {
        self.reliability_ok && self.unsafe_ok
    }
}

/// `R >= 0.99` and `Pfu <= 1e-3`, both inclusive.
pub fn check_requirements(m: &DependabilityMetrics) -> RequirementVerdict {
    RequirementVerdict {
        reliability_ok: m.reliability >= RELIABILITY_TARGET,
        unsafe_ok: m.fail_unsafe <= UNSAFE_LIMIT,
        horizon: m.t,
        reliability: m.reliability,
        fail_unsafe: m.fail_unsafe,
    }
}

/// One row of a reliability/safety table, computed or transcribed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub param: f64,
    pub reliability: f64,
    pub safety: f64,
    pub fail_safe: f64,
    pub fail_unsafe: f64,
}

impl From<&SweepRow> for TableRow {
    fn from(r: &SweepRow) -> Self {
        TableRow {
            param: r.value,
            reliability: r.metrics.reliability,
            safety: r.metrics.safety,
            fail_safe: r.metrics.fail_safe,
            fail_unsafe: r.metrics.fail_unsafe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditFinding {
    pub param: f64,
    /// `R + Pfs - S`.
    pub identity_defect: f64,
    /// `S + Pfu - 1`.
    pub total_defect: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub rows: Vec<AuditFinding>,
}

impl AuditReport {
    pub fn flagged(&self) -> impl Iterator<Item = &AuditFinding> {
        self.rows.iter().filter(|r| r.flagged)
    }

    pub fn is_clean(&self) -> bool {
        self.flagged().next().is_none()
    }
}

/// Checks `S = R + Pfs` and `S + Pfu = 1` on every row.
pub fn audit_table(rows: &[TableRow]) -> AuditReport {
    AuditReport {
        rows: rows
            .iter()
            .map(|r| {
                let identity_defect = r.reliability + r.fail_safe - r.safety;
                let total_defect = r.safety + r.fail_unsafe - 1.0;
                AuditFinding {
                    param: r.param,
                    identity_defect,
                    total_defect,
                    flagged: !(identity_defect.abs() <= AUDIT_IDENTITY_TOL
                        && total_defect.abs() <= AUDIT_TOTAL_TOL),
                }
            })
            .collect(),
    }
}

/// Metrics of two independent subsystems that must both be up (series) and
/// are unsafe if either is.
pub fn compose_independent(
    a: &DependabilityMetrics,
    b: &DependabilityMetrics,
) -> Result<DependabilityMetrics, AnalysisError> {
    if a.t != b.t {
        return Err(AnalysisError::TimeMismatch(a.t, b.t));
    }
    let reliability = a.reliability * b.reliability;
    let fail_unsafe = a.fail_unsafe + b.fail_unsafe - a.fail_unsafe * b.fail_unsafe;
    let safety = 1.0 - fail_unsafe;
    Ok(DependabilityMetrics {
        t: a.t,
        reliability,
        safety,
        fail_safe: safety - reliability,
        fail_unsafe,
    })
}

/// Plot-ready rows: time, per-state probabilities by label, then R, S, Pfs, Pfu.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn export_timeseries(traj: &Trajectory, model: &MarkovModel) -> Result<Table, AnalysisError> {
    let mut columns: Vec<String> = Vec::with_capacity(model.states.len() + 5);
    columns.push("time_hours".into());
    columns.extend(model.states.iter().map(|s| s.label.clone()));
    columns.extend(["R", "S", "Pfs", "Pfu"].map(String::from));
    let rows = traj
        .times
        .iter()
        .zip(&traj.probs)
        .map(|(&t, p)| {
            let m = metrics(p, model, t)?;
            let mut row = Vec::with_capacity(columns.len());
            row.push(t);
            row.extend_from_slice(p);
            row.extend([m.reliability, m.safety, m.fail_safe, m.fail_unsafe]);
            Ok(row)
        })
        .collect::<Result<_, AnalysisError>>()?;
    Ok(Table { columns, rows })
}
