//! Structural validation of a [`MarkovModel`].

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{check_param_value, evaluate_rate, MarkovModel, ModelError, StateClass, StateId};

/// Tolerance on `|1 - sum(initial)|`.
pub const INIT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Fatal,
}

/// What a finding is about; lets the parser attach source spans.
#[derive(Debug, Clone, PartialEq)]
pub enum Subject {
    Model,
    State(StateId),
    /// Index into `MarkovModel::transitions`.
    Transition(usize),
    Init(StateId),
    Param(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FindingKind {
    DuplicateStateId(StateId),
    InvalidStateId(StateId),
    EmptyLabel(StateId),
    SelfLoop(StateId),
    DanglingReference(StateId),
    InitUnknownState(StateId),
    InitOutOfRange { state: StateId, value: f64 },
    /// `1 - sum(initial)`.
    InitSumDefect(f64),
    UndeclaredCoverage(String),
    BadParameter(ModelError),
    BadRate(ModelError),
    Unreachable(Vec<StateId>),
    ExitFromFailState { state: StateId, class: StateClass },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    pub subject: Subject,
    pub kind: FindingKind,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Fatal => "error",
        };
        write!(f, "{tag}: ")?;
        match &self.kind {
            FindingKind::DuplicateStateId(id) => write!(f, "duplicate state id {id}"),
            FindingKind::InvalidStateId(id) => write!(f, "state id {id} is not positive"),
            FindingKind::EmptyLabel(id) => write!(f, "state {id} has an empty label"),
            FindingKind::SelfLoop(id) => write!(f, "self-loop on state {id}"),
            FindingKind::DanglingReference(id) => {
                write!(f, "dangling reference to undeclared state {id}")
            }
            FindingKind::InitUnknownState(id) => {
                write!(f, "initial distribution references undeclared state {id}")
            }
            FindingKind::InitOutOfRange { state, value } => {
                write!(f, "initial probability {value} of state {state} outside [0, 1]")
            }
            FindingKind::InitSumDefect(d) => {
                write!(f, "initial distribution sum defect {d:e} (sum = {})", 1.0 - d)
            }
            FindingKind::UndeclaredCoverage(name) => {
                write!(f, "coverage designation for undeclared parameter `{name}`")
            }
            FindingKind::BadParameter(e) => write!(f, "{e}"),
            FindingKind::BadRate(e) => {
                if let Subject::Transition(i) = self.subject {
                    write!(f, "transition #{}: {e}", i + 1)
                } else {
                    write!(f, "{e}")
                }
            }
            FindingKind::Unreachable(ids) => {
                write!(f, "states ")?;
                for (k, id) in ids.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{id}")?;
                }
                write!(f, " unreachable from the initial distribution")
            }
            FindingKind::ExitFromFailState { state, class } => {
                write!(f, "transition out of {class} state {state}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn has_fatal(&self) -> bool {
        self.fatal().next().is_some()
    }

    pub fn fatal(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Fatal)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
    }

    fn push(&mut self, severity: Severity, subject: Subject, kind: FindingKind) {
        self.findings.push(Finding {
            severity,
            subject,
            kind,
        });
    }
}

pub fn validate(model: &MarkovModel) -> ValidationReport {
    use Severity::*;
    let mut report = ValidationReport::default();

    let mut seen = BTreeSet::new();
    for s in &model.states {
        if s.id == 0 {
            report.push(Fatal, Subject::State(s.id), FindingKind::InvalidStateId(s.id));
        }
        if !seen.insert(s.id) {
            report.push(Fatal, Subject::State(s.id), FindingKind::DuplicateStateId(s.id));
        }
        if s.label.is_empty() {
            report.push(Fatal, Subject::State(s.id), FindingKind::EmptyLabel(s.id));
        }
    }

    for (name, value) in model.params.iter() {
        let coverage = model.coverage_params.contains(name);
        if let Err(e) = check_param_value(name, value, coverage) {
            report.push(Fatal, Subject::Param(name.into()), FindingKind::BadParameter(e));
        }
    }
    for name in &model.coverage_params {
        if !model.params.contains(name) {
            report.push(
                Fatal,
                Subject::Param(name.clone()),
                FindingKind::UndeclaredCoverage(name.clone()),
            );
        }
    }

    for (k, t) in model.transitions.iter().enumerate() {
        let subject = Subject::Transition(k);
        let mut endpoints_ok = true;
        for id in [t.from, t.to] {
            if !seen.contains(&id) {
                report.push(Fatal, subject.clone(), FindingKind::DanglingReference(id));
                endpoints_ok = false;
            }
        }
        if t.from == t.to {
            report.push(Fatal, subject.clone(), FindingKind::SelfLoop(t.from));
        }
        if let Err(e) = evaluate_rate(&t.rate, &model.params) {
            report.push(Fatal, subject.clone(), FindingKind::BadRate(e));
        }
        if endpoints_ok {
            if let Some(s) = model.state(t.from) {
                if matches!(s.class, StateClass::FailSafe | StateClass::FailUnsafe) {
                    report.push(
                        Warning,
                        subject,
                        FindingKind::ExitFromFailState {
                            state: s.id,
                            class: s.class,
                        },
                    );
                }
            }
        }
    }

    let mut sum = 0.0;
    for (&id, &p) in &model.initial {
        if !seen.contains(&id) {
            report.push(Fatal, Subject::Init(id), FindingKind::InitUnknownState(id));
        }
        if !(0.0..=1.0).contains(&p) {
            report.push(
                Fatal,
                Subject::Init(id),
                FindingKind::InitOutOfRange { state: id, value: p },
            );
        }
        sum += p;
    }
    let defect = 1.0 - sum;
    if !(defect.abs() <= INIT_SUM_TOL) {
        report.push(Fatal, Subject::Model, FindingKind::InitSumDefect(defect));
    }

    let unreachable = unreachable_states(model);
    if !unreachable.is_empty() {
        report.push(Warning, Subject::Model, FindingKind::Unreachable(unreachable));
    }

    report
}

/// States not reachable along transitions from the support of the initial distribution.
pub fn unreachable_states(model: &MarkovModel) -> Vec<StateId> {
    let mut reached: BTreeSet<StateId> = model
        .initial
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(&id, _)| id)
        .collect();
    let mut queue: VecDeque<StateId> = reached.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        for t in model.transitions.iter().filter(|t| t.from == s) {
            if reached.insert(t.to) {
                queue.push_back(t.to);
            }
        }
    }
    model
        .states
        .iter()
        .map(|s| s.id)
        .filter(|id| !reached.contains(id))
        .collect()
}
