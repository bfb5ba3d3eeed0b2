//! Domain types for classified Markov reliability models.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Identifier of a state. Positive, unique within a model, and the ordering key.
pub type StateId = u32;

/// Failure mode classification of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateClass {
    Operational,
    FailOperational,
    FailSafe,
    FailUnsafe,
}

impl StateClass {
    pub const ALL: [StateClass; 4] = [
        StateClass::Operational,
        StateClass::FailOperational,
        StateClass::FailSafe,
        StateClass::FailUnsafe,
    ];

    /// The system still delivers its function in this class.
    pub fn is_up(self) -> bool {
        matches!(self, StateClass::Operational | StateClass::FailOperational)
    }

    /// Keyword used by the model language.
    pub fn keyword(self) -> &'static str {
        match self {
            StateClass::Operational => "operational",
            StateClass::FailOperational => "fail_operational",
            StateClass::FailSafe => "fail_safe",
            StateClass::FailUnsafe => "fail_unsafe",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        StateClass::ALL.into_iter().find(|c| c.keyword() == word)
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub id: StateId,
    pub label: String,
    pub class: StateClass,
}

impl State {
    pub fn new(id: StateId, label: impl Into<String>, class: StateClass) -> Self {
        State {
            id,
            label: label.into(),
            class,
        }
    }
}

/// Symbolic transition rate over named parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum RateExpr {
    Constant(f64),
    Param(String),
    Sum(Box<RateExpr>, Box<RateExpr>),
    Difference(Box<RateExpr>, Box<RateExpr>),
    Product(Box<RateExpr>, Box<RateExpr>),
}

impl RateExpr {
    pub fn constant(value: f64) -> Self {
        RateExpr::Constant(value)
    }

    pub fn param(name: impl Into<String>) -> Self {
        RateExpr::Param(name.into())
    }

    pub fn sum(lhs: RateExpr, rhs: RateExpr) -> Self {
        RateExpr::Sum(Box::new(lhs), Box::new(rhs))
    }

    pub fn difference(lhs: RateExpr, rhs: RateExpr) -> Self {
        RateExpr::Difference(Box::new(lhs), Box::new(rhs))
    }

    pub fn product(lhs: RateExpr, rhs: RateExpr) -> Self {
        RateExpr::Product(Box::new(lhs), Box::new(rhs))
    }

    /// Arithmetic value of the tree. No sign check; see [`evaluate_rate`].
    pub fn eval(&self, params: &ParameterSet) -> Result<f64, ModelError> {
        Ok(match self {
            RateExpr::Constant(v) => *v,
            RateExpr::Param(name) => params
                .get(name)
                .ok_or_else(|| ModelError::UnknownParameter(name.clone()))?,
            RateExpr::Sum(a, b) => a.eval(params)? + b.eval(params)?,
            RateExpr::Difference(a, b) => a.eval(params)? - b.eval(params)?,
            RateExpr::Product(a, b) => a.eval(params)? * b.eval(params)?,
        })
    }

    /// Names of all referenced parameters, in first-seen order.
    pub fn param_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            RateExpr::Constant(_) => {}
            RateExpr::Param(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            RateExpr::Sum(a, b) | RateExpr::Difference(a, b) | RateExpr::Product(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }
}

/// Evaluates a transition rate (per hour). Negative or non-finite results are errors.
pub fn evaluate_rate(expr: &RateExpr, params: &ParameterSet) -> Result<f64, ModelError> {
    let value = expr.eval(params)?;
    if !value.is_finite() {
        return Err(ModelError::NonFiniteRate(value));
    }
    if value < 0.0 {
        return Err(ModelError::NegativeRate(value));
    }
    Ok(value)
}

/// Named parameter values. Rates are per hour; coverages are dimensionless.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterSet {
    values: BTreeMap<String, f64>,
}

impl ParameterSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    /// Inserts or replaces a value, returning the previous one.
    pub fn set(&mut self, name: impl Into<String>, value: f64) -> Option<f64> {
        self.values.insert(name.into(), value)
    }

    /// Iterates in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for ParameterSet {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        ParameterSet {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

/// Annotation only; the solvers treat both kinds alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransitionKind {
    #[default]
    Failure,
    Repair,
}

impl TransitionKind {
    pub fn keyword(self) -> &'static str {
        match self {
            TransitionKind::Failure => "failure",
            TransitionKind::Repair => "repair",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    pub rate: RateExpr,
    pub kind: TransitionKind,
}

impl Transition {
    pub fn new(from: StateId, to: StateId, rate: RateExpr) -> Self {
        Transition {
            from,
            to,
            rate,
            kind: TransitionKind::Failure,
        }
    }

    pub fn repair(mut self) -> Self {
        self.kind = TransitionKind::Repair;
        self
    }
}

/// A classified continuous-time Markov reliability model.
///
/// Fields are public so models can be assembled programmatically; [`crate::validate`]
/// reports structural problems instead of the constructor rejecting them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarkovModel {
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
    pub params: ParameterSet,
    pub initial: BTreeMap<StateId, f64>,
    pub coverage_params: BTreeSet<String>,
    /// Analysis horizon in hours, from `option horizon`.
    pub horizon: Option<f64>,
}

impl MarkovModel {
    pub fn index_of(&self, id: StateId) -> Option<usize> {
        self.states.iter().position(|s| s.id == id)
    }

    pub fn state(&self, id: StateId) -> Option<&State> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Initial distribution as a dense vector in state order.
    pub fn initial_vector(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| self.initial.get(&s.id).copied().unwrap_or(0.0))
            .collect()
    }

    /// States sorted by id, transitions stably sorted by `(from, to)`.
    pub fn canonical(&self) -> MarkovModel {
        let mut m = self.clone();
        m.states.sort_by_key(|s| s.id);
        m.transitions.sort_by_key(|t| (t.from, t.to));
        m
    }

    /// Replaces a parameter value, enforcing the coverage domain for designated parameters.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        if !self.params.contains(name) {
            return Err(ModelError::UnknownParameter(name.into()));
        }
        check_param_value(name, value, self.coverage_params.contains(name))?;
        self.params.set(name, value);
        Ok(())
    }
}

pub(crate) fn check_param_value(name: &str, value: f64, coverage: bool) -> Result<(), ModelError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ModelError::InvalidParameter {
            name: name.into(),
            value,
        });
    }
    if coverage && value > 1.0 {
        return Err(ModelError::CoverageOutOfRange {
            name: name.into(),
            value,
        });
    }
    Ok(())
}

/// States with no outgoing transitions.
pub fn absorbing_states(model: &MarkovModel) -> BTreeSet<StateId> {
    model
        .states
        .iter()
        .map(|s| s.id)
        .filter(|id| !model.transitions.iter().any(|t| t.from == *id))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("transition rate evaluates to a negative value ({0})")]
    NegativeRate(f64),
    #[error("transition rate evaluates to a non-finite value ({0})")]
    NonFiniteRate(f64),
    #[error("parameter `{name}` = {value} must be finite and non-negative")]
    InvalidParameter { name: String, value: f64 },
    #[error("coverage parameter `{name}` = {value} lies outside [0, 1]")]
    CoverageOutOfRange { name: String, value: f64 },
    #[error("transition references undeclared state {0}")]
    UnknownState(StateId),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dfwcs_params() -> ParameterSet {
        [("LAMBDA1", 3.3e-6), ("C", 0.9)].into_iter().collect()
    }

    #[test]
    fn covered_rate() {
        let e = RateExpr::product(RateExpr::param("LAMBDA1"), RateExpr::param("C"));
        let v = evaluate_rate(&e, &dfwcs_params()).unwrap();
        assert!((v - 2.97e-6).abs() < 1e-20);
    }

    #[test]
    fn uncovered_fraction_at_full_coverage_is_zero() {
        let e = RateExpr::difference(RateExpr::constant(1.0), RateExpr::param("C"));
        let p: ParameterSet = [("C", 1.0)].into_iter().collect();
        assert_eq!(evaluate_rate(&e, &p).unwrap(), 0.0);
    }

    #[test]
    fn unresolved_param() {
        let err = evaluate_rate(&RateExpr::param("MU"), &dfwcs_params()).unwrap_err();
        assert_eq!(err, ModelError::UnknownParameter("MU".into()));
    }

    #[test]
    fn coverage_above_one_gives_negative_rate() {
        let e = RateExpr::difference(RateExpr::constant(1.0), RateExpr::param("C"));
        let p: ParameterSet = [("C", 1.2)].into_iter().collect();
        assert!(matches!(evaluate_rate(&e, &p), Err(ModelError::NegativeRate(_))));
    }

    #[test]
    fn absorbing() {
        let mut m = MarkovModel {
            states: alloc::vec![
                State::new(1, "A", StateClass::Operational),
                State::new(2, "B", StateClass::FailSafe),
            ],
            transitions: alloc::vec![Transition::new(1, 2, RateExpr::constant(0.5))],
            ..Default::default()
        };
        assert_eq!(absorbing_states(&m).into_iter().collect::<Vec<_>>(), [2]);
        m.transitions.push(Transition::new(2, 1, RateExpr::constant(0.5)));
        assert!(absorbing_states(&m).is_empty());
    }

    #[test]
    fn set_param_checks_coverage_domain() {
        let mut m = MarkovModel::default();
        m.params.set("C", 0.9);
        m.coverage_params.insert("C".into());
        assert!(matches!(
            m.set_param("C", 1.2),
            Err(ModelError::CoverageOutOfRange { .. })
        ));
        assert!(m.set_param("C", 1.0).is_ok());
        assert!(matches!(m.set_param("X", 1.0), Err(ModelError::UnknownParameter(_))));
    }
}
