//! Transient dependability analysis of classified Markov reliability models.
//!
//! A model is a set of states, each classified as operational, fail-operational,
//! fail-safe or fail-unsafe, joined by transitions whose rates are symbolic
//! expressions over failure rates, detection coverages and repair rates. This
//! crate parses such models from text, builds the generator, solves for the
//! state probabilities at finite times, and reduces them to reliability and
//! safety figures.
//!
//! The crate is `no_std` and needs only `alloc`. File IO and the command line
//! live in the `depmark` crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod bundled;
pub mod generator;
pub mod lang;
pub mod mc;
pub mod model;
pub mod solver;
pub mod validate;

pub use analysis::{
    audit_table, check_requirements, compose_independent, export_timeseries, metrics, sweep,
    AuditReport, DependabilityMetrics, RequirementVerdict, SweepRow, TableRow,
};
pub use generator::{build_generator, GeneratorMatrix};
pub use lang::{parse, serialize, ParseError, ParseErrorKind, SourceSpan};
pub use mc::{simulate, SimulationResult};
pub use model::{
    absorbing_states, evaluate_rate, MarkovModel, ModelError, ParameterSet, RateExpr, State,
    StateClass, StateId, Transition, TransitionKind,
};
pub use solver::{
    solve_at, solve_euler, solve_grid, solve_paper_literal, Method, SolveError, SolverConfig,
    Trajectory,
};
pub use validate::{validate, ValidationReport};

/// Six months in hours (365 * 24 / 2), the default analysis horizon.
pub const SIX_MONTHS_HOURS: f64 = 4380.0;
