//! Transient state-probability solvers.
//!
//! Three methods work on the conservative generator built by
//! [`crate::build_generator`]: uniformization (the default), a Padé
//! scaling-and-squaring matrix exponential, and forward Euler. A fourth,
//! [`solve_paper_literal`], iterates the seven printed DFWCS difference
//! equations verbatim, leak included, and reports how much mass they lose.

mod euler;
mod expm;
mod paper_literal;
mod uniformization;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::generator::{build_generator, GeneratorMatrix};
use crate::model::{MarkovModel, ModelError};

pub use euler::{solve_euler, solve_euler_grid};
pub use expm::{expm, DenseMatrix};
pub use paper_literal::{
    paper_literal_step, solve_paper_literal, solve_paper_literal_grid, MassDefectReport,
    PaperLiteralRates,
};
pub use uniformization::{poisson_window, PoissonWindow};

/// Hard cap on the number of uniformization terms.
pub const TERM_CAP: usize = 10_000_000;

/// Tolerance used when clamping generator-consistent outputs into `[0, 1]`.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Uniformization,
    MatrixExp,
    Euler,
    PaperLiteral,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Uniformization => "uniformization",
            Method::MatrixExp => "expm",
            Method::Euler => "euler",
            Method::PaperLiteral => "paper-literal",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Method::Uniformization,
            Method::MatrixExp,
            Method::Euler,
            Method::PaperLiteral,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }

    /// Whether the method conserves probability mass.
    pub fn is_generator_consistent(self) -> bool {
        self != Method::PaperLiteral
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Truncation tolerance for the Poisson series.
    pub eps: f64,
    /// Step size in hours for Euler and PaperLiteral.
    pub dt: f64,
    /// Hours.
    pub horizon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Uniformization,
            eps: 1e-12,
            dt: 1.0,
            horizon: crate::SIX_MONTHS_HOURS,
        }
    }
}

impl SolverConfig {
    pub fn with_method(method: Method) -> Self {
        SolverConfig {
            method,
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<(), SolveError> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(SolveError::InvalidConfig("eps must be positive"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolveError::InvalidConfig("dt must be positive"));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(SolveError::InvalidConfig("horizon must be non-negative"));
        }
        Ok(())
    }
}

/// State probabilities on a time grid (hours).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per time, in model state order.
    pub probs: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Probability of state index `i` across all rows.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.probs.iter().map(|row| row[i]).collect()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.probs.last().map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("time {0} must be finite and non-negative")]
    InvalidTime(f64),
    #[error("time grid must be strictly ascending")]
    GridNotAscending,
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("step dt = {dt} too large: dt * max exit rate = {product} >= 1")]
    StepTooLarge { dt: f64, product: f64 },
    #[error("model does not have the 7-state DFWCS structure: {0}")]
    ShapeMismatch(String),
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<(), SolveError> {
    for &t in grid {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(SolveError::InvalidTime(t));
        }
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolveError::GridNotAscending);
    }
    Ok(())
}

pub(crate) fn clamp_row(row: &mut [f64]) {
    for x in row {
        *x = x.clamp(0.0, 1.0);
    }
}

/// Probability vector at time `t` (hours).
pub fn solve_at(model: &MarkovModel, config: &SolverConfig, t: f64) -> Result<Vec<f64>, SolveError> {
    let traj = solve_grid(model, config, &[t])?;
    Ok(traj.probs.into_iter().next().unwrap_or_default())
}

/// Probability vectors at each grid time. Row `k` equals `solve_at(grid[k])`.
pub fn solve_grid(
    model: &MarkovModel,
    config: &SolverConfig,
    grid: &[f64],
) -> Result<Trajectory, SolveError> {
    config.check()?;
    check_grid(grid)?;
    if config.method == Method::PaperLiteral {
        return solve_paper_literal_grid(model, config, grid).map(|(traj, _)| traj);
    }
    let q = build_generator(model)?;
    let p0 = model.initial_vector();
    solve_generator_grid(&q, &p0, config, grid)
}

/// Same as [`solve_grid`] for an already built generator and initial vector.
/// Not available for [`Method::PaperLiteral`], which needs the symbolic model.
pub fn solve_generator_grid(
    q: &GeneratorMatrix,
    p0: &[f64],
    config: &SolverConfig,
    grid: &[f64],
) -> Result<Trajectory, SolveError> {
    config.check()?;
    check_grid(grid)?;
    if p0.len() != q.n() {
        return Err(SolveError::NumericFailure(alloc::format!(
            "initial vector has length {}, generator is {}x{}",
            p0.len(),
            q.n(),
            q.n()
        )));
    }
    let probs = match config.method {
        Method::Uniformization => uniformization::uniformized(q, p0, grid, config.eps)?,
        Method::MatrixExp => grid
            .iter()
            .map(|&t| expm::transient(q, p0, t))
            .collect::<Result<Vec<_>, _>>()?,
        Method::Euler => euler::euler_rows(q, p0, config.dt, grid)?,
        Method::PaperLiteral => {
            return Err(SolveError::InvalidConfig(
                "paper-literal mode needs the symbolic model",
            ))
        }
    };
    Ok(Trajectory {
        times: grid.to_vec(),
        probs,
    })
}

/// Evenly spaced grid `start, start + step, ...` up to and including `stop`
/// (within a 1e-9 relative step tolerance).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return if stop == start { vec![start] } else { Vec::new() };
    }
    let n = libm::floor((stop - start) / step + 1e-9) as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_generation() {
        let g = linear_grid(0.0, 4380.0, 20.0);
        assert_eq!(g.len(), 220);
        assert_eq!(*g.last().unwrap(), 4380.0);
        assert_eq!(linear_grid(0.0, 4380.0, 100.0).len(), 44);
        assert_eq!(linear_grid(5.0, 5.0, 1.0), vec![5.0]);
    }

    #[test]
    fn config_checks() {
        let mut c = SolverConfig::default();
        assert!(c.check().is_ok());
        c.dt = 0.0;
        assert!(c.check().is_err());
        c = SolverConfig::default();
        c.eps = -1.0;
        assert!(c.check().is_err());
    }

    #[test]
    fn grid_checks() {
        assert_eq!(check_grid(&[0.0, 0.0]), Err(SolveError::GridNotAscending));
        assert!(matches!(check_grid(&[-1.0]), Err(SolveError::InvalidTime(_))));
        assert!(check_grid(&[]).is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::Uniformization,
            Method::MatrixExp,
            Method::Euler,
            Method::PaperLiteral,
        ] {
            assert_eq!(Method::from_name(m.name()), Some(m));
        }
    }
}
