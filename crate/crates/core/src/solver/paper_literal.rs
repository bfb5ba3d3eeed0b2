//! Verbatim iteration of the printed seven-state DFWCS difference equations.
//!
//! These equations do not conserve probability: the P1 update drops only the
//! covered outflow `l1*C*dt`, nothing receives it, and the repair terms are
//! multiplied by coverage. No correction is applied here; the mass lost or
//! gained on each step is reported instead.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::euler::march;
use super::{check_grid, linear_grid, SolveError, SolverConfig, Trajectory};
use crate::model::MarkovModel;

/// The (from, to) arcs of the DFWCS transition diagram.
const DFWCS_ARCS: [(u32, u32); 13] = [
    (1, 2),
    (1, 7),
    (2, 1),
    (2, 3),
    (2, 7),
    (3, 2),
    (3, 6),
    (3, 7),
    (4, 5),
    (4, 7),
    (5, 4),
    (5, 6),
    (5, 7),
];

/// Parameter names the equations read.
pub const PAPER_LITERAL_PARAMS: [&str; 6] = ["LAMBDA1", "LAMBDA2", "LAMBDA3", "LAMBDA4", "C", "MU"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperLiteralRates {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub coverage: f64,
    pub mu: f64,
}

impl PaperLiteralRates {
    /// Checks the model has the DFWCS structure and reads its parameters.
    pub fn from_model(model: &MarkovModel) -> Result<Self, SolveError> {
        let ids: Vec<u32> = model.states.iter().map(|s| s.id).collect();
        if ids != [1, 2, 3, 4, 5, 6, 7] {
            return Err(SolveError::ShapeMismatch(format!(
                "expected states 1..7 in order, found {ids:?}"
            )));
        }
        let arcs: Vec<(u32, u32)> = model.transitions.iter().map(|t| (t.from, t.to)).collect();
        let arc_set: BTreeSet<(u32, u32)> = arcs.iter().copied().collect();
        let expected: BTreeSet<(u32, u32)> = DFWCS_ARCS.into_iter().collect();
        if arcs.len() != DFWCS_ARCS.len() || arc_set != expected {
            return Err(SolveError::ShapeMismatch(format!(
                "expected the 13 DFWCS transitions, found {} transitions",
                arcs.len()
            )));
        }
        let mut vals = [0.0; 6];
        for (v, name) in vals.iter_mut().zip(PAPER_LITERAL_PARAMS) {
            *v = model
                .params
                .get(name)
                .ok_or_else(|| SolveError::ShapeMismatch(format!("missing parameter `{name}`")))?;
        }
        let [lambda1, lambda2, lambda3, lambda4, coverage, mu] = vals;
        Ok(PaperLiteralRates {
            lambda1,
            lambda2,
            lambda3,
            lambda4,
            coverage,
            mu,
        })
    }
}

/// One step of the printed update equations with step `dt` hours.
pub fn paper_literal_step(r: &PaperLiteralRates, p: &[f64], dt: f64) -> Vec<f64> {
    let (l1, l2, l3, l4, c, mu) = (r.lambda1, r.lambda2, r.lambda3, r.lambda4, r.coverage, r.mu);
    let u = 1.0 - c;
    let [p1, p2, p3, p4, p5, p6, p7] = [p[0], p[1], p[2], p[3], p[4], p[5], p[6]];
    alloc::vec![
        (1.0 - l1 * c * dt) * p1 + mu * dt * p2,
        (1.0 - (l2 + mu) * c * dt) * p2 + 2.0 * mu * dt * p3,
        (l2 * c * dt) * p2 + (1.0 - (l2 + 2.0 * mu) * c * dt) * p3,
        (1.0 - 2.0 * l3 * c * dt) * p4 + mu * dt * p5,
        2.0 * l3 * c * dt * p4 + (1.0 - (2.0 * l4 + mu) * c * dt) * p5,
        l2 * c * dt * p3 + 2.0 * l4 * c * dt * p5 + p6,
        l1 * u * dt * p1
            + l2 * u * dt * p2
            + l2 * u * dt * p3
            + 2.0 * l3 * u * dt * p4
            + 2.0 * l4 * u * dt * p5
            + p7,
    ]
}

/// Per-step `1 - sum(P)` of a paper-literal run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MassDefectReport {
    /// End time of each step, hours.
    pub step_times: Vec<f64>,
    pub defects: Vec<f64>,
}

impl MassDefectReport {
    pub fn max_abs(&self) -> f64 {
        self.defects.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Defect after the last step that ends at or before `t`, or 0 before the first step.
    pub fn at(&self, t: f64) -> f64 {
        self.step_times
            .iter()
            .rposition(|&s| s <= t + 1e-9)
            .map_or(0.0, |i| self.defects[i])
    }
}

/// Iterates the printed equations from the model's initial distribution every
/// `config.dt` hours up to `config.horizon`.
pub fn solve_paper_literal(
    model: &MarkovModel,
    config: &SolverConfig,
) -> Result<(Trajectory, MassDefectReport), SolveError> {
    config.check()?;
    let grid = linear_grid(0.0, config.horizon, config.dt);
    solve_paper_literal_grid(model, config, &grid)
}

pub fn solve_paper_literal_grid(
    model: &MarkovModel,
    config: &SolverConfig,
    grid: &[f64],
) -> Result<(Trajectory, MassDefectReport), SolveError> {
    config.check()?;
    check_grid(grid)?;
    let rates = PaperLiteralRates::from_model(model)?;
    let p0 = model.initial_vector();
    let mut report = MassDefectReport::default();
    let mut now = 0.0;
    let probs = march(&p0, config.dt, grid, |p, h| {
        let next = paper_literal_step(&rates, p, h);
        now += h;
        report.step_times.push(now);
        report.defects.push(1.0 - next.iter().sum::<f64>());
        next
    });
    Ok((
        Trajectory {
            times: grid.to_vec(),
            probs,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(c: f64) -> PaperLiteralRates {
        PaperLiteralRates {
            lambda1: 3.3e-6,
            lambda2: 3.3e-6,
            lambda3: 1e-6,
            lambda4: 1e-6,
            coverage: c,
            mu: 1.0 / 72.0,
        }
    }

    #[test]
    fn first_step_from_state_one() {
        let p = paper_literal_step(&rates(0.9), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        assert!((p[0] - (1.0 - 2.97e-6)).abs() < 1e-16);
        assert!((p[6] - 3.3e-7).abs() < 1e-21);
        assert_eq!(p[1], 0.0);
        let defect = 1.0 - p.iter().sum::<f64>();
        assert!((defect - 2.64e-6).abs() < 1e-15);
    }

    #[test]
    fn full_coverage_never_reaches_unsafe() {
        let r = rates(1.0);
        let mut p = alloc::vec![0.3, 0.2, 0.1, 0.2, 0.2, 0.0, 0.0];
        for _ in 0..1000 {
            p = paper_literal_step(&r, &p, 1.0);
            assert_eq!(p[6], 0.0);
        }
    }

    #[test]
    fn defect_lookup() {
        let rep = MassDefectReport {
            step_times: alloc::vec![1.0, 2.0],
            defects: alloc::vec![0.1, 0.2],
        };
        assert_eq!(rep.at(0.5), 0.0);
        assert_eq!(rep.at(1.0), 0.1);
        assert_eq!(rep.at(5.0), 0.2);
        assert_eq!(rep.max_abs(), 0.2);
    }
}
