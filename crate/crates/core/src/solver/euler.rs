use alloc::vec;
use alloc::vec::Vec;

use super::{check_grid, clamp_row, linear_grid, SolveError, SolverConfig, Trajectory};
use crate::generator::{build_generator, GeneratorMatrix};
use crate::model::MarkovModel;

/// Steps from `t = 0` through every grid time with step `dt`, shortening the
/// last step before a grid time so it is hit exactly. `step(p, h)` advances one step.
pub(crate) fn march<F>(p0: &[f64], dt: f64, grid: &[f64], mut step: F) -> Vec<Vec<f64>>
where
    F: FnMut(&[f64], f64) -> Vec<f64>,
{
    let mut rows = Vec::with_capacity(grid.len());
    let mut p = p0.to_vec();
    let mut now = 0.0;
    for &target in grid {
        let span = target - now;
        let full = libm::floor(span / dt + 1e-9) as usize;
        for _ in 0..full {
            p = step(&p, dt);
        }
        let rest = span - full as f64 * dt;
        if rest > 1e-9 * dt {
            p = step(&p, rest);
        }
        now = target;
        rows.push(p.clone());
    }
    rows
}

fn euler_step(q: &GeneratorMatrix, p: &[f64], h: f64) -> Vec<f64> {
    let n = q.n();
    let mut out = vec![0.0; n];
    for (i, &pi) in p.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            let m = if i == j { 1.0 + h * q.get(i, j) } else { h * q.get(i, j) };
            *o += pi * m;
        }
    }
    out
}

pub(crate) fn euler_rows(
    q: &GeneratorMatrix,
    p0: &[f64],
    dt: f64,
    grid: &[f64],
) -> Result<Vec<Vec<f64>>, SolveError> {
    let product = dt * q.max_exit_rate();
    if product >= 1.0 {
        return Err(SolveError::StepTooLarge { dt, product });
    }
    let mut rows = march(p0, dt, grid, |p, h| euler_step(q, p, h));
    for row in &mut rows {
        clamp_row(row);
    }
    Ok(rows)
}

/// Forward Euler `p <- p (I + Q dt)` on every step from 0 to `config.horizon`.
pub fn solve_euler(model: &MarkovModel, config: &SolverConfig) -> Result<Trajectory, SolveError> {
    config.check()?;
    let grid = linear_grid(0.0, config.horizon, config.dt);
    solve_euler_grid(model, config, &grid)
}

pub fn solve_euler_grid(
    model: &MarkovModel,
    config: &SolverConfig,
    grid: &[f64],
) -> Result<Trajectory, SolveError> {
    config.check()?;
    check_grid(grid)?;
    let q = build_generator(model)?;
    let probs = euler_rows(&q, &model.initial_vector(), config.dt, grid)?;
    Ok(Trajectory {
        times: grid.to_vec(),
        probs,
    })
}
