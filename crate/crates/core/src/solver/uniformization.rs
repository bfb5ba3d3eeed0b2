use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{clamp_row, SolveError, TERM_CAP};
use crate::generator::GeneratorMatrix;

/// Normalized Poisson(`lambda_t`) weights on `[left, left + weights.len())`,
/// with the discarded tails bounded by `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWindow {
    pub left: usize,
    pub weights: Vec<f64>,
}

impl PoissonWindow {
    /// Last index with a weight (inclusive).
    pub fn right(&self) -> usize {
        self.left + self.weights.len() - 1
    }

    pub fn weight(&self, k: usize) -> Option<f64> {
        k.checked_sub(self.left)
            .and_then(|i| self.weights.get(i))
            .copied()
    }
}

/// Poisson weights computed outward from the mode, relative to a unit mode weight,
/// then normalized. Each tail is cut once its geometric bound drops below `eps / 2`.
pub fn poisson_window(lambda_t: f64, eps: f64) -> Result<PoissonWindow, SolveError> {
    if !(lambda_t >= 0.0 && lambda_t.is_finite()) {
        return Err(SolveError::NumericFailure(format!(
            "Poisson parameter {lambda_t} is not finite"
        )));
    }
    if lambda_t == 0.0 {
        return Ok(PoissonWindow {
            left: 0,
            weights: vec![1.0],
        });
    }
    let mode = libm::floor(lambda_t);
    if mode >= TERM_CAP as f64 {
        return Err(SolveError::NumericFailure(format!(
            "Poisson mode {mode} exceeds the {TERM_CAP}-term cap"
        )));
    }
    let mode = mode as usize;
    let half = eps / 2.0;

    let mut upper = vec![1.0];
    let mut w = 1.0;
    let mut k = mode;
    loop {
        let r = lambda_t / (k + 1) as f64;
        if r < 1.0 && w * r / (1.0 - r) <= half {
            break;
        }
        k += 1;
        if k > TERM_CAP {
            return Err(SolveError::NumericFailure(format!(
                "uniformization series needs more than {TERM_CAP} terms"
            )));
        }
        w *= r;
        upper.push(w);
    }

    let mut lower = Vec::new();
    let mut w = 1.0;
    let mut k = mode;
    while k > 0 {
        let rho = k as f64 / lambda_t;
        if rho < 1.0 && w * rho / (1.0 - rho) <= half {
            break;
        }
        w *= rho;
        k -= 1;
        lower.push(w);
    }

    let left = mode - lower.len();
    let mut weights: Vec<f64> = lower.into_iter().rev().chain(upper).collect();
    // Sum smallest-first on each side of the mode.
    let m = mode - left;
    let lo: f64 = weights[..m].iter().sum();
    let hi: f64 = weights[m..].iter().rev().sum();
    let total = lo + hi;
    for x in &mut weights {
        *x /= total;
    }
    Ok(PoissonWindow { left, weights })
}

/// `p(t) = sum_k Poisson(Lt; k) p0 P^k` with `P = I + Q/L`, `L = max |Q_ii|`.
/// Powers are shared across all grid times.
pub(crate) fn uniformized(
    q: &GeneratorMatrix,
    p0: &[f64],
    grid: &[f64],
    eps: f64,
) -> Result<Vec<Vec<f64>>, SolveError> {
    let n = q.n();
    let rate = q.max_exit_rate();
    if rate == 0.0 {
        return Ok(grid.iter().map(|_| p0.to_vec()).collect());
    }
    let windows = grid
        .iter()
        .map(|&t| poisson_window(rate * t, eps))
        .collect::<Result<Vec<_>, _>>()?;
    let last = windows.iter().map(PoissonWindow::right).max().unwrap_or(0);

    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = q.get(i, j) / rate;
        }
        p[i * n + i] += 1.0;
    }

    let mut acc = vec![vec![0.0; n]; grid.len()];
    let mut v = p0.to_vec();
    let mut next = vec![0.0; n];
    for k in 0..=last {
        for (w, a) in windows.iter().zip(acc.iter_mut()) {
            if let Some(wk) = w.weight(k) {
                for (ai, vi) in a.iter_mut().zip(&v) {
                    *ai += wk * vi;
                }
            }
        }
        if k == last {
            break;
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (nj, pij) in next.iter_mut().zip(&p[i * n..(i + 1) * n]) {
                *nj += vi * pij;
            }
        }
        core::mem::swap(&mut v, &mut next);
    }
    for row in &mut acc {
        clamp_row(row);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson_pmf(lt: f64, k: usize) -> f64 {
        libm::exp(-lt + k as f64 * libm::log(lt) - libm::lgamma(k as f64 + 1.0))
    }

    #[test]
    fn window_matches_pmf() {
        for &lt in &[0.3, 1.0, 7.5, 122.0, 2.6e4] {
            let w = poisson_window(lt, 1e-12).unwrap();
            let sum: f64 = w.weights.iter().sum();
            assert!((sum - 1.0).abs() < 1e-14);
            let mode = libm::floor(lt) as usize;
            let rel = (w.weight(mode).unwrap() - poisson_pmf(lt, mode)).abs() / poisson_pmf(lt, mode);
            assert!(rel < 1e-9, "lt={lt} rel={rel}");
            // Tails outside the window are below eps.
            if w.left > 0 {
                assert!(poisson_pmf(lt, w.left - 1) < 1e-12);
            }
            assert!(poisson_pmf(lt, w.right() + 1) < 1e-12);
        }
    }

    #[test]
    fn zero_rate_window() {
        let w = poisson_window(0.0, 1e-12).unwrap();
        assert_eq!((w.left, w.weights.as_slice()), (0, &[1.0][..]));
    }

    #[test]
    fn term_cap() {
        assert!(matches!(
            poisson_window(2e7, 1e-12),
            Err(SolveError::NumericFailure(_))
        ));
    }
}
