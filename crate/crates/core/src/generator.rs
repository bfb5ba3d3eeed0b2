//! Dense generator (rate) matrix construction.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{evaluate_rate, MarkovModel, ModelError, StateId};

/// Dense `n x n` CTMC generator in the model's state order, rates per hour.
///
/// Off-diagonal entries are the summed rates of all transitions between the pair;
/// each diagonal entry is the negated sum of its row's off-diagonals, so rows sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    n: usize,
    entries: Vec<f64>,
    ids: Vec<StateId>,
}

impl GeneratorMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// State ids in row/column order.
    pub fn ids(&self) -> &[StateId] {
        &self.ids
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Total exit rate of a state, `-Q[i][i]`.
    pub fn exit_rate(&self, row: usize) -> f64 {
        -self.get(row, row)
    }

    /// `max_i |Q[i][i]|`, the uniformization rate.
    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }

    /// Row vector times matrix: `p * Q`.
    pub fn left_mul(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (o, q) in out.iter_mut().zip(self.row(i)) {
                *o += pi * q;
            }
        }
        out
    }
}

/// Builds the generator. Fails when a rate references an unknown parameter, evaluates
/// negative, or a transition endpoint is undeclared.
pub fn build_generator(model: &MarkovModel) -> Result<GeneratorMatrix, ModelError> {
    let n = model.states.len();
    let mut entries = vec![0.0; n * n];
    for t in &model.transitions {
        let i = model.index_of(t.from).ok_or(ModelError::UnknownState(t.from))?;
        let j = model.index_of(t.to).ok_or(ModelError::UnknownState(t.to))?;
        let rate = evaluate_rate(&t.rate, &model.params)?;
        if i != j {
            entries[i * n + j] += rate;
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| entries[i * n + j]).sum();
        entries[i * n + i] = -off;
    }
    Ok(GeneratorMatrix {
        n,
        entries,
        ids: model.states.iter().map(|s| s.id).collect(),
    })
}
