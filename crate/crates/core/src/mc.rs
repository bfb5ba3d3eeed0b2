//! Monte Carlo trajectory simulation, an independent check on the analytic solvers.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)`. Trials are split into fixed batches of
//! [`BATCH_SIZE`]; batch `b` runs on ChaCha stream `b`, so counts depend only on
//! `(model, t, trials, seed)` and not on how batches are scheduled.
//!
//! Uniforms take the top 53 bits of `next_u64`. Holding times are drawn by
//! inversion, `-ln(1 - u) / rate`; successors by a cumulative scan over the
//! outgoing rates in state order.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generator::build_generator;
use crate::model::{MarkovModel, ModelError, StateId};

pub const BATCH_SIZE: u64 = 1 << 16;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.5758293035489004;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("time {0} must be finite and non-negative")]
    InvalidTime(f64),
    #[error("initial distribution has no mass")]
    EmptyInitial,
}

/// Precomputed sampling tables for one model.
#[derive(Debug, Clone)]
pub struct Simulator {
    ids: Vec<StateId>,
    initial_cdf: Vec<f64>,
    exit: Vec<f64>,
    /// Per state: `(successor index, rate)` with positive rates.
    successors: Vec<Vec<(usize, f64)>>,
}

impl Simulator {
    pub fn new(model: &MarkovModel) -> Result<Self, SimError> {
        let q = build_generator(model)?;
        let n = q.n();
        let mut acc = 0.0;
        let initial_cdf: Vec<f64> = model
            .initial_vector()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(SimError::EmptyInitial);
        }
        let successors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && q.get(i, j) > 0.0)
                    .map(|j| (j, q.get(i, j)))
                    .collect()
            })
            .collect();
        Ok(Simulator {
            ids: q.ids().to_vec(),
            initial_cdf,
            exit: (0..n).map(|i| q.exit_rate(i)).collect(),
            successors,
        })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Batch sizes for `trials`, in batch order.
    pub fn batches(trials: u64) -> Vec<u64> {
        let full = trials / BATCH_SIZE;
        let rest = trials % BATCH_SIZE;
        let mut v = vec![BATCH_SIZE; full as usize];
        if rest > 0 {
            v.push(rest);
        }
        v
    }

    /// Per-state occupancy counts at `t` for one batch.
    pub fn run_batch(&self, t: f64, trials: u64, seed: u64, batch: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let mut counts = vec![0u64; self.n()];
        for _ in 0..trials {
            counts[self.trial(&mut rng, t)] += 1;
        }
        counts
    }

    fn trial(&self, rng: &mut ChaCha8Rng, t: f64) -> usize {
        let total = *self.initial_cdf.last().unwrap_or(&1.0);
        let u = uniform(rng) * total;
        let mut s = self
            .initial_cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or_else(|| self.last_supported());
        let mut now = 0.0;
        loop {
            let rate = self.exit[s];
            if rate <= 0.0 {
                return s;
            }
            now += -libm::log(1.0 - uniform(rng)) / rate;
            if now > t {
                return s;
            }
            let target = uniform(rng) * rate;
            let succ = &self.successors[s];
            let mut acc = 0.0;
            let mut next = succ[succ.len() - 1].0;
            for &(j, r) in succ {
                acc += r;
                if target < acc {
                    next = j;
                    break;
                }
            }
            s = next;
        }
    }

    fn last_supported(&self) -> usize {
        let mut prev = 0.0;
        let mut last = 0;
        for (i, &c) in self.initial_cdf.iter().enumerate() {
            if c > prev {
                last = i;
            }
            prev = c;
        }
        last
    }

    /// Builds the result from merged counts.
    pub fn finish(&self, t: f64, counts: Vec<u64>) -> SimulationResult {
        SimulationResult::from_counts(t, self.ids.clone(), counts)
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Adds `b` into `a` elementwise.
pub fn merge_counts(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub t: f64,
    pub trials: u64,
    pub ids: Vec<StateId>,
    pub counts: Vec<u64>,
    pub estimates: Vec<f64>,
    /// 99% normal-approximation half-widths with a `1/(2n)` continuity correction.
    pub half_widths: Vec<f64>,
}

impl SimulationResult {
    pub fn from_counts(t: f64, ids: Vec<StateId>, counts: Vec<u64>) -> Self {
        let trials: u64 = counts.iter().sum();
        let n = trials.max(1) as f64;
        let estimates: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let half_widths = estimates
            .iter()
            .map(|&p| Z99 * libm::sqrt(p * (1.0 - p) / n) + 0.5 / n)
            .collect();
        SimulationResult {
            t,
            trials,
            ids,
            counts,
            estimates,
            half_widths,
        }
    }

    /// Whether `p` lies in the confidence interval of state index `i`.
    pub fn contains(&self, i: usize, p: f64) -> bool {
        (p - self.estimates[i]).abs() <= self.half_widths[i]
    }
}

/// Runs all batches sequentially and merges their counts.
pub fn simulate(model: &MarkovModel, t: f64, trials: u64, seed: u64) -> Result<SimulationResult, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(SimError::InvalidTime(t));
    }
    let sim = Simulator::new(model)?;
    let mut counts = vec![0u64; sim.n()];
    for (b, size) in Simulator::batches(trials).into_iter().enumerate() {
        merge_counts(&mut counts, &sim.run_batch(t, size, seed, b as u64));
    }
    Ok(sim.finish(t, counts))
}
