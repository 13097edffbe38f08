// SPDX-License-Identifier: Apache-2.0

//! Deterministic parallel Monte Carlo.
//!
//! Trials are cut into fixed batches; batch `b` draws from its own ChaCha8
//! stream `b` under the experiment seed, so results do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const BATCH: u64 = 1024;

pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs `f(rng, count)` once per batch and returns the results in batch order.
pub fn run_batches<A, F>(trials: u64, seed: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> A + Sync,
{
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH.min(trials - b * BATCH);
            f(&mut batch_rng(seed, b), count)
        })
        .collect()
}

/// Number of trials for which `trial` returns true.
pub fn count_successes<F>(trials: u64, seed: u64, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    run_batches(trials, seed, |rng, count| {
        (0..count).filter(|_| trial(rng)).count() as u64
    })
    .into_iter()
    .sum()
}

/// Binomial proportion with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub trials: u64,
    pub successes: u64,
}

impl Proportion {
    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// Standard error at the empirical estimate.
    pub fn sigma(&self) -> f64 {
        self.sigma_at(self.estimate())
    }

    /// Standard error if the true probability were `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// `estimate - 3 sigma <= bound`.
    pub fn respects_bound(&self, bound: f64) -> bool {
        self.estimate() - 3.0 * self.sigma() <= bound + 1e-12
    }

    /// `|estimate - p| <= 3 sigma(p)`.
    pub fn matches(&self, p: f64) -> bool {
        (self.estimate() - p).abs() <= 3.0 * self.sigma_at(p) + 1e-12
    }
}

/// Running mean and variance of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn sigma_mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}
