// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Experiment parameters shared by every subcommand. Each may come from the
/// JSON config file; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "snake_case")]
pub struct ExperimentConfig {
    /// Number of peers.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Zone size (even, divides n).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Block length in bytes (multiple of m).
    #[arg(long, global = true)]
    pub block_bytes: Option<usize>,
    /// Hash width in bits.
    #[arg(long, global = true)]
    pub hash_width: Option<u32>,
    /// RNG seed; required by every randomized subcommand.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials or mining runs.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Per-peer inactivity probability.
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Accepted share of the hash space for mining.
    #[arg(long, global = true)]
    pub target_fraction: Option<f64>,
    /// Slots past the target the recovery hash check may walk.
    #[arg(long, global = true)]
    pub scan_limit: Option<u64>,
    /// Write JSON lines here; the summary table then goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Committed blocks (simulate) or blocks per cost comparison (mining).
    #[arg(long, global = true)]
    pub blocks: Option<u64>,
    /// Block size in bits for storage-cost.
    #[arg(long, global = true)]
    pub q_bits: Option<u32>,
    /// Hash size in bits for storage-cost.
    #[arg(long, global = true)]
    pub p_bits: Option<u32>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config file {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            n: self.n.or(base.n),
            m: self.m.or(base.m),
            block_bytes: self.block_bytes.or(base.block_bytes),
            hash_width: self.hash_width.or(base.hash_width),
            seed: self.seed.or(base.seed),
            trials: self.trials.or(base.trials),
            rho: self.rho.or(base.rho),
            target_fraction: self.target_fraction.or(base.target_fraction),
            scan_limit: self.scan_limit.or(base.scan_limit),
            out: self.out.or(base.out),
            blocks: self.blocks.or(base.blocks),
            q_bits: self.q_bits.or(base.q_bits),
            p_bits: self.p_bits.or(base.p_bits),
        }
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(24)
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or(4)
    }

    pub fn block_bytes(&self) -> usize {
        self.block_bytes.unwrap_or(48)
    }

    pub fn hash_width(&self) -> u32 {
        self.hash_width.unwrap_or(64)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(10_000)
    }

    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or(0.1)
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::Config("--seed is required so that runs are reproducible".into())
        })
    }

    /// `m` even and at least 2, `n` a positive multiple of `m`.
    pub fn check_network(&self) -> Result<(usize, usize), CliError> {
        let (n, m) = (self.n(), self.m());
        zoned_ledger::schedule::validate(n, m).map_err(|e| CliError::Config(e.to_string()))?;
        Ok((n, m))
    }

    pub fn check_rho(&self) -> Result<f64, CliError> {
        let rho = self.rho();
        if !(0.0..1.0).contains(&rho) {
            return Err(CliError::Config(format!(
                "--rho must lie in [0, 1), got {rho}"
            )));
        }
        Ok(rho)
    }
}
