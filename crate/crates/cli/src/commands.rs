// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use zoned_ledger::lab::{self, Alphabet, TrialSummary};
use zoned_ledger::ledger::{storage_cost_formula, Block, ChainConfig, ChainState};
use zoned_ledger::mining::{mining_experiment, scheme_cost_comparison};
use zoned_ledger::recovery::recover_block;
use zoned_ledger::schedule::audit_coverage;

use crate::config::ExperimentConfig;
use crate::output::{fmt_f, Report, Table};
use crate::CliError;

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

fn cfg_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn chain_config(cfg: &ExperimentConfig) -> Result<ChainConfig, CliError> {
    let (n, m) = cfg.check_network()?;
    let chain = ChainConfig {
        n,
        m,
        block_bytes: cfg.block_bytes(),
        hash_width_bits: cfg.hash_width(),
        seed: cfg.seed()?,
    };
    chain.validate().map_err(cfg_err)?;
    Ok(chain)
}

#[derive(Serialize)]
struct SlotRecord {
    slot: u64,
    recovered: bool,
    unanimous: bool,
    slots_scanned: u64,
    eliminated: usize,
}

#[derive(Serialize)]
struct SimulateSummary {
    config: ChainConfig,
    blocks: u64,
    recovered: u64,
    chain_consistent: bool,
    hash_evals: u64,
    share_evals: u64,
    storage_bits_per_peer_block: u64,
    formula_bits_per_peer_block: f64,
    baseline_bits_per_peer_block: f64,
}

pub fn simulate(
    cfg: &ExperimentConfig,
    snapshot: Option<&Path>,
    report: &mut Report,
) -> Result<(), CliError> {
    let chain = chain_config(cfg)?;
    let blocks = cfg.blocks.unwrap_or(50);
    let mut rng = ChaCha8Rng::seed_from_u64(chain.seed);
    let mut state = ChainState::new(chain).map_err(cfg_err)?;
    for _ in 0..blocks {
        let block = Block::random(chain.block_bytes, &mut rng);
        state.commit_block(block, &mut rng).map_err(run_err)?;
    }
    let mut recovered = 0;
    for t in 0..blocks {
        let r = recover_block(&state, t, cfg.scan_limit).map_err(run_err)?;
        let ok = r.block().ok() == state.block(t).ok();
        recovered += u64::from(ok);
        report.record(
            "slot",
            &SlotRecord {
                slot: t,
                recovered: ok,
                unanimous: r.unanimous,
                slots_scanned: r.slots_scanned,
                eliminated: r.eliminated_peers.len(),
            },
        )?;
    }
    let measured = if blocks > 0 {
        state.storage_cost_measured(0, 0).map_err(run_err)?.total
    } else {
        0
    };
    let formula = storage_cost_formula(
        (8 * chain.block_bytes) as f64,
        chain.hash_width_bits as f64,
        chain.m,
    );
    let summary = SimulateSummary {
        config: chain,
        blocks,
        recovered,
        chain_consistent: state.verify_chain(),
        hash_evals: state.ops().hash_evals,
        share_evals: state.ops().share_evals,
        storage_bits_per_peer_block: measured,
        formula_bits_per_peer_block: formula.distributed,
        baseline_bits_per_peer_block: formula.baseline,
    };
    report.record("simulate", &summary)?;

    let mut t = Table::new(
        "simulate",
        &[
            "n",
            "m",
            "L",
            "blocks",
            "recovered",
            "storage bits",
            "formula",
            "baseline",
        ],
    );
    t.row(vec![
        chain.n.to_string(),
        chain.m.to_string(),
        chain.block_bytes.to_string(),
        blocks.to_string(),
        recovered.to_string(),
        measured.to_string(),
        fmt_f(formula.distributed),
        fmt_f(formula.baseline),
    ]);
    report.table(t);

    if let Some(path) = snapshot {
        let file = File::create(path)?;
        state
            .write_snapshot(BufWriter::new(file))
            .map_err(run_err)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    All,
    Hash,
    Zone,
    Consistent,
    Exposure,
    Dos,
    Leak,
}

fn summary_row(t: &mut Table, label: String, s: &TrialSummary) {
    t.row(vec![
        label,
        s.trials.to_string(),
        s.successes.to_string(),
        fmt_f(s.estimate),
        fmt_f(s.sigma),
        s.bound.map_or("-".into(), fmt_f),
        s.exact.map_or("-".into(), fmt_f),
    ]);
}

const SUMMARY_HEADER: [&str; 7] = [
    "case", "trials", "hits", "estimate", "sigma", "bound", "exact",
];

pub fn attack(
    cfg: &ExperimentConfig,
    scenario: Scenario,
    report: &mut Report,
) -> Result<(), CliError> {
    let (n, m) = cfg.check_network()?;
    let seed = cfg.seed()?;
    let trials = cfg.trials();
    let wants = |s: Scenario| scenario == Scenario::All || scenario == s;

    if wants(Scenario::Hash) {
        let mut t = Table::new("hash share rewrite", &SUMMARY_HEADER);
        for bits in [5, 64] {
            for corrupted in [m - 1, m] {
                match lab::hash_corruption_trial(m, bits, corrupted, trials, seed) {
                    Ok(s) => {
                        summary_row(&mut t, format!("{bits}-bit field, {corrupted}/{m}"), &s);
                        report.record_with(
                            "hash_corruption",
                            &[("field_bits", json!(bits)), ("corrupted", json!(corrupted))],
                            &s,
                        )?;
                    }
                    Err(lab::LabError::Config(_)) => continue,
                    Err(e) => return Err(run_err(e)),
                }
            }
        }
        report.table(t);
    }

    if wants(Scenario::Zone) {
        let mut t = Table::new("single zone rewrite", &SUMMARY_HEADER);
        for c in 0..=m {
            let s = lab::zone_corruption_trial(m, c, trials, seed).map_err(run_err)?;
            summary_row(&mut t, format!("c={c}"), &s);
            report.record_with("zone_corruption", &[("c", json!(c))], &s)?;
            let any = lab::zone_corruption_any_target_trial(m, c, trials, seed).map_err(run_err)?;
            summary_row(&mut t, format!("c={c}, any target"), &any);
            report.record_with("zone_corruption", &[("c", json!(c))], &any)?;
        }
        report.table(t);
    }

    if wants(Scenario::Consistent) && (n / m) % 2 == 0 {
        let zones = n / (2 * m);
        let mut t = Table::new("joint rewrite of half the zones", &SUMMARY_HEADER);
        for c in 0..=m {
            let per_zone = vec![c; zones];
            let s =
                lab::consistent_corruption_trial(n, m, &per_zone, trials, seed).map_err(run_err)?;
            summary_row(&mut t, format!("c={c} x{zones}"), &s);
            report.record_with(
                "consistent_corruption",
                &[("per_zone_c", json!(per_zone))],
                &s,
            )?;
        }
        report.table(t);
        if zones <= 3 {
            let search =
                lab::minimal_corruption_search(n, m, 0.1, trials, seed).map_err(run_err)?;
            let mut t = Table::new(
                "smallest total corruption with success >= 0.9",
                &["min total", "witness", "required", "holds"],
            );
            t.row(vec![
                search.min_total.map_or("-".into(), |v| v.to_string()),
                format!("{:?}", search.witness),
                fmt_f(search.required),
                search.holds.to_string(),
            ]);
            report.table(t);
            report.record("minimal_corruption_search", &search)?;
        }
    }

    if wants(Scenario::Exposure) {
        let layout = zoned_ledger::schedule::GroupLayout::new(n, m).map_err(cfg_err)?;
        let zones = layout.allocation_at(0).zones;
        let k = zones.len().div_ceil(2);
        let initial: BTreeSet<usize> = zones[..k].iter().flatten().copied().collect();
        let scan =
            lab::dynamic_exposure_scan(n, m, &initial, layout.period().max(1)).map_err(run_err)?;
        let mut t = Table::new(
            "required corruption as zones remix",
            &[
                "initial",
                "new per slot",
                "slots to full",
                "at least m each",
            ],
        );
        t.row(vec![
            scan.initial.to_string(),
            format!("{:?}", scan.new_per_slot),
            scan.slots_to_full.map_or("-".into(), |v| v.to_string()),
            scan.grows_by_whole_zones().to_string(),
        ]);
        report.table(t);
        report.record("exposure", &scan)?;
    }

    if wants(Scenario::Dos) {
        let d = lab::dos_scenario(n, m, cfg.block_bytes(), seed).map_err(run_err)?;
        let mut t = Table::new(
            "storage failures",
            &[
                "tolerance",
                "one lost per zone: unrecoverable",
                "all but one zone hit: recovered",
                "repaired",
            ],
        );
        t.row(vec![
            d.tolerance.to_string(),
            d.all_zones_hit_unrecoverable.to_string(),
            d.all_but_one_recovered.to_string(),
            d.repair_restores_all_zones.to_string(),
        ]);
        report.table(t);
        report.record("dos", &d)?;
    }

    if wants(Scenario::Leak) && m <= 4 {
        let mut t = Table::new(
            "leaked fragments, one-bit symbols",
            &[
                "leaked",
                "views",
                "uniform",
                "max deviation",
                "max candidates",
            ],
        );
        for leaked in 0..=m {
            let r = lab::confidentiality_probe(m, leaked, Alphabet::Bit).map_err(run_err)?;
            t.row(vec![
                leaked.to_string(),
                r.views.to_string(),
                r.posterior_uniform.map_or("-".into(), |u| u.to_string()),
                r.max_deviation.map_or("-".into(), fmt_f),
                r.max_candidates.map_or("-".into(), |c| c.to_string()),
            ]);
            report.record("confidentiality", &r)?;
        }
        report.table(t);
    }
    Ok(())
}

pub fn availability(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let (n, m) = cfg.check_network()?;
    let rho = cfg.check_rho()?;
    let seed = cfg.seed()?;
    let s = lab::availability_trial(n, m, rho, cfg.trials(), seed).map_err(run_err)?;
    let mut t = Table::new(
        "availability",
        &[
            "n",
            "m",
            "rho",
            "trials",
            "estimate",
            "exact",
            "3 sigma",
            "failure bound",
        ],
    );
    t.row(vec![
        n.to_string(),
        m.to_string(),
        fmt_f(rho),
        s.summary.trials.to_string(),
        fmt_f(s.summary.estimate),
        s.summary.exact.map_or("-".into(), fmt_f),
        fmt_f(3.0 * s.summary.sigma),
        fmt_f(s.failure_bound),
    ]);
    report.table(t);
    report.record("availability", &s)
}

pub fn mining(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let (n, m) = cfg.check_network()?;
    let seed = cfg.seed()?;
    let width = cfg.hash_width();
    if width == 0 || width > 64 {
        return Err(CliError::Config(format!(
            "--hash-width for mining must be in 1..=64, got {width}"
        )));
    }
    let fractions: Vec<f64> = match cfg.target_fraction {
        Some(f) => vec![f],
        None => (4..=12).map(|k| 2f64.powi(-k)).collect(),
    };
    let blocks = cfg.blocks.unwrap_or(20);
    let mut t = Table::new(
        "mining",
        &[
            "fraction",
            "runs",
            "mean tries",
            "sigma",
            "law",
            "scheme hashes",
            "share evals",
        ],
    );
    for (i, &f) in fractions.iter().enumerate() {
        let s = mining_experiment(width, f, 32, cfg.trials(), seed.wrapping_add(i as u64))
            .map_err(cfg_err)?;
        let c = scheme_cost_comparison(n, m, width, f, blocks, seed).map_err(run_err)?;
        t.row(vec![
            fmt_f(s.fraction),
            s.runs.to_string(),
            fmt_f(s.mean_tries),
            fmt_f(s.sigma_mean),
            fmt_f(s.law.expected_tries),
            fmt_f(c.scheme_hash_evals_per_block),
            fmt_f(c.scheme_share_evals_per_block),
        ]);
        report.record("mining", &s)?;
        report.record("cost_comparison", &c)?;
    }
    report.table(t);
    Ok(())
}

#[derive(Serialize)]
struct StorageRecord {
    m: usize,
    q_bits: u32,
    p_bits: u32,
    baseline: f64,
    distributed: f64,
    gain: f64,
    measured: Option<u64>,
}

pub fn storage_cost(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let m = cfg.m();
    if m == 0 {
        return Err(CliError::Config("--m must be positive".into()));
    }
    let q_bits = cfg.q_bits.unwrap_or(8 * cfg.block_bytes() as u32);
    let p_bits = cfg.p_bits.unwrap_or(cfg.hash_width());
    let f = storage_cost_formula(q_bits as f64, p_bits as f64, m);

    // measured on a one-zone chain when the sizes are representable
    let measured = if m.is_multiple_of(2) && q_bits.is_multiple_of(8 * m as u32) && q_bits > 0 {
        let chain = ChainConfig {
            n: m,
            m,
            block_bytes: q_bits as usize / 8,
            hash_width_bits: p_bits,
            seed: cfg.seed.unwrap_or(0),
        };
        match ChainState::new(chain) {
            Ok(mut state) => {
                let mut rng = ChaCha8Rng::seed_from_u64(chain.seed);
                state
                    .commit_block(Block::random(chain.block_bytes, &mut rng), &mut rng)
                    .map_err(run_err)?;
                Some(state.storage_cost_measured(0, 0).map_err(run_err)?.total)
            }
            Err(_) => None,
        }
    } else {
        None
    };

    let mut t = Table::new(
        "storage per peer per block (bits)",
        &[
            "m",
            "q bits",
            "p bits",
            "baseline",
            "distributed",
            "gain",
            "measured",
        ],
    );
    t.row(vec![
        m.to_string(),
        q_bits.to_string(),
        p_bits.to_string(),
        fmt_f(f.baseline),
        fmt_f(f.distributed),
        fmt_f(f.gain),
        measured.map_or("-".into(), |v| v.to_string()),
    ]);
    report.table(t);
    report.record(
        "storage_cost",
        &StorageRecord {
            m,
            q_bits,
            p_bits,
            baseline: f.baseline,
            distributed: f.distributed,
            gain: f.gain,
            measured,
        },
    )
}

pub fn coverage(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let (n, m) = cfg.check_network()?;
    let a = audit_coverage(n, m).map_err(cfg_err)?;
    let mut t = Table::new(
        "zone coverage",
        &[
            "n",
            "m",
            "period",
            "lower bound",
            "slots to cover",
            "partitions",
            "pairs once",
            "periodic",
        ],
    );
    t.row(vec![
        n.to_string(),
        m.to_string(),
        a.period.to_string(),
        a.lower_bound.to_string(),
        a.slots_to_cover.map_or("-".into(), |v| v.to_string()),
        a.partitions_valid.to_string(),
        a.group_pairs_once.to_string(),
        a.periodic.to_string(),
    ]);
    report.table(t);
    report.record("coverage", &a)
}
