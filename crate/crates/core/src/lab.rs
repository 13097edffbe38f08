// SPDX-License-Identifier: Apache-2.0

//! Adversary experiments.
//!
//! The adversary knows every plaintext block, the chain, and whatever the
//! peers it corrupted store. It does not know the trees of zones it has not
//! fully corrupted, so it commits to the fragment position it wants to alter
//! before the zone key is drawn.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cipher::{self, CipherError, CipherKey, Fragment};
use crate::field::{Field, FieldError};
use crate::schedule::{GroupLayout, ScheduleError};
use crate::sharing::{self, SecretShare, SharingError};
use crate::trials::{count_successes, Proportion};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Sharing(#[from] SharingError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, LabError> {
    Err(LabError::Config(msg.into()))
}

/// Outcome of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub experiment: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// Standard error at the estimate.
    pub sigma: f64,
    /// Analytic upper bound on the success probability.
    pub bound: Option<f64>,
    /// Exact success probability when it is known.
    pub exact: Option<f64>,
    pub seed: u64,
}

impl TrialSummary {
    pub fn new(
        experiment: &str,
        trials: u64,
        successes: u64,
        seed: u64,
        bound: Option<f64>,
        exact: Option<f64>,
    ) -> Self {
        let p = Proportion { trials, successes };
        Self {
            experiment: experiment.to_string(),
            trials,
            successes,
            estimate: p.estimate(),
            sigma: p.sigma(),
            bound,
            exact,
            seed,
        }
    }

    pub fn proportion(&self) -> Proportion {
        Proportion {
            trials: self.trials,
            successes: self.successes,
        }
    }

    /// `estimate - 3 sigma <= bound`; vacuous without a bound.
    pub fn within_bound(&self) -> bool {
        self.bound
            .is_none_or(|b| self.proportion().respects_bound(b))
    }

    /// Estimate within three standard errors of the exact value.
    pub fn matches_exact(&self) -> bool {
        self.exact.is_none_or(|p| self.proportion().matches(p))
    }
}

// ---------------------------------------------------------------- hash shares

/// Rewriting a hash shared `(m, m)` over `GF(q)`, `q` the largest prime below
/// `2^field_bits`, when the adversary controls `corrupted` of the `m` holders.
///
/// With `m - 1` holders the adversary knows the whole polynomial but not the
/// honest holder's abscissa. It guesses that abscissa uniformly among the
/// `q - m` unused nonzero points and adds `(H' - H)(1 - x / g)` to its own
/// shares, which moves the secret to `H'` exactly when the guess is right.
pub fn hash_corruption_trial(
    m: usize,
    field_bits: u32,
    corrupted: usize,
    trials: u64,
    seed: u64,
) -> Result<TrialSummary, LabError> {
    if m < 2 {
        return config_err("hash corruption needs m >= 2");
    }
    if corrupted + 1 < m || corrupted > m {
        return config_err("corrupted holders must be m - 1 or m");
    }
    let field = Field::largest_below_pow2(field_bits)?;
    let q = field.modulus();
    if q <= m as u64 + 1 {
        return config_err("field too small for m distinct nonzero abscissas");
    }
    let exact = if corrupted == m {
        1.0
    } else {
        1.0 / (q - m as u64) as f64
    };
    let successes = count_successes(trials, seed, |rng| {
        hash_corruption_once(&field, m, corrupted, rng)
    });
    Ok(TrialSummary::new(
        "hash_corruption",
        trials,
        successes,
        seed,
        Some(exact),
        Some(exact),
    ))
}

fn hash_corruption_once(field: &Field, m: usize, corrupted: usize, rng: &mut ChaCha8Rng) -> bool {
    let q = field.modulus();
    let h = field.elem(rng.gen_range(0..q));
    let target = field.add(h, field.elem(rng.gen_range(1..q)));
    let delta = field.sub(target, h);
    let shares = sharing::split(field, h, m, m, rng).expect("valid sharing parameters");
    let forged: Vec<SecretShare> = if corrupted == m {
        shares
            .iter()
            .map(|s| SecretShare {
                x: s.x,
                y: field.add(s.y, delta),
            })
            .collect()
    } else {
        // the last holder stays honest; abscissas are random so this is no loss
        let mut own: Vec<u64> = shares[..m - 1].iter().map(|s| s.x.value()).collect();
        own.sort_unstable();
        let mut g = rng.gen_range(0..q - m as u64) + 1;
        for &x in &own {
            if x <= g {
                g += 1;
            }
        }
        let g_inv = field.inv(field.elem(g)).expect("nonzero guess");
        let mut out: Vec<SecretShare> = shares[..m - 1]
            .iter()
            .map(|s| {
                let factor = field.sub(field.elem(1), field.mul(s.x, g_inv));
                SecretShare {
                    x: s.x,
                    y: field.add(s.y, field.mul(delta, factor)),
                }
            })
            .collect();
        out.push(shares[m - 1]);
        out
    };
    sharing::reconstruct(field, &forged, m).ok() == Some(target)
}

// ---------------------------------------------------------------- one zone

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `c(c-1) / (m(m-1))`, the chance that a random `c`-set of nodes contains a
/// fixed pair of nodes.
pub fn zone_corruption_bound(m: usize, c: usize) -> f64 {
    if m < 2 {
        return if c >= m { 1.0 } else { 0.0 };
    }
    (c * c.saturating_sub(1)) as f64 / (m * (m - 1)) as f64
}

/// Exact success probability of [`zone_corruption_trial`], averaged over
/// every rooted tree and target position. `None` for `m > 7`.
pub fn zone_corruption_exact(m: usize, c: usize) -> Option<BigRational> {
    if m == 0 || m > 7 || c > m {
        return None;
    }
    let total = binomial(m, c);
    let mut sum = BigUint::zero();
    let trees = cipher::all_rooted_trees(m);
    for tree in &trees {
        for j in 0..m {
            let mut need = tree.subtree(j);
            need.insert(tree.root());
            let s = need.len();
            if s <= c {
                sum += binomial(m - s, c - s);
            }
        }
    }
    let denom = total * BigUint::from(trees.len() * m);
    Some(BigRational::new(sum.into(), denom.into()))
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn zone_corruption_once(m: usize, c: usize, rng: &mut ChaCha8Rng) -> bool {
    let target = rng.gen_range(0..m);
    let key = CipherKey::sample(m, rng).expect("valid zone size");
    let corrupted: BTreeSet<usize> = sample(rng, m, c).into_iter().collect();
    cipher::corruption_oracle(&key, &corrupted, &BTreeSet::from([target]))
}

/// `c` of the `m` peers of one zone are corrupted at random; success when
/// they hold every codeword that must change to alter one fragment position
/// chosen before the key.
pub fn zone_corruption_trial(
    m: usize,
    c: usize,
    trials: u64,
    seed: u64,
) -> Result<TrialSummary, LabError> {
    if m == 0 || m > cipher::MAX_ZONE_SIZE || c > m {
        return config_err("need 1 <= m <= 255 and c <= m");
    }
    let successes = count_successes(trials, seed, |rng| zone_corruption_once(m, c, rng));
    Ok(TrialSummary::new(
        "zone_corruption",
        trials,
        successes,
        seed,
        Some(zone_corruption_bound(m, c)),
        zone_corruption_exact(m, c).as_ref().map(ratio_f64),
    ))
}

/// Like [`zone_corruption_trial`] but the adversary may pick any position
/// after seeing the key. Reported for contrast; not covered by the bound.
pub fn zone_corruption_any_target_trial(
    m: usize,
    c: usize,
    trials: u64,
    seed: u64,
) -> Result<TrialSummary, LabError> {
    if m == 0 || m > cipher::MAX_ZONE_SIZE || c > m {
        return config_err("need 1 <= m <= 255 and c <= m");
    }
    let successes = count_successes(trials, seed, |rng| {
        let key = CipherKey::sample(m, rng).expect("valid zone size");
        let corrupted: BTreeSet<usize> = sample(rng, m, c).into_iter().collect();
        (0..m).any(|j| cipher::corruption_oracle(&key, &corrupted, &BTreeSet::from([j])))
    });
    Ok(TrialSummary::new(
        "zone_corruption_any_target",
        trials,
        successes,
        seed,
        None,
        None,
    ))
}

// ---------------------------------------------------------------- many zones

/// `(2 sum(c) / n)^(n/m)`.
pub fn consistent_corruption_bound(n: usize, m: usize, per_zone_c: &[usize]) -> f64 {
    let total: usize = per_zone_c.iter().sum();
    (2.0 * total as f64 / n as f64).powf(n as f64 / m as f64)
}

fn attacked_zones(n: usize, m: usize) -> Result<usize, LabError> {
    crate::schedule::validate(n, m)?;
    if !(n / m).is_multiple_of(2) {
        return config_err("n/m must be even so that half the zones can be attacked");
    }
    Ok(n / (2 * m))
}

/// Independent zone attacks on `n / 2m` zones with the given corruption
/// counts; success when every one succeeds.
pub fn consistent_corruption_trial(
    n: usize,
    m: usize,
    per_zone_c: &[usize],
    trials: u64,
    seed: u64,
) -> Result<TrialSummary, LabError> {
    let zones = attacked_zones(n, m)?;
    if per_zone_c.len() != zones {
        return config_err(format!("expected {zones} per-zone corruption counts"));
    }
    if per_zone_c.iter().any(|&c| c > m) {
        return config_err("per-zone corruption exceeds m");
    }
    let exact = per_zone_c
        .iter()
        .map(|&c| zone_corruption_exact(m, c))
        .try_fold(BigRational::one(), |acc, p| p.map(|p| acc * p));
    let successes = count_successes(trials, seed, |rng| {
        per_zone_c.iter().all(|&c| zone_corruption_once(m, c, rng))
    });
    Ok(TrialSummary::new(
        "consistent_corruption",
        trials,
        successes,
        seed,
        Some(consistent_corruption_bound(n, m, per_zone_c)),
        exact.as_ref().map(ratio_f64),
    ))
}

/// Smallest total corruption reaching empirical success `>= 1 - epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalCorruption {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub min_total: Option<usize>,
    pub witness: Vec<usize>,
    /// `(n/2)(1 - epsilon)^(m/n)`.
    pub required: f64,
    pub holds: bool,
    pub results: Vec<TrialSummary>,
}

/// Tries every non-decreasing vector of per-zone counts in `0..=m`.
pub fn minimal_corruption_search(
    n: usize,
    m: usize,
    epsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<MinimalCorruption, LabError> {
    let zones = attacked_zones(n, m)?;
    if !(0.0..1.0).contains(&epsilon) {
        return config_err("epsilon must lie in [0, 1)");
    }
    let mut vectors = Vec::new();
    let mut current = Vec::with_capacity(zones);
    fn rec(lo: usize, m: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for c in lo..=m {
            cur.push(c);
            rec(c, m, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, m, zones, &mut current, &mut vectors);

    let mut results = Vec::with_capacity(vectors.len());
    let mut best: Option<(usize, Vec<usize>)> = None;
    for (i, v) in vectors.iter().enumerate() {
        let r = consistent_corruption_trial(n, m, v, trials, seed.wrapping_add(i as u64))?;
        let total: usize = v.iter().sum();
        if r.estimate >= 1.0 - epsilon && best.as_ref().is_none_or(|(t, _)| total < *t) {
            best = Some((total, v.clone()));
        }
        results.push(r);
    }
    let required = n as f64 / 2.0 * (1.0 - epsilon).powf(m as f64 / n as f64);
    let (min_total, witness) = match best {
        Some((t, w)) => (Some(t), w),
        None => (None, Vec::new()),
    };
    Ok(MinimalCorruption {
        n,
        m,
        epsilon,
        min_total,
        witness,
        required,
        holds: min_total.is_none_or(|t| t as f64 >= required),
        results,
    })
}

// ---------------------------------------------------------------- dynamics

/// Growth of the set of peers the adversary must control to keep a rewrite
/// consistent as the allocation changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExposureScan {
    pub n: usize,
    pub m: usize,
    pub initial: usize,
    /// New peers required at slots `1, 2, ...` until the whole network is.
    pub new_per_slot: Vec<usize>,
    pub required_after: Vec<usize>,
    pub slots_to_full: Option<u64>,
    /// Slots before exhaustion with fewer than `m` new peers.
    pub weak_slots: Vec<u64>,
}

impl ExposureScan {
    /// At least `m` new peers at every slot before exhaustion.
    pub fn grows_by_whole_zones(&self) -> bool {
        self.weak_slots.is_empty()
    }
}

/// Starting from peers corrupted to rewrite slot 0, every later zone that
/// contains a required peer must be controlled entirely.
pub fn dynamic_exposure_scan(
    n: usize,
    m: usize,
    initial: &BTreeSet<usize>,
    slots: u64,
) -> Result<ExposureScan, LabError> {
    let layout = GroupLayout::new(n, m)?;
    if initial.iter().any(|&p| p >= n) {
        return config_err("initial peer out of range");
    }
    let mut required = vec![false; n];
    for &p in initial {
        required[p] = true;
    }
    let mut count = initial.len();
    let mut scan = ExposureScan {
        n,
        m,
        initial: count,
        new_per_slot: Vec::new(),
        required_after: Vec::new(),
        slots_to_full: (count == n).then_some(0),
        weak_slots: Vec::new(),
    };
    for t in 1..=slots {
        if count == n {
            break;
        }
        let mut added = 0;
        for zone in layout.allocation_at(t).zones {
            if zone.iter().any(|&p| required[p]) {
                for p in zone {
                    if !required[p] {
                        required[p] = true;
                        added += 1;
                    }
                }
            }
        }
        count += added;
        scan.new_per_slot.push(added);
        scan.required_after.push(count);
        if added < m && count < n {
            scan.weak_slots.push(t);
        }
        if count == n {
            scan.slots_to_full = Some(t);
        }
    }
    Ok(scan)
}

// ---------------------------------------------------------------- availability

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilitySummary {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub summary: TrialSummary,
    /// `exp(-(1 - rho)^m n / m)`, an upper bound on the failure probability.
    pub failure_bound: f64,
    /// `(n/m)(1 - rho)^m`, an upper bound on the success probability.
    pub success_union_bound: f64,
}

impl AvailabilitySummary {
    pub fn failure_within_bound(&self) -> bool {
        let fail = Proportion {
            trials: self.summary.trials,
            successes: self.summary.trials - self.summary.successes,
        };
        fail.respects_bound(self.failure_bound)
    }
}

pub fn availability_exact(n: usize, m: usize, rho: f64) -> f64 {
    let zone_up = (1.0 - rho).powi(m as i32);
    1.0 - (1.0 - zone_up).powi((n / m) as i32)
}

/// Every peer is inactive independently with probability `rho`; a block is
/// recoverable when some zone of its slot has every member active.
pub fn availability_trial(
    n: usize,
    m: usize,
    rho: f64,
    trials: u64,
    seed: u64,
) -> Result<AvailabilitySummary, LabError> {
    let layout = GroupLayout::new(n, m)?;
    if !(0.0..1.0).contains(&rho) {
        return config_err("rho must lie in [0, 1)");
    }
    let allocations: Vec<_> = (0..layout.period().max(1))
        .map(|t| layout.allocation_at(t))
        .collect();
    let successes = count_successes(trials, seed, |rng| {
        let alloc = &allocations[rng.gen_range(0..allocations.len())];
        let active: Vec<bool> = (0..n).map(|_| !rng.gen_bool(rho)).collect();
        alloc.zones.iter().any(|z| z.iter().all(|&p| active[p]))
    });
    let zone_up = (1.0 - rho).powi(m as i32);
    let zones = (n / m) as f64;
    Ok(AvailabilitySummary {
        n,
        m,
        rho,
        summary: TrialSummary::new(
            "availability",
            trials,
            successes,
            seed,
            None,
            Some(availability_exact(n, m, rho)),
        ),
        failure_bound: (-zone_up * zones).exp(),
        success_union_bound: zones * zone_up,
    })
}

/// Peer outages the network survives, at most one per zone: `n / m`.
pub fn dos_tolerance(n: usize, m: usize) -> Result<usize, LabError> {
    crate::schedule::validate(n, m)?;
    Ok(n / m)
}

/// Scripted storage failures on a freshly committed chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DosScenario {
    pub n: usize,
    pub m: usize,
    pub tolerance: usize,
    /// One record erased in every zone: recovery reports no candidate.
    pub all_zones_hit_unrecoverable: bool,
    /// One record erased in all zones but one: the block still recovers.
    pub all_but_one_recovered: bool,
    /// After repairing the damaged zones from the intact one every zone
    /// decodes to the committed block again.
    pub repair_restores_all_zones: bool,
}

impl DosScenario {
    pub fn passed(&self) -> bool {
        self.all_zones_hit_unrecoverable
            && self.all_but_one_recovered
            && self.repair_restores_all_zones
    }
}

pub fn dos_scenario(
    n: usize,
    m: usize,
    block_bytes: usize,
    seed: u64,
) -> Result<DosScenario, LabError> {
    use crate::ledger::{Block, ChainConfig, ChainState};
    use crate::recovery::{recover_block, Outcome};
    use rand::SeedableRng;

    let tolerance = dos_tolerance(n, m)?;
    let config = ChainConfig {
        n,
        m,
        block_bytes,
        hash_width_bits: 64,
        seed,
    };
    let ledger_err = |e: crate::ledger::LedgerError| LabError::Config(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ChainState::new(config).map_err(ledger_err)?;
    let t = state
        .commit_block(Block::random(block_bytes, &mut rng), &mut rng)
        .map_err(ledger_err)?;
    let truth = state.block(t).map_err(ledger_err)?.clone();
    let zones = state.allocation(t).zones;
    let victim = |z: usize| zones[z][rng_index(seed, z, m)];

    let mut all_hit = state.clone();
    for z in 0..zones.len() {
        all_hit.erase_record(t, victim(z)).map_err(ledger_err)?;
    }
    let report = recover_block(&all_hit, t, None).map_err(|e| LabError::Config(e.to_string()))?;
    let all_zones_hit_unrecoverable = report.outcome == Outcome::Unrecoverable;

    let intact = zones.len() - 1;
    for z in 0..intact {
        state.erase_record(t, victim(z)).map_err(ledger_err)?;
    }
    let report = recover_block(&state, t, None).map_err(|e| LabError::Config(e.to_string()))?;
    let all_but_one_recovered = report.block().ok() == Some(&truth);
    for z in 0..intact {
        state.repair_zone(t, z, &mut rng).map_err(ledger_err)?;
    }
    let repair_restores_all_zones =
        (0..zones.len()).all(|z| state.open_zone(t, z).is_ok_and(|c| c.block == truth));
    Ok(DosScenario {
        n,
        m,
        tolerance,
        all_zones_hit_unrecoverable,
        all_but_one_recovered,
        repair_restores_all_zones,
    })
}

/// Member index erased in zone `z`, fixed by the seed.
fn rng_index(seed: u64, z: usize, m: usize) -> usize {
    let mut rng = crate::trials::batch_rng(seed, z as u64 + 1);
    rng.gen_range(0..m)
}

// ---------------------------------------------------------------- leaks

/// Fragment alphabet for the exhaustive leak analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// One-bit fragments, stored as `0x00` or `0xff`.
    Bit,
    /// One-byte fragments.
    Byte,
}

impl Alphabet {
    fn symbols(self) -> Vec<u8> {
        match self {
            Alphabet::Bit => vec![0x00, 0xff],
            Alphabet::Byte => (0..=255).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidentialityReport {
    pub m: usize,
    pub leaked: usize,
    pub alphabet: Alphabet,
    pub keys: u64,
    pub views: usize,
    /// For partial leaks: every plaintext position is uniform given every view.
    pub posterior_uniform: Option<bool>,
    /// Largest `|P(symbol | view) - 1/|alphabet||` over views and positions.
    pub max_deviation: Option<f64>,
    /// For a full leak: most distinct plaintexts consistent with one view.
    pub max_candidates: Option<usize>,
    pub key_count: u64,
}

/// Enumerates every key and every block, leaks the fragments of peers
/// `0..leaked` and tabulates what they reveal about the block.
pub fn confidentiality_probe(
    m: usize,
    leaked: usize,
    alphabet: Alphabet,
) -> Result<ConfidentialityReport, LabError> {
    let max_m = match alphabet {
        Alphabet::Bit => 4,
        Alphabet::Byte => 2,
    };
    if m == 0 || m > max_m {
        return config_err(format!(
            "exhaustive leak analysis supports 1 <= m <= {max_m} here"
        ));
    }
    if leaked > m {
        return config_err("cannot leak more fragments than the zone holds");
    }
    let symbols = alphabet.symbols();
    let a = symbols.len();
    let keys = cipher::all_keys(m);
    let blocks: Vec<Vec<u8>> = (0..a.pow(m as u32))
        .map(|code| {
            (0..m)
                .map(|i| symbols[code / a.pow(i as u32) % a])
                .collect()
        })
        .collect();

    let mut posterior: HashMap<Vec<Fragment>, Vec<Vec<u64>>> = HashMap::new();
    let mut candidates: HashMap<Vec<Fragment>, BTreeSet<usize>> = HashMap::new();
    let index_of = |byte: u8| {
        symbols
            .iter()
            .position(|&s| s == byte)
            .expect("alphabet symbol")
    };
    for key in &keys {
        for (b, block) in blocks.iter().enumerate() {
            let mut frags = cipher::encrypt(block, key)?;
            frags.truncate(leaked);
            if leaked == m {
                candidates.entry(frags).or_default().insert(b);
            } else {
                let counts = posterior
                    .entry(frags)
                    .or_insert_with(|| vec![vec![0; a]; m]);
                for (pos, &byte) in block.iter().enumerate() {
                    counts[pos][index_of(byte)] += 1;
                }
            }
        }
    }

    let (posterior_uniform, max_deviation, max_candidates, views) = if leaked == m {
        let max = candidates.values().map(BTreeSet::len).max().unwrap_or(0);
        (None, None, Some(max), candidates.len())
    } else {
        let mut dev: f64 = 0.0;
        let mut uniform = true;
        for counts in posterior.values() {
            for row in counts {
                let total: u64 = row.iter().sum();
                for &c in row {
                    uniform &= c * a as u64 == total;
                    dev = dev.max((c as f64 / total as f64 - 1.0 / a as f64).abs());
                }
            }
        }
        (Some(uniform), Some(dev), None, posterior.len())
    };
    Ok(ConfidentialityReport {
        m,
        leaked,
        alphabet,
        keys: keys.len() as u64,
        views,
        posterior_uniform,
        max_deviation,
        max_candidates,
        key_count: cipher::key_count(m).to_u64().unwrap_or(u64::MAX),
    })
}
