// SPDX-License-Identifier: Apache-2.0

//! Block retrieval by per-zone decoding, hash-consistency elimination along
//! the chain, and a vote among the surviving peers. Also the majority
//! retrieval of a fully replicated chain for comparison.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::{hash_step, Block, ChainState, HashValue, LedgerError, ZoneContents};

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("slot {0} has not been committed")]
    NoSuchSlot(u64),
    #[error("vote tied between {0} candidates")]
    Ambiguous(usize),
    #[error("no zone produced a candidate block")]
    Unrecoverable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Recovered { block: Block },
    Ambiguous { tied: Vec<Block> },
    Unrecoverable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub slot: u64,
    pub outcome: Outcome,
    /// Decoded block of every zone that could be opened.
    pub per_zone_candidates: BTreeMap<usize, Block>,
    pub eliminated_peers: BTreeSet<usize>,
    pub slots_scanned: u64,
    pub unanimous: bool,
    /// Surviving votes per candidate.
    pub votes: Vec<(Block, usize)>,
}

impl RecoveryReport {
    pub fn block(&self) -> Result<&Block, RecoveryError> {
        match &self.outcome {
            Outcome::Recovered { block } => Ok(block),
            Outcome::Ambiguous { tied } => Err(RecoveryError::Ambiguous(tied.len())),
            Outcome::Unrecoverable => Err(RecoveryError::Unrecoverable),
        }
    }
}

fn open_all(state: &ChainState, t: u64) -> Vec<Option<ZoneContents>> {
    (0..state.config().zone_count())
        .map(|z| state.open_zone(t, z).ok())
        .collect()
}

/// Plurality winner; `Err` carries the tied leaders.
fn plurality<I: IntoIterator<Item = Block>>(
    ballots: I,
) -> (Result<Block, Vec<Block>>, Vec<(Block, usize)>) {
    let mut counts: BTreeMap<Block, usize> = BTreeMap::new();
    for b in ballots {
        *counts.entry(b).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    let mut leaders: Vec<Block> = counts
        .iter()
        .filter(|&(_, &c)| c == best)
        .map(|(b, _)| b.clone())
        .collect();
    let votes = counts.into_iter().collect();
    if leaders.len() == 1 {
        (Ok(leaders.pop().unwrap()), votes)
    } else {
        (Err(leaders), votes)
    }
}

/// Recovers block `t`. `scan_limit` bounds how many slots past `t` the hash
/// check walks; `None` walks the whole suffix.
pub fn recover_block(
    state: &ChainState,
    t: u64,
    scan_limit: Option<u64>,
) -> Result<RecoveryReport, RecoveryError> {
    if t >= state.len() {
        return Err(RecoveryError::NoSuchSlot(t));
    }
    let n = state.config().n;
    let zone_of_t = state.allocation(t).zone_of_peers();
    let opened = open_all(state, t);
    let per_zone_candidates: BTreeMap<usize, Block> = opened
        .iter()
        .enumerate()
        .filter_map(|(z, c)| c.as_ref().map(|c| (z, c.block.clone())))
        .collect();

    let candidate_of = |peer: usize| per_zone_candidates.get(&zone_of_t[peer]);
    let survivors_agree = |eliminated: &BTreeSet<usize>| {
        let mut alive = (0..n)
            .filter(|p| !eliminated.contains(p))
            .filter_map(candidate_of);
        match alive.next() {
            Some(first) => alive.all(|b| b == first),
            None => true,
        }
    };

    let mut eliminated = BTreeSet::new();
    let mut slots_scanned = 0;
    let unanimous = survivors_agree(&eliminated);

    if !unanimous && state.len() >= 2 {
        let last = state.len() - 2;
        let end = match scan_limit {
            Some(limit) => last.min(t.saturating_add(limit)),
            None => last,
        };
        let mut tau = t;
        let mut current = opened;
        while tau <= end {
            let next = open_all(state, tau + 1);
            let recomputed: Vec<Option<HashValue>> = current
                .iter()
                .map(|c| {
                    c.as_ref()
                        .map(|c| hash_step(&c.prev_hash, c.block.as_bytes()))
                })
                .collect();
            let zone_now = state.allocation(tau).zone_of_peers();
            let zone_next = state.allocation(tau + 1).zone_of_peers();
            for peer in 0..n {
                if let (Some(h), Some(stored)) =
                    (&recomputed[zone_now[peer]], &next[zone_next[peer]])
                {
                    if h != &stored.prev_hash {
                        eliminated.insert(peer);
                    }
                }
            }
            slots_scanned += 1;
            if survivors_agree(&eliminated) {
                break;
            }
            current = next;
            tau += 1;
        }
    }

    let ballots = (0..n)
        .filter(|p| !eliminated.contains(p))
        .filter_map(candidate_of)
        .cloned();
    let (winner, votes) = plurality(ballots);
    let outcome = match winner {
        Ok(block) => Outcome::Recovered { block },
        Err(tied) if tied.is_empty() => Outcome::Unrecoverable,
        Err(tied) => Outcome::Ambiguous { tied },
    };
    Ok(RecoveryReport {
        slot: t,
        outcome,
        per_zone_candidates,
        eliminated_peers: eliminated,
        slots_scanned,
        unanimous,
        votes,
    })
}

/// Every peer keeps a full copy of every block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicatedChain {
    copies: Vec<Vec<Block>>,
}

impl ReplicatedChain {
    pub fn new(n: usize) -> Self {
        Self {
            copies: vec![Vec::new(); n],
        }
    }

    pub fn peers(&self) -> usize {
        self.copies.len()
    }

    pub fn len(&self) -> u64 {
        self.copies.first().map_or(0, |c| c.len() as u64)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn commit(&mut self, block: &Block) -> u64 {
        for copy in &mut self.copies {
            copy.push(block.clone());
        }
        self.len() - 1
    }

    pub fn set_copy(&mut self, peer: usize, t: u64, block: Block) -> Result<(), LedgerError> {
        let slot = self
            .copies
            .get_mut(peer)
            .and_then(|c| c.get_mut(t as usize))
            .ok_or(LedgerError::NoSuchSlot(t))?;
        *slot = block;
        Ok(())
    }
}

/// Majority over the `n` full copies of block `t`.
pub fn recover_baseline(chain: &ReplicatedChain, t: u64) -> Result<Block, RecoveryError> {
    if t >= chain.len() {
        return Err(RecoveryError::NoSuchSlot(t));
    }
    let (winner, _) = plurality(chain.copies.iter().map(|c| c[t as usize].clone()));
    winner.map_err(|tied| RecoveryError::Ambiguous(tied.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::ChainConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn build(n: usize, m: usize, blocks: usize, seed: u64) -> (ChainState, ChaCha8Rng) {
        let cfg = ChainConfig {
            n,
            m,
            block_bytes: 2 * m,
            hash_width_bits: 64,
            seed,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = ChainState::new(cfg).unwrap();
        for _ in 0..blocks {
            let b = Block::random(cfg.block_bytes, &mut rng);
            state.commit_block(b, &mut rng).unwrap();
        }
        (state, rng)
    }

    fn forged(state: &ChainState, t: u64) -> Block {
        let mut b = state.block(t).unwrap().clone();
        b.0[0] ^= 0x5a;
        b
    }

    #[test]
    fn honest_chain_recovers_unanimously() {
        let (state, _) = build(12, 4, 5, 1);
        for t in 0..5 {
            let r = recover_block(&state, t, None).unwrap();
            assert!(r.unanimous);
            assert_eq!(r.slots_scanned, 0);
            assert!(r.eliminated_peers.is_empty());
            assert_eq!(r.block().unwrap(), state.block(t).unwrap());
            assert_eq!(r.per_zone_candidates.len(), 3);
        }
        assert!(matches!(
            recover_block(&state, 5, None),
            Err(RecoveryError::NoSuchSlot(5))
        ));
    }

    #[test]
    fn scan_eliminates_half_the_zones_rewritten_at_one_slot() {
        // 6 zones, 3 rewritten: the vote alone would tie
        let (mut state, mut rng) = build(24, 4, 6, 2);
        let t = 2;
        let bad = forged(&state, t);
        let prev = state.prev_hash(t).unwrap().clone();
        for z in 0..3 {
            state.encode_zone(t, z, &bad, &prev, &mut rng).unwrap();
        }
        // a zero limit still checks slot t against slot t + 1
        let short = recover_block(&state, t, Some(0)).unwrap();
        assert!(!short.unanimous);
        assert_eq!(short.slots_scanned, 1);
        assert_eq!(short.block().unwrap(), state.block(t).unwrap());

        let r = recover_block(&state, t, None).unwrap();
        assert_eq!(r.block().unwrap(), state.block(t).unwrap());
        assert_eq!(r.slots_scanned, 1);
        let alloc = state.allocation(t);
        let expected: BTreeSet<usize> = alloc.zones[..3].iter().flatten().copied().collect();
        assert_eq!(r.eliminated_peers, expected);
    }

    #[test]
    fn consistent_rewrite_of_every_zone_is_accepted() {
        let (mut state, mut rng) = build(8, 4, 4, 3);
        let t = 3;
        let bad = forged(&state, t);
        let prev = state.prev_hash(t).unwrap().clone();
        for z in 0..2 {
            state.encode_zone(t, z, &bad, &prev, &mut rng).unwrap();
        }
        let r = recover_block(&state, t, None).unwrap();
        assert!(r.unanimous);
        assert_eq!(r.block().unwrap(), &bad);
    }

    #[test]
    fn erased_zone_contributes_no_candidate() {
        let (mut state, _) = build(12, 4, 2, 4);
        let alloc = state.allocation(0);
        state.erase_record(0, alloc.zones[1][0]).unwrap();
        let r = recover_block(&state, 0, None).unwrap();
        assert!(!r.per_zone_candidates.contains_key(&1));
        assert_eq!(r.block().unwrap(), state.block(0).unwrap());
        for p in alloc.zones.iter().flatten() {
            state.erase_record(0, *p).unwrap();
        }
        let r = recover_block(&state, 0, None).unwrap();
        assert_eq!(r.outcome, Outcome::Unrecoverable);
        assert!(matches!(r.block(), Err(RecoveryError::Unrecoverable)));
    }

    #[test]
    fn tie_without_later_slots_is_ambiguous() {
        let (mut state, mut rng) = build(8, 4, 1, 5);
        let bad = forged(&state, 0);
        let prev = state.prev_hash(0).unwrap().clone();
        state.encode_zone(0, 1, &bad, &prev, &mut rng).unwrap();
        let r = recover_block(&state, 0, None).unwrap();
        assert_eq!(r.slots_scanned, 0);
        assert!(matches!(r.outcome, Outcome::Ambiguous { ref tied } if tied.len() == 2));
    }

    #[test]
    fn baseline_majority_counts() {
        let n = 7;
        let mut chain = ReplicatedChain::new(n);
        let good = Block(vec![1, 2, 3]);
        let bad = Block(vec![9, 9, 9]);
        chain.commit(&good);
        assert_eq!(recover_baseline(&chain, 0).unwrap(), good);
        for p in 0..n / 2 {
            chain.set_copy(p, 0, bad.clone()).unwrap();
        }
        assert_eq!(recover_baseline(&chain, 0).unwrap(), good);
        chain.set_copy(n / 2, 0, bad.clone()).unwrap();
        assert_eq!(recover_baseline(&chain, 0).unwrap(), bad);
        assert!(recover_baseline(&chain, 1).is_err());
    }

    #[test]
    fn baseline_even_split_is_ambiguous() {
        let mut chain = ReplicatedChain::new(4);
        chain.commit(&Block(vec![0]));
        chain.set_copy(0, 0, Block(vec![1])).unwrap();
        chain.set_copy(1, 0, Block(vec![1])).unwrap();
        assert!(matches!(
            recover_baseline(&chain, 0),
            Err(RecoveryError::Ambiguous(2))
        ));
    }
}
