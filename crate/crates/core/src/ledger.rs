// SPDX-License-Identifier: Apache-2.0

//! Simulated zone-coded ledger.
//!
//! [`ChainState`] keeps the ground-truth hash chain next to what every peer
//! stores for every slot. Committing a block encrypts it once per zone of the
//! slot's allocation with a fresh key, gives each zone member one fragment,
//! and shares both the serialized key and the previous hash `(m, m)` across
//! the zone.
//!
//! Slots are 0-based: slot `t` holds block `t` together with `prev_hash(t)`,
//! and `hash_after(t) = h(prev_hash(t) || block(t))`. The genesis hash is the
//! all-zero string.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cipher::{self, CipherError, CipherKey, Fragment, MAX_ZONE_SIZE};
use crate::field::Field;
use crate::schedule::{GroupLayout, ScheduleError, ZoneAllocation};
use crate::sharing::{self, ByteShares, SharingError};

pub const SNAPSHOT_FORMAT: &str = "zoned-ledger-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("block length {len} must be a positive multiple of zone size m = {m}")]
    BlockLength { len: usize, m: usize },
    #[error("hash width {0} must be a multiple of 8 in 8..=256")]
    HashWidth(u32),
    #[error("zone size m = {0} exceeds the key encoding limit")]
    ZoneTooLarge(usize),
    #[error("slot {0} has not been committed")]
    NoSuchSlot(u64),
    #[error("zone {zone} does not exist at slot {slot}")]
    NoSuchZone { slot: u64, zone: usize },
    #[error("no record for peer {peer} at slot {slot}")]
    MissingRecord { slot: u64, peer: usize },
    #[error("no other zone of slot {slot} can be decoded to repair zone {zone}")]
    Unrepairable { slot: u64, zone: usize },
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Sharing(#[from] SharingError),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Network and chain parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub n: usize,
    pub m: usize,
    pub block_bytes: usize,
    pub hash_width_bits: u32,
    pub seed: u64,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), LedgerError> {
        crate::schedule::validate(self.n, self.m)?;
        if self.m > MAX_ZONE_SIZE {
            return Err(LedgerError::ZoneTooLarge(self.m));
        }
        if self.block_bytes == 0 || !self.block_bytes.is_multiple_of(self.m) {
            return Err(LedgerError::BlockLength {
                len: self.block_bytes,
                m: self.m,
            });
        }
        let w = self.hash_width_bits;
        if w == 0 || w > 256 || !w.is_multiple_of(8) {
            return Err(LedgerError::HashWidth(w));
        }
        Ok(())
    }

    pub fn zone_count(&self) -> usize {
        self.n / self.m
    }
}

/// A transaction block payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block(#[serde(with = "hex::serde")] pub Vec<u8>);

impl Block {
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; len];
        rng.fill(&mut bytes[..]);
        Block(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// A truncated SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HashValue(#[serde(with = "hex::serde")] pub Vec<u8>);

impl HashValue {
    pub fn genesis(width_bits: u32) -> Self {
        HashValue(vec![0; width_bits as usize / 8])
    }

    pub fn width_bits(&self) -> u32 {
        self.0.len() as u32 * 8
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// `SHA-256(prev || payload)` truncated to the width of `prev`.
pub fn hash_step(prev: &HashValue, block: &[u8]) -> HashValue {
    let digest = Sha256::new()
        .chain_update(&prev.0)
        .chain_update(block)
        .finalize();
    HashValue(digest[..prev.0.len()].to_vec())
}

/// What one peer stores for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeerSlotRecord {
    pub zone: usize,
    pub fragment: Fragment,
    pub key_shares: ByteShares,
    pub hash_shares: ByteShares,
    pub local_assignment: usize,
}

/// Operation counters, accumulated across commits and repairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub hash_evals: u64,
    /// Polynomial evaluations performed while producing shares.
    pub share_evals: u64,
    pub keys_sampled: u64,
}

/// Per-record storage, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageBits {
    pub fragment: u64,
    pub key_shares: u64,
    pub hash_shares: u64,
    pub assignment: u64,
    pub total: u64,
}

/// Closed-form per-peer, per-block storage costs in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageFormula {
    /// Full replication: `log2 q + log2 p`.
    pub baseline: f64,
    /// Zone coding: `log2 q / m + 2 m log2 m + 2 log2 p + 1`.
    pub distributed: f64,
    pub gain: f64,
}

pub fn storage_cost_formula(q_bits: f64, p_bits: f64, m: usize) -> StorageFormula {
    let m_f = m as f64;
    let baseline = q_bits + p_bits;
    let distributed = q_bits / m_f + 2.0 * m_f * m_f.log2() + 2.0 * p_bits + 1.0;
    StorageFormula {
        baseline,
        distributed,
        gain: baseline - distributed,
    }
}

/// Decoded contents of one zone at one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZoneContents {
    pub block: Block,
    pub prev_hash: HashValue,
}

/// Ground truth plus per-peer storage for a simulated network.
#[derive(Debug, Clone)]
pub struct ChainState {
    config: ChainConfig,
    layout: GroupLayout,
    field: Field,
    hashes: Vec<HashValue>,
    blocks: Vec<Block>,
    records: Vec<Vec<Option<PeerSlotRecord>>>,
    ops: OpCounts,
}

fn ceil_log2(m: usize) -> u64 {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as u64
    }
}

impl ChainState {
    pub fn new(config: ChainConfig) -> Result<Self, LedgerError> {
        config.validate()?;
        Ok(Self {
            layout: GroupLayout::new(config.n, config.m)?,
            field: Field::sharing(),
            hashes: vec![HashValue::genesis(config.hash_width_bits)],
            blocks: Vec::new(),
            records: Vec::new(),
            ops: OpCounts::default(),
            config,
        })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn layout(&self) -> &GroupLayout {
        &self.layout
    }

    pub fn sharing_field(&self) -> &Field {
        &self.field
    }

    pub fn ops(&self) -> OpCounts {
        self.ops
    }

    /// Number of committed slots.
    pub fn len(&self) -> u64 {
        self.blocks.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn check_slot(&self, t: u64) -> Result<usize, LedgerError> {
        if t < self.len() {
            Ok(t as usize)
        } else {
            Err(LedgerError::NoSuchSlot(t))
        }
    }

    pub fn block(&self, t: u64) -> Result<&Block, LedgerError> {
        Ok(&self.blocks[self.check_slot(t)?])
    }

    pub fn prev_hash(&self, t: u64) -> Result<&HashValue, LedgerError> {
        Ok(&self.hashes[self.check_slot(t)?])
    }

    pub fn hash_after(&self, t: u64) -> Result<&HashValue, LedgerError> {
        Ok(&self.hashes[self.check_slot(t)? + 1])
    }

    /// Hash of the latest committed slot, or genesis.
    pub fn head(&self) -> &HashValue {
        self.hashes.last().expect("genesis is always present")
    }

    pub fn allocation(&self, t: u64) -> ZoneAllocation {
        self.layout.allocation_at(t)
    }

    pub fn record(&self, t: u64, peer: usize) -> Result<&PeerSlotRecord, LedgerError> {
        let slot = self.check_slot(t)?;
        self.records[slot]
            .get(peer)
            .and_then(Option::as_ref)
            .ok_or(LedgerError::MissingRecord { slot: t, peer })
    }

    pub fn replace_record(
        &mut self,
        t: u64,
        peer: usize,
        record: PeerSlotRecord,
    ) -> Result<(), LedgerError> {
        let slot = self.check_slot(t)?;
        self.records[slot][peer] = Some(record);
        Ok(())
    }

    /// Drops a peer's record, as after a storage failure.
    pub fn erase_record(&mut self, t: u64, peer: usize) -> Result<(), LedgerError> {
        let slot = self.check_slot(t)?;
        self.records[slot][peer] = None;
        Ok(())
    }

    /// Ground truth satisfies `hash_after(t) = h(prev_hash(t), block(t))`.
    pub fn verify_chain(&self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(t, b)| hash_step(&self.hashes[t], &b.0) == self.hashes[t + 1])
    }

    /// Encrypts `block` for zone `zone` of slot `t` under a fresh key and
    /// writes the records of all its members.
    pub fn encode_zone<R: Rng + ?Sized>(
        &mut self,
        t: u64,
        zone: usize,
        block: &Block,
        prev_hash: &HashValue,
        rng: &mut R,
    ) -> Result<(), LedgerError> {
        let slot = self.check_slot(t)?;
        let members = self
            .allocation(t)
            .zones
            .get(zone)
            .cloned()
            .ok_or(LedgerError::NoSuchZone { slot: t, zone })?;
        for (peer, record) in members
            .iter()
            .zip(self.encode_records(zone, block, prev_hash, rng)?)
        {
            self.records[slot][*peer] = Some(record);
        }
        Ok(())
    }

    fn encode_records<R: Rng + ?Sized>(
        &mut self,
        zone: usize,
        block: &Block,
        prev_hash: &HashValue,
        rng: &mut R,
    ) -> Result<Vec<PeerSlotRecord>, LedgerError> {
        let m = self.config.m;
        if block.0.len() != self.config.block_bytes {
            return Err(LedgerError::BlockLength {
                len: block.0.len(),
                m,
            });
        }
        let key = CipherKey::sample(m, rng)?;
        self.ops.keys_sampled += 1;
        let fragments = cipher::encrypt(&block.0, &key)?;
        let key_shares = sharing::split_bytes(&self.field, &key.to_bytes(), m, m, rng)?;
        let hash_shares = sharing::split_bytes(&self.field, &prev_hash.0, m, m, rng)?;
        self.ops.share_evals += key_shares
            .iter()
            .chain(&hash_shares)
            .map(|b| b.shares.len() as u64)
            .sum::<u64>();
        Ok(fragments
            .into_iter()
            .zip(key_shares)
            .zip(hash_shares)
            .enumerate()
            .map(
                |(i, ((fragment, key_shares), hash_shares))| PeerSlotRecord {
                    zone,
                    fragment,
                    key_shares,
                    hash_shares,
                    local_assignment: key.assignment()[i],
                },
            )
            .collect())
    }

    /// Appends `block` as the next slot and encodes it into every zone.
    pub fn commit_block<R: Rng + ?Sized>(
        &mut self,
        block: Block,
        rng: &mut R,
    ) -> Result<u64, LedgerError> {
        if block.0.len() != self.config.block_bytes {
            return Err(LedgerError::BlockLength {
                len: block.0.len(),
                m: self.config.m,
            });
        }
        let t = self.len();
        let prev = self.head().clone();
        let next = hash_step(&prev, &block.0);
        self.ops.hash_evals += 1;
        self.blocks.push(block.clone());
        self.hashes.push(next);
        self.records.push(vec![None; self.config.n]);
        for zone in 0..self.config.zone_count() {
            self.encode_zone(t, zone, &block, &prev, rng)?;
        }
        Ok(t)
    }

    /// Reconstructs key and previous hash of a zone and decrypts its block.
    pub fn open_zone(&self, t: u64, zone: usize) -> Result<ZoneContents, LedgerError> {
        let m = self.config.m;
        let alloc = self.allocation(t);
        let members = alloc
            .zones
            .get(zone)
            .ok_or(LedgerError::NoSuchZone { slot: t, zone })?;
        let records = members
            .iter()
            .map(|&p| self.record(t, p))
            .collect::<Result<Vec<_>, _>>()?;
        let key_bundles: Vec<ByteShares> = records.iter().map(|r| r.key_shares.clone()).collect();
        let key_bytes = sharing::reconstruct_bytes(&self.field, &key_bundles, m)?;
        let key = CipherKey::from_bytes(&key_bytes, m)?;
        let fragments: Vec<Fragment> = records.iter().map(|r| r.fragment.clone()).collect();
        let block = Block(cipher::decrypt(&fragments, &key)?);
        let hash_bundles: Vec<ByteShares> = records.iter().map(|r| r.hash_shares.clone()).collect();
        let prev_hash = HashValue(sharing::reconstruct_bytes(&self.field, &hash_bundles, m)?);
        Ok(ZoneContents { block, prev_hash })
    }

    /// Re-encodes zone `zone` of slot `t` from the first other zone that
    /// still decodes, under a fresh key.
    pub fn repair_zone<R: Rng + ?Sized>(
        &mut self,
        t: u64,
        zone: usize,
        rng: &mut R,
    ) -> Result<(), LedgerError> {
        self.check_slot(t)?;
        if zone >= self.config.zone_count() {
            return Err(LedgerError::NoSuchZone { slot: t, zone });
        }
        let donor = (0..self.config.zone_count())
            .filter(|&z| z != zone)
            .find_map(|z| self.open_zone(t, z).ok())
            .ok_or(LedgerError::Unrepairable { slot: t, zone })?;
        self.encode_zone(t, zone, &donor.block, &donor.prev_hash, rng)
    }

    pub fn storage_cost_measured(&self, t: u64, peer: usize) -> Result<StorageBits, LedgerError> {
        let r = self.record(t, peer)?;
        let fragment = 8 * r.fragment.len() as u64;
        let key_shares = r.key_shares.stored_bits(&self.field);
        let hash_shares = r.hash_shares.stored_bits(&self.field);
        let assignment = ceil_log2(self.config.m);
        Ok(StorageBits {
            fragment,
            key_shares,
            hash_shares,
            assignment,
            total: fragment + key_shares + hash_shares + assignment,
        })
    }

    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<(), LedgerError> {
        let header = SnapshotLine::Header {
            format: SNAPSHOT_FORMAT.to_string(),
            version: SNAPSHOT_VERSION,
            config: self.config,
            slots: self.len(),
        };
        write_line(&mut out, &header)?;
        for t in 0..self.len() {
            let i = t as usize;
            write_line(
                &mut out,
                &SnapshotLine::Slot {
                    slot: t,
                    prev_hash: self.hashes[i].clone(),
                    block: self.blocks[i].clone(),
                    hash: self.hashes[i + 1].clone(),
                },
            )?;
        }
        for t in 0..self.len() {
            for (peer, rec) in self.records[t as usize].iter().enumerate() {
                if let Some(record) = rec {
                    write_line(
                        &mut out,
                        &SnapshotLine::Record {
                            slot: t,
                            peer,
                            record: record.clone(),
                        },
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<Self, LedgerError> {
        let bad = |msg: &str| LedgerError::Snapshot(msg.to_string());
        let mut lines = input.lines();
        let first = lines.next().ok_or_else(|| bad("empty snapshot"))??;
        let SnapshotLine::Header {
            format,
            version,
            config,
            slots,
        } = parse_line(&first)?
        else {
            return Err(bad("first line must be the header"));
        };
        if format != SNAPSHOT_FORMAT || version != SNAPSHOT_VERSION {
            return Err(bad("unsupported format or version"));
        }
        let mut state = Self::new(config)?;
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            match parse_line(&line)? {
                SnapshotLine::Header { .. } => return Err(bad("duplicate header")),
                SnapshotLine::Slot {
                    slot,
                    prev_hash,
                    block,
                    hash,
                } => {
                    if slot != state.len() || &prev_hash != state.head() {
                        return Err(bad("slot out of order or chain broken"));
                    }
                    state.blocks.push(block);
                    state.hashes.push(hash);
                    state.records.push(vec![None; config.n]);
                }
                SnapshotLine::Record { slot, peer, record } => {
                    if peer >= config.n {
                        return Err(bad("peer index out of range"));
                    }
                    state.replace_record(slot, peer, record)?;
                }
            }
        }
        if state.len() != slots {
            return Err(bad("slot count does not match header"));
        }
        Ok(state)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SnapshotLine {
    Header {
        format: String,
        version: u32,
        config: ChainConfig,
        slots: u64,
    },
    Slot {
        slot: u64,
        prev_hash: HashValue,
        block: Block,
        hash: HashValue,
    },
    Record {
        slot: u64,
        peer: usize,
        record: PeerSlotRecord,
    },
}

fn write_line<W: Write>(out: &mut W, line: &SnapshotLine) -> Result<(), LedgerError> {
    serde_json::to_writer(&mut *out, line).map_err(|e| LedgerError::Snapshot(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn parse_line(line: &str) -> Result<SnapshotLine, LedgerError> {
    serde_json::from_str(line).map_err(|e| LedgerError::Snapshot(e.to_string()))
}
