// SPDX-License-Identifier: Apache-2.0

//! Cyclic zone allocation.
//!
//! Peers are cut into `2n/m` consecutive groups of `m/2`. Each slot pairs the
//! groups by one perfect matching of the complete graph on the groups, using
//! the circle method: group 0 sits at the centre of a regular polygon whose
//! vertices are the remaining groups, it pairs with the vertex selected by the
//! round, and the other vertices pair across the axis through that vertex.
//! The schedule repeats every `2n/m - 1` slots.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("zone size m = {0} must be even and at least 2")]
    OddZoneSize(usize),
    #[error("peer count n = {n} must be a positive multiple of zone size m = {m}")]
    NotDivisible { n: usize, m: usize },
}

/// Partition of the peers into `2n/m` groups of `m/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLayout {
    n: usize,
    m: usize,
    groups: Vec<Vec<usize>>,
}

/// Zones for one slot. Zones are sorted by smallest member, members ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneAllocation {
    pub slot: u64,
    pub zones: Vec<Vec<usize>>,
}

impl ZoneAllocation {
    /// Zone index of every peer.
    pub fn zone_of_peers(&self) -> Vec<usize> {
        let n = self.zones.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (z, members) in self.zones.iter().enumerate() {
            for &p in members {
                out[p] = z;
            }
        }
        out
    }

    /// Position of `peer` inside its zone, with its zone index.
    pub fn locate(&self, peer: usize) -> Option<(usize, usize)> {
        self.zones
            .iter()
            .enumerate()
            .find_map(|(z, members)| members.iter().position(|&p| p == peer).map(|i| (z, i)))
    }
}

/// Checks the `(n, m)` pair used by the cyclic schedule.
pub fn validate(n: usize, m: usize) -> Result<(), ScheduleError> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(ScheduleError::OddZoneSize(m));
    }
    if n == 0 || !n.is_multiple_of(m) {
        return Err(ScheduleError::NotDivisible { n, m });
    }
    Ok(())
}

impl GroupLayout {
    pub fn new(n: usize, m: usize) -> Result<Self, ScheduleError> {
        validate(n, m)?;
        let half = m / 2;
        let groups = (0..n / half)
            .map(|g| (g * half..(g + 1) * half).collect())
            .collect();
        Ok(Self { n, m, groups })
    }

    pub fn peers(&self) -> usize {
        self.n
    }

    pub fn zone_size(&self) -> usize {
        self.m
    }

    pub fn zone_count(&self) -> usize {
        self.n / self.m
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Slots before the schedule repeats.
    pub fn period(&self) -> u64 {
        self.groups.len() as u64 - 1
    }

    /// Group pairs matched in round `t mod period`.
    pub fn matching_at(&self, t: u64) -> Vec<(usize, usize)> {
        let g = self.groups.len();
        if g == 2 {
            return vec![(0, 1)];
        }
        let ring = (g - 1) as u64;
        let r = t % ring;
        let vertex = |pos: u64| (pos % ring) as usize + 1;
        let mut pairs = vec![(0, vertex(r))];
        for k in 1..(g / 2) as u64 {
            let a = vertex(r + k);
            let b = vertex(r + ring - k);
            pairs.push((a.min(b), a.max(b)));
        }
        pairs
    }

    pub fn allocation_at(&self, t: u64) -> ZoneAllocation {
        let mut zones: Vec<Vec<usize>> = self
            .matching_at(t)
            .into_iter()
            .map(|(a, b)| {
                let mut z: Vec<usize> = self.groups[a]
                    .iter()
                    .chain(&self.groups[b])
                    .copied()
                    .collect();
                z.sort_unstable();
                z
            })
            .collect();
        zones.sort_unstable_by_key(|z| z[0]);
        ZoneAllocation { slot: t, zones }
    }
}

/// Slots for every peer pair to share a zone: `2n/m - 1`.
pub fn coverage_slots(n: usize, m: usize) -> Result<u64, ScheduleError> {
    validate(n, m)?;
    Ok(2 * (n / m) as u64 - 1)
}

/// Smallest integer no less than `(n - 1) / (m - 1)`, the handshake bound.
pub fn coverage_lower_bound(n: usize, m: usize) -> u64 {
    if n <= 1 {
        return 0;
    }
    ((n - 1) as u64).div_ceil((m - 1) as u64)
}

/// `n! / (m!)^(n/m)`, the number of ordered zone assignments.
pub fn allocation_count(n: usize, m: usize) -> Result<BigUint, ScheduleError> {
    if m == 0 || n == 0 || !n.is_multiple_of(m) {
        return Err(ScheduleError::NotDivisible { n, m });
    }
    let fact = |k: usize| -> BigUint { (1..=k).map(BigUint::from).product() };
    Ok(fact(n) / fact(m).pow((n / m) as u32))
}

/// Outcome of checking the schedule over one period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageAudit {
    pub n: usize,
    pub m: usize,
    pub period: u64,
    pub lower_bound: u64,
    /// Slots until every peer pair has shared a zone.
    pub slots_to_cover: Option<u64>,
    pub partitions_valid: bool,
    /// Each group pair meets exactly once per period.
    pub group_pairs_once: bool,
    /// Allocation at `t + period` equals allocation at `t`.
    pub periodic: bool,
}

impl CoverageAudit {
    pub fn passed(&self) -> bool {
        self.partitions_valid
            && self.group_pairs_once
            && self.periodic
            && self.slots_to_cover == Some(self.period)
            && self.period >= self.lower_bound
    }
}

/// Walks one full period and checks partition validity, pair coverage,
/// per-period fairness and periodicity.
pub fn audit_coverage(n: usize, m: usize) -> Result<CoverageAudit, ScheduleError> {
    let layout = GroupLayout::new(n, m)?;
    let period = layout.period();
    let groups = layout.groups().len();

    let mut met = vec![vec![false; n]; n];
    let mut uncovered = n * (n - 1) / 2;
    let mut slots_to_cover = (uncovered == 0).then_some(0);
    let mut partitions_valid = true;
    let mut pair_counts = vec![vec![0u32; groups]; groups];
    let mut periodic = true;

    for t in 0..period {
        let alloc = layout.allocation_at(t);
        let mut members = BTreeSet::new();
        for zone in &alloc.zones {
            partitions_valid &= zone.len() == m;
            for &p in zone {
                partitions_valid &= members.insert(p);
            }
            for (i, &a) in zone.iter().enumerate() {
                for &b in &zone[i + 1..] {
                    if !met[a][b] {
                        met[a][b] = true;
                        uncovered -= 1;
                    }
                }
            }
        }
        partitions_valid &= members.len() == n && alloc.zones.len() == n / m;
        for (a, b) in layout.matching_at(t) {
            pair_counts[a][b] += 1;
        }
        if uncovered == 0 && slots_to_cover.is_none() {
            slots_to_cover = Some(t + 1);
        }
        periodic &= layout.allocation_at(t + period).zones == alloc.zones;
    }
    let group_pairs_once = (0..groups).all(|a| (a + 1..groups).all(|b| pair_counts[a][b] == 1));

    Ok(CoverageAudit {
        n,
        m,
        period,
        lower_bound: coverage_lower_bound(n, m),
        slots_to_cover,
        partitions_valid,
        group_pairs_once,
        periodic,
    })
}
