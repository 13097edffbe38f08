// SPDX-License-Identifier: Apache-2.0

//! Proof-of-work mining against a threshold target, the urn law for its
//! expected cost, and a measured comparison with the zone-coded ledger.
//!
//! A try hashes `nonce_be64 || prev_data` once with SHA-256 and reads the
//! leading `hash_width_bits` bits as an integer; it is accepted when that
//! integer is below the threshold.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ledger::{Block, ChainConfig, ChainState, LedgerError};
use crate::trials::{batch_rng, run_batches, Moments};

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("hash width must be in 1..=64 bits, got {0}")]
    HashWidth(u32),
    #[error("target fraction must lie in (0, 1] and round to a nonempty target, got {0}")]
    Fraction(f64),
    #[error("nonce width must be in 1..=64 bits, got {0}")]
    NonceBits(u32),
    #[error("no nonce among {tries} met the target")]
    Exhausted { tries: u128 },
    #[error("urn without blue balls has no first blue draw")]
    NoBlue,
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Accepts hash values below `threshold` out of `2^hash_width_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyTarget {
    pub hash_width_bits: u32,
    pub threshold: u128,
}

impl DifficultyTarget {
    pub fn new(hash_width_bits: u32, threshold: u128) -> Result<Self, MiningError> {
        if hash_width_bits == 0 || hash_width_bits > 64 {
            return Err(MiningError::HashWidth(hash_width_bits));
        }
        if threshold == 0 || threshold > 1u128 << hash_width_bits {
            return Err(MiningError::Fraction(
                threshold as f64 / (1u128 << hash_width_bits) as f64,
            ));
        }
        Ok(Self {
            hash_width_bits,
            threshold,
        })
    }

    pub fn from_fraction(hash_width_bits: u32, fraction: f64) -> Result<Self, MiningError> {
        if hash_width_bits == 0 || hash_width_bits > 64 {
            return Err(MiningError::HashWidth(hash_width_bits));
        }
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(MiningError::Fraction(fraction));
        }
        let space = (1u128 << hash_width_bits) as f64;
        Self::new(hash_width_bits, (fraction * space).round() as u128)
            .map_err(|_| MiningError::Fraction(fraction))
    }

    /// `p' / p`.
    pub fn fraction(&self) -> f64 {
        self.threshold as f64 / (1u128 << self.hash_width_bits) as f64
    }

    pub fn accepts(&self, value: u64) -> bool {
        (value as u128) < self.threshold
    }
}

/// Leading `width` bits of `SHA-256(nonce_be64 || prev_data)`.
pub fn pow_hash(nonce: u64, prev_data: &[u8], width: u32) -> u64 {
    let digest = Sha256::new()
        .chain_update(nonce.to_be_bytes())
        .chain_update(prev_data)
        .finalize();
    let head = u64::from_be_bytes(digest[..8].try_into().expect("32-byte digest"));
    head >> (64 - width)
}

/// Visits every nonce of `nonce_bits` bits once, as `a * i + s mod 2^b`
/// with `a` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonceOrder {
    pub nonce_bits: u32,
    pub multiplier: u64,
    pub offset: u64,
}

impl NonceOrder {
    pub fn sequential(nonce_bits: u32) -> Result<Self, MiningError> {
        Self::check(nonce_bits)?;
        Ok(Self {
            nonce_bits,
            multiplier: 1,
            offset: 0,
        })
    }

    pub fn permuted<R: Rng + ?Sized>(nonce_bits: u32, rng: &mut R) -> Result<Self, MiningError> {
        Self::check(nonce_bits)?;
        let mask = Self::mask(nonce_bits);
        Ok(Self {
            nonce_bits,
            multiplier: (rng.gen::<u64>() | 1) & mask,
            offset: rng.gen::<u64>() & mask,
        })
    }

    fn check(nonce_bits: u32) -> Result<(), MiningError> {
        if nonce_bits == 0 || nonce_bits > 64 {
            return Err(MiningError::NonceBits(nonce_bits));
        }
        Ok(())
    }

    fn mask(nonce_bits: u32) -> u64 {
        u64::MAX >> (64 - nonce_bits)
    }

    pub fn space(&self) -> u128 {
        1u128 << self.nonce_bits
    }

    pub fn nonce(&self, i: u64) -> u64 {
        self.multiplier.wrapping_mul(i).wrapping_add(self.offset) & Self::mask(self.nonce_bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningResult {
    pub nonce: u64,
    pub hash: u64,
    pub tries: u64,
}

/// Tries nonces in `order` until one meets `target`.
pub fn mine(
    prev_data: &[u8],
    target: &DifficultyTarget,
    order: &NonceOrder,
) -> Result<MiningResult, MiningError> {
    let width = target.hash_width_bits;
    let space = order.space();
    let mut i: u128 = 0;
    while i < space {
        let nonce = order.nonce(i as u64);
        let hash = pow_hash(nonce, prev_data, width);
        i += 1;
        if target.accepts(hash) {
            return Ok(MiningResult {
                nonce,
                hash,
                tries: i as u64,
            });
        }
    }
    Err(MiningError::Exhausted { tries: space })
}

/// Expected draws without replacement until the first of `blue` blue balls
/// among `blue + red`: `(blue + red + 1) / (blue + 1)`.
pub fn urn_expected_draws(blue: u128, red: u128) -> Result<BigRational, MiningError> {
    if blue == 0 {
        return Err(MiningError::NoBlue);
    }
    Ok(BigRational::new(
        BigInt::from(blue) + BigInt::from(red) + 1,
        BigInt::from(blue) + 1,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostLaw {
    pub p_bits: u32,
    pub fraction: f64,
    pub q_bits: u32,
    pub blue: u128,
    pub red: u128,
    /// Exact expectation as `numerator/denominator`.
    pub exact: String,
    pub expected_tries: f64,
    /// `p / p'`.
    pub inverse_fraction: f64,
    /// Target holds at least 256 values and at most a sixteenth of the space.
    pub regime_ok: bool,
}

/// Urn law for a target of `fraction * 2^p_bits` values and `2^q_bits` nonces.
pub fn mining_cost_law(p_bits: u32, fraction: f64, q_bits: u32) -> Result<CostLaw, MiningError> {
    if q_bits == 0 || q_bits > 64 {
        return Err(MiningError::NonceBits(q_bits));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(MiningError::Fraction(fraction));
    }
    let space = 1u128 << q_bits;
    let blue = ((fraction * space as f64).round() as u128).clamp(1, space);
    let red = space - blue;
    let exact = urn_expected_draws(blue, red)?;
    let target_size = fraction * 2f64.powi(p_bits as i32);
    Ok(CostLaw {
        p_bits,
        fraction,
        q_bits,
        blue,
        red,
        exact: exact.to_string(),
        expected_tries: exact.to_f64().unwrap_or(f64::NAN),
        inverse_fraction: 1.0 / fraction,
        regime_ok: target_size >= 256.0 && fraction <= 1.0 / 16.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiningSummary {
    pub hash_width_bits: u32,
    pub fraction: f64,
    pub nonce_bits: u32,
    pub runs: u64,
    pub exhausted: u64,
    pub mean_tries: f64,
    pub sigma_mean: f64,
    pub law: CostLaw,
    pub seed: u64,
}

impl MiningSummary {
    pub fn matches_law(&self) -> bool {
        (self.mean_tries - self.law.expected_tries).abs() <= 3.0 * self.sigma_mean
    }
}

/// Independent mining runs over random 32-byte headers in permuted nonce
/// order.
pub fn mining_experiment(
    hash_width_bits: u32,
    fraction: f64,
    nonce_bits: u32,
    runs: u64,
    seed: u64,
) -> Result<MiningSummary, MiningError> {
    let target = DifficultyTarget::from_fraction(hash_width_bits, fraction)?;
    NonceOrder::check(nonce_bits)?;
    let law = mining_cost_law(hash_width_bits, target.fraction(), nonce_bits)?;
    let batches = run_batches(runs, seed, |rng, count| {
        let mut moments = Moments::default();
        let mut exhausted = 0u64;
        for _ in 0..count {
            let mut header = [0u8; 32];
            rng.fill(&mut header);
            let order = NonceOrder::permuted(nonce_bits, rng).expect("checked width");
            match mine(&header, &target, &order) {
                Ok(r) => moments.push(r.tries as f64),
                Err(_) => exhausted += 1,
            }
        }
        (moments, exhausted)
    });
    let (moments, exhausted) = batches
        .into_iter()
        .fold((Moments::default(), 0), |(m, e), (bm, be)| {
            (m.merge(bm), e + be)
        });
    Ok(MiningSummary {
        hash_width_bits,
        fraction: target.fraction(),
        nonce_bits,
        runs,
        exhausted,
        mean_tries: moments.mean(),
        sigma_mean: moments.sigma_mean(),
        law,
        seed,
    })
}

/// Hash work per committed block, measured on both schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostComparison {
    pub n: usize,
    pub m: usize,
    pub fraction: f64,
    pub blocks: u64,
    pub pow_hash_evals_per_block: f64,
    pub pow_sigma: f64,
    pub scheme_hash_evals_per_block: f64,
    /// Polynomial evaluations for key and hash shares, counted separately.
    pub scheme_share_evals_per_block: f64,
}

/// Commits `blocks` random blocks to a zone-coded ledger and mines the same
/// blocks on a proof-of-work chain, counting hash evaluations on each.
pub fn scheme_cost_comparison(
    n: usize,
    m: usize,
    hash_width_bits: u32,
    fraction: f64,
    blocks: u64,
    seed: u64,
) -> Result<CostComparison, MiningError> {
    let target = DifficultyTarget::from_fraction(hash_width_bits, fraction)?;
    let config = ChainConfig {
        n,
        m,
        block_bytes: 4 * m,
        hash_width_bits: 64,
        seed,
    };
    let mut state = ChainState::new(config)?;
    let mut rng = batch_rng(seed, 0);
    let mut pow = Moments::default();
    for _ in 0..blocks {
        let block = Block::random(config.block_bytes, &mut rng);
        let mut header = state.head().as_bytes().to_vec();
        header.extend_from_slice(block.as_bytes());
        let order = NonceOrder::permuted(64, &mut rng)?;
        pow.push(mine(&header, &target, &order)?.tries as f64);
        state.commit_block(block, &mut rng)?;
    }
    let ops = state.ops();
    let per = |x: u64| {
        if blocks == 0 {
            0.0
        } else {
            x as f64 / blocks as f64
        }
    };
    Ok(CostComparison {
        n,
        m,
        fraction: target.fraction(),
        blocks,
        pow_hash_evals_per_block: pow.mean(),
        pow_sigma: pow.sigma_mean(),
        scheme_hash_evals_per_block: per(ops.hash_evals),
        scheme_share_evals_per_block: per(ops.share_evals),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn targets() {
        let t = DifficultyTarget::from_fraction(64, 1.0).unwrap();
        assert_eq!(t.threshold, 1u128 << 64);
        assert!(t.accepts(u64::MAX));
        let t = DifficultyTarget::from_fraction(16, 1.0 / 256.0).unwrap();
        assert_eq!(t.threshold, 256);
        assert!(t.accepts(255) && !t.accepts(256));
        assert!(DifficultyTarget::from_fraction(0, 0.5).is_err());
        assert!(DifficultyTarget::from_fraction(65, 0.5).is_err());
        assert!(DifficultyTarget::from_fraction(8, 0.0).is_err());
        assert!(DifficultyTarget::from_fraction(8, 1.5).is_err());
        assert!(DifficultyTarget::from_fraction(8, 1e-6).is_err());
    }

    #[test]
    fn pow_hash_reads_leading_bits() {
        let digest = Sha256::new()
            .chain_update(7u64.to_be_bytes())
            .chain_update(b"hdr")
            .finalize();
        assert_eq!(pow_hash(7, b"hdr", 8), digest[0] as u64);
        assert_eq!(
            pow_hash(7, b"hdr", 64),
            u64::from_be_bytes(digest[..8].try_into().unwrap())
        );
    }

    #[test]
    fn full_target_takes_one_try() {
        let t = DifficultyTarget::from_fraction(64, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let order = NonceOrder::permuted(32, &mut rng).unwrap();
            assert_eq!(mine(b"x", &t, &order).unwrap().tries, 1);
        }
    }

    #[test]
    fn orders_are_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for bits in [1, 3, 8, 10] {
            let order = NonceOrder::permuted(bits, &mut rng).unwrap();
            let mut seen: Vec<u64> = (0..1u64 << bits).map(|i| order.nonce(i)).collect();
            seen.sort_unstable();
            assert_eq!(seen, (0..1u64 << bits).collect::<Vec<_>>());
        }
        let seq = NonceOrder::sequential(8).unwrap();
        assert_eq!(seq.nonce(5), 5);
        assert!(NonceOrder::sequential(0).is_err());
    }

    #[test]
    fn result_meets_target_and_rehashes() {
        let t = DifficultyTarget::from_fraction(20, 1.0 / 64.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let order = NonceOrder::permuted(32, &mut rng).unwrap();
            let r = mine(b"prev", &t, &order).unwrap();
            assert!(t.accepts(r.hash));
            assert_eq!(pow_hash(r.nonce, b"prev", 20), r.hash);
            assert!(r.tries >= 1);
        }
    }

    #[test]
    fn tiny_nonce_space_can_run_dry() {
        let t = DifficultyTarget::from_fraction(64, 1.0 / 65536.0).unwrap();
        let order = NonceOrder::sequential(2).unwrap();
        let found = (0u8..64)
            .filter(|&h| mine(&[h], &t, &order).is_ok())
            .count();
        assert!(found < 64);
        assert!(matches!(
            (0u8..64)
                .map(|h| mine(&[h], &t, &order))
                .find(|r| r.is_err()),
            Some(Err(MiningError::Exhausted { tries: 4 }))
        ));
    }

    #[test]
    fn urn_values() {
        let v = |b, r| urn_expected_draws(b, r).unwrap();
        assert_eq!(v(1, 0), BigRational::from_integer(1.into()));
        assert_eq!(v(1, 1), BigRational::new(3.into(), 2.into()));
        assert_eq!(v(4, 12), BigRational::new(17.into(), 5.into()));
        assert!(matches!(urn_expected_draws(0, 5), Err(MiningError::NoBlue)));
    }

    #[test]
    fn law_near_inverse_fraction() {
        let law = mining_cost_law(64, 1.0 / 256.0, 32).unwrap();
        assert!((law.expected_tries / 256.0 - 1.0).abs() < 1e-4);
        assert!(law.regime_ok);
        let one = mining_cost_law(64, 1.0, 32).unwrap();
        assert_eq!(one.expected_tries, 1.0);
        assert!(!one.regime_ok);
        // shrinking the target strictly raises the expected cost
        let mut last = 0.0;
        for k in 0..=16 {
            let e = mining_cost_law(64, 2f64.powi(-k), 32)
                .unwrap()
                .expected_tries;
            assert!(e > last);
            last = e;
        }
    }

    #[test]
    fn comparison_counts_one_hash_per_block() {
        let c = scheme_cost_comparison(8, 4, 32, 1.0 / 16.0, 20, 4).unwrap();
        assert_eq!(c.scheme_hash_evals_per_block, 1.0);
        assert!(c.scheme_share_evals_per_block > 0.0);
        assert!(c.pow_hash_evals_per_block >= 1.0);
        let flat = scheme_cost_comparison(8, 4, 32, 1.0, 5, 4).unwrap();
        assert_eq!(flat.pow_hash_evals_per_block, 1.0);
    }
}
