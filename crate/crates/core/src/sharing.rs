// SPDX-License-Identifier: Apache-2.0

//! Shamir (k, n) threshold sharing over a prime field.
//!
//! Abscissas are drawn per sharing instance, uniformly without replacement
//! from the nonzero field elements. Byte strings are shared chunk by chunk,
//! [`CHUNK_BYTES`] bytes per field element; the byte length travels in the
//! clear next to each holder's shares.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};

/// Bytes packed into one sharing-field element.
pub const CHUNK_BYTES: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SharingError {
    #[error("threshold k = {k} must satisfy 1 <= k <= n = {n}")]
    BadThreshold { k: usize, n: usize },
    #[error("field of order {modulus} is too small for {n} shares")]
    FieldTooSmall { modulus: u64, n: usize },
    #[error("need {needed} shares, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("byte sharing needs a modulus above 2^56, got {0}")]
    ChunkFieldTooSmall(u64),
    #[error("share bundles disagree on layout")]
    InconsistentBundles,
    #[error("reconstructed chunk does not fit its byte width")]
    ChunkOverflow,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One point `(x, y)` of the sharing polynomial. `x` is never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SecretShare {
    pub x: FieldElement,
    pub y: FieldElement,
}

/// One holder's shares of a byte string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ByteShares {
    /// Length of the shared secret in bytes (cleartext metadata).
    pub len: usize,
    /// One share per chunk.
    pub shares: Vec<SecretShare>,
}

impl ByteShares {
    /// Stored size: the length prefix plus two field elements per share.
    pub fn stored_bits(&self, field: &Field) -> u64 {
        LENGTH_PREFIX_BITS + self.shares.len() as u64 * 2 * field.element_bits() as u64
    }
}

/// Width of the cleartext length prefix carried by every [`ByteShares`].
pub const LENGTH_PREFIX_BITS: u64 = 32;

/// Evaluates the polynomial with the given coefficients at each abscissa.
pub fn share_polynomial(
    field: &Field,
    coeffs: &[FieldElement],
    xs: &[FieldElement],
) -> Vec<SecretShare> {
    xs.iter()
        .map(|&x| SecretShare {
            x,
            y: field.eval_poly(coeffs, x),
        })
        .collect()
}

/// Draws `n` distinct nonzero abscissas.
pub fn sample_abscissas<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    rng: &mut R,
) -> Result<Vec<FieldElement>, SharingError> {
    let nonzero = field.modulus() - 1;
    if n as u64 > nonzero {
        return Err(SharingError::FieldTooSmall {
            modulus: field.modulus(),
            n,
        });
    }
    Ok(index::sample(rng, nonzero as usize, n)
        .into_iter()
        .map(|i| field.elem(i as u64 + 1))
        .collect())
}

pub fn split<R: Rng + ?Sized>(
    field: &Field,
    secret: FieldElement,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SecretShare>, SharingError> {
    if k == 0 || k > n {
        return Err(SharingError::BadThreshold { k, n });
    }
    let xs = sample_abscissas(field, n, rng)?;
    let mut coeffs = Vec::with_capacity(k);
    coeffs.push(secret);
    coeffs.extend((1..k).map(|_| field.elem(rng.gen_range(0..field.modulus()))));
    Ok(share_polynomial(field, &coeffs, &xs))
}

/// Recovers the secret from the first `k` of `shares`.
pub fn reconstruct(
    field: &Field,
    shares: &[SecretShare],
    k: usize,
) -> Result<FieldElement, SharingError> {
    if k == 0 || shares.len() < k {
        return Err(SharingError::InsufficientShares {
            needed: k.max(1),
            got: shares.len(),
        });
    }
    for (i, s) in shares.iter().enumerate() {
        if shares[..i].iter().any(|t| t.x == s.x) {
            return Err(FieldError::DuplicateAbscissa(s.x.value()).into());
        }
    }
    let points: Vec<_> = shares[..k].iter().map(|s| (s.x, s.y)).collect();
    Ok(field.lagrange_interpolate(&points, FieldElement::ZERO)?)
}

fn check_chunk_field(field: &Field) -> Result<(), SharingError> {
    if field.modulus() <= 1 << (8 * CHUNK_BYTES) {
        return Err(SharingError::ChunkFieldTooSmall(field.modulus()));
    }
    Ok(())
}

/// Shares a byte string; returns one [`ByteShares`] per holder.
pub fn split_bytes<R: Rng + ?Sized>(
    field: &Field,
    secret: &[u8],
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<Vec<ByteShares>, SharingError> {
    check_chunk_field(field)?;
    if k == 0 || k > n {
        return Err(SharingError::BadThreshold { k, n });
    }
    let mut out = vec![
        ByteShares {
            len: secret.len(),
            shares: Vec::with_capacity(secret.len().div_ceil(CHUNK_BYTES)),
        };
        n
    ];
    for chunk in secret.chunks(CHUNK_BYTES) {
        let value = chunk.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64);
        let shares = split(field, field.elem(value), k, n, rng)?;
        for (holder, share) in out.iter_mut().zip(shares) {
            holder.shares.push(share);
        }
    }
    Ok(out)
}

/// Inverts [`split_bytes`] using the first `k` bundles.
pub fn reconstruct_bytes(
    field: &Field,
    bundles: &[ByteShares],
    k: usize,
) -> Result<Vec<u8>, SharingError> {
    check_chunk_field(field)?;
    if k == 0 || bundles.len() < k {
        return Err(SharingError::InsufficientShares {
            needed: k.max(1),
            got: bundles.len(),
        });
    }
    let used = &bundles[..k];
    let len = used[0].len;
    let chunks = len.div_ceil(CHUNK_BYTES);
    if used
        .iter()
        .any(|b| b.len != len || b.shares.len() != chunks)
    {
        return Err(SharingError::InconsistentBundles);
    }
    let mut out = Vec::with_capacity(len);
    let mut points = Vec::with_capacity(k);
    for c in 0..chunks {
        points.clear();
        points.extend(used.iter().map(|b| b.shares[c]));
        let value = reconstruct(field, &points, k)?.value();
        let width = CHUNK_BYTES.min(len - c * CHUNK_BYTES);
        if width < 8 && value >> (8 * width) != 0 {
            return Err(SharingError::ChunkOverflow);
        }
        out.extend((0..width).rev().map(|i| (value >> (8 * i)) as u8));
    }
    Ok(out)
}
