// SPDX-License-Identifier: Apache-2.0

//! Prime-field arithmetic and Lagrange interpolation.
//!
//! Elements are plain `u64` residues; the modulus lives in [`Field`] and is
//! never stored per element. Multiplication goes through `u128`, so any prime
//! below 2^64 works.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The Mersenne prime 2^61 - 1, used for chunked byte sharing.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not a prime >= 2")]
    NotPrime(u64),
    #[error("duplicate abscissa {0} in interpolation points")]
    DuplicateAbscissa(u64),
    #[error("interpolation needs at least one point")]
    NoPoints,
    #[error("no prime below 2^{0}")]
    NoPrimeBelow(u32),
}

/// A residue in `[0, modulus)` of some [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic context for GF(p), p prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    modulus: u64,
}

impl Field {
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(Self { modulus })
    }

    /// The sharing field used for keys and hashes.
    pub fn sharing() -> Self {
        Self {
            modulus: MERSENNE_61,
        }
    }

    /// Largest prime strictly below `2^bits`.
    pub fn largest_below_pow2(bits: u32) -> Result<Self, FieldError> {
        if !(2..=64).contains(&bits) {
            return Err(FieldError::NoPrimeBelow(bits));
        }
        let top = if bits == 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        };
        let mut candidate = top;
        while candidate >= 2 {
            if is_prime(candidate) {
                return Ok(Self { modulus: candidate });
            }
            candidate -= 1;
        }
        Err(FieldError::NoPrimeBelow(bits))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Bits needed to store any element.
    pub fn element_bits(&self) -> u32 {
        64 - (self.modulus - 1).leading_zeros()
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement(value % self.modulus)
    }

    /// Wraps a value already known to be reduced. Returns `None` otherwise.
    pub fn checked_elem(&self, value: u64) -> Option<FieldElement> {
        (value < self.modulus).then_some(FieldElement(value))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u128 + b.0 as u128) % self.modulus as u128) as u64)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 >= b.0 {
            FieldElement(a.0 - b.0)
        } else {
            FieldElement(self.modulus - (b.0 - a.0))
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u128 * b.0 as u128) % self.modulus as u128) as u64)
    }

    pub fn pow(&self, base: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat. `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            None
        } else {
            Some(self.pow(a, self.modulus - 2))
        }
    }

    /// Horner evaluation of `coeffs[0] + coeffs[1] x + ...`.
    pub fn eval_poly(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Value at `x0` of the unique polynomial of degree `< points.len()`
    /// passing through `points`.
    pub fn lagrange_interpolate(
        &self,
        points: &[(FieldElement, FieldElement)],
        x0: FieldElement,
    ) -> Result<FieldElement, FieldError> {
        if points.is_empty() {
            return Err(FieldError::NoPoints);
        }
        for (i, (xi, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(xj, _)| xj == xi) {
                return Err(FieldError::DuplicateAbscissa(xi.0));
            }
        }
        let mut acc = FieldElement::ZERO;
        for (i, &(xi, yi)) in points.iter().enumerate() {
            let mut num = FieldElement::ONE;
            let mut den = FieldElement::ONE;
            for (j, &(xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                num = self.mul(num, self.sub(x0, xj));
                den = self.mul(den, self.sub(xi, xj));
            }
            // den is a product of nonzero differences
            let basis = self.mul(num, self.inv(den).expect("distinct abscissas"));
            acc = self.add(acc, self.mul(yi, basis));
        }
        Ok(acc)
    }
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(field: &Field) -> impl Iterator<Item = FieldElement> + '_ {
        (0..field.modulus()).map(|v| field.elem(v))
    }

    #[test]
    fn constructs_prime_fields_and_rejects_others() {
        assert_eq!(Field::new(7).unwrap().modulus(), 7);
        assert_eq!(Field::new(MERSENNE_61).unwrap().modulus(), MERSENNE_61);
        assert_eq!(Field::new(6), Err(FieldError::NotPrime(6)));
        assert_eq!(Field::new(1), Err(FieldError::NotPrime(1)));
        assert_eq!(Field::new(0), Err(FieldError::NotPrime(0)));
        assert!(Field::new(2).is_ok());
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000u64 {
            let slow = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime(n), slow, "n = {n}");
        }
        assert!(is_prime(u64::MAX - 58));
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn largest_prime_below_power_of_two() {
        assert_eq!(Field::largest_below_pow2(5).unwrap().modulus(), 31);
        assert_eq!(Field::largest_below_pow2(8).unwrap().modulus(), 251);
        assert_eq!(
            Field::largest_below_pow2(61).unwrap().modulus(),
            MERSENNE_61
        );
        assert_eq!(
            Field::largest_below_pow2(64).unwrap().modulus(),
            u64::MAX - 58
        );
    }

    #[test]
    fn field_axioms_hold_exhaustively_for_small_primes() {
        for q in [2u64, 3, 5, 7, 11, 13] {
            let f = Field::new(q).unwrap();
            for a in all(&f) {
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if a != FieldElement::ZERO {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for b in all(&f) {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                    for c in all(&f) {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            assert_eq!(f.inv(FieldElement::ZERO), None);
        }
    }

    #[test]
    fn interpolates_line_through_two_points() {
        // P(x) = 3 + 2x over GF(7): P(1) = 5, P(2) = 0
        let f = Field::new(7).unwrap();
        let pts = [(f.elem(1), f.elem(5)), (f.elem(2), f.elem(0))];
        assert_eq!(f.lagrange_interpolate(&pts, f.elem(0)).unwrap(), f.elem(3));
        for x in 0..7 {
            assert_eq!(
                f.lagrange_interpolate(&pts, f.elem(x)).unwrap(),
                f.elem(3 + 2 * x)
            );
        }
    }

    #[test]
    fn single_point_is_constant() {
        let f = Field::new(13).unwrap();
        let pts = [(f.elem(4), f.elem(9))];
        for x in 0..13 {
            assert_eq!(f.lagrange_interpolate(&pts, f.elem(x)).unwrap(), f.elem(9));
        }
    }

    #[test]
    fn interpolation_errors() {
        let f = Field::new(13).unwrap();
        assert_eq!(
            f.lagrange_interpolate(&[], f.elem(0)),
            Err(FieldError::NoPoints)
        );
        let dup = [(f.elem(2), f.elem(1)), (f.elem(2), f.elem(5))];
        assert_eq!(
            f.lagrange_interpolate(&dup, f.elem(0)),
            Err(FieldError::DuplicateAbscissa(2))
        );
    }

    #[test]
    fn interpolation_recovers_every_small_polynomial() {
        // every polynomial of degree < k over GF(q), every k-subset of abscissas
        for q in [5u64, 7] {
            let f = Field::new(q).unwrap();
            for k in 1..=3usize {
                let total = q.pow(k as u32);
                for code in 0..total {
                    let coeffs: Vec<_> =
                        (0..k).map(|i| f.elem(code / q.pow(i as u32) % q)).collect();
                    for mask in 0u32..(1 << q) {
                        if mask.count_ones() as usize != k {
                            continue;
                        }
                        let pts: Vec<_> = (0..q)
                            .filter(|x| mask & (1 << x) != 0)
                            .map(|x| (f.elem(x), f.eval_poly(&coeffs, f.elem(x))))
                            .collect();
                        for x0 in 0..q {
                            assert_eq!(
                                f.lagrange_interpolate(&pts, f.elem(x0)).unwrap(),
                                f.eval_poly(&coeffs, f.elem(x0))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_three_over_gf13() {
        // oracle: brute-force evaluation of a fixed cubic
        let f = Field::new(13).unwrap();
        let coeffs = [f.elem(11), f.elem(4), f.elem(0), f.elem(7)];
        let brute = |x: u64| (11 + 4 * x + 7 * x * x * x) % 13;
        let pts: Vec<_> = [2u64, 5, 9, 12]
            .iter()
            .map(|&x| (f.elem(x), f.elem(brute(x))))
            .collect();
        assert_eq!(f.lagrange_interpolate(&pts, f.elem(0)).unwrap(), coeffs[0]);
        assert_eq!(f.eval_poly(&coeffs, f.elem(3)), f.elem(brute(3)));
    }

    #[test]
    fn mersenne_arithmetic_does_not_overflow() {
        let f = Field::sharing();
        let a = f.elem(MERSENNE_61 - 1);
        assert_eq!(f.mul(a, a), FieldElement::ONE);
        assert_eq!(f.add(a, a), f.elem(MERSENNE_61 - 2));
        assert_eq!(f.element_bits(), 61);
        let big = Field::largest_below_pow2(64).unwrap();
        let x = big.elem(big.modulus() - 1);
        assert_eq!(big.add(x, x), big.elem(big.modulus() - 2));
    }
}
