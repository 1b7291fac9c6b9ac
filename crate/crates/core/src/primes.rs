//! Primes, twin primes and trial factorisation over a fixed prime set.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `composite[i]` for `i <= limit`.
fn sieve(limit: usize) -> Vec<bool> {
    let mut composite = vec![false; limit + 1];
    composite[0] = true;
    if limit >= 1 {
        composite[1] = true;
    }
    let mut i = 2;
    while i * i <= limit {
        if !composite[i] {
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    composite
}

/// The first `n` primes, starting at 2.
pub fn first_primes(n: usize) -> Vec<u64> {
    let mut limit = 64usize;
    loop {
        let composite = sieve(limit);
        let primes: Vec<u64> = (0..=limit)
            .filter(|&i| !composite[i])
            .take(n)
            .map(|i| i as u64)
            .collect();
        if primes.len() == n {
            return primes;
        }
        limit *= 2;
    }
}

/// Lower members `p` of twin-prime pairs `(p, p + 2)`, ascending from 5.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinPrimeTable {
    lower: Vec<u64>,
}

impl TwinPrimeTable {
    pub fn lower(&self) -> &[u64] {
        &self.lower
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// The `i`-th lower member, 1-based.
    pub fn get(&self, i: usize) -> Option<u64> {
        i.checked_sub(1).and_then(|k| self.lower.get(k).copied())
    }

    /// 1-based position of `p`.
    pub fn index_of(&self, p: u64) -> Result<usize> {
        self.lower
            .binary_search(&p)
            .map(|k| k + 1)
            .map_err(|_| Error::NotInTable(p))
    }
}

/// The first `n` twin-prime lower members `5, 11, 17, 29, ...`.
pub fn twin_primes(n: usize) -> Result<TwinPrimeTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("twin prime count must be at least 1".into()));
    }
    let mut limit = 1024usize;
    loop {
        let composite = sieve(limit + 2);
        let lower: Vec<u64> = (5..=limit)
            .filter(|&p| !composite[p] && !composite[p + 2])
            .take(n)
            .map(|p| p as u64)
            .collect();
        if lower.len() == n {
            return Ok(TwinPrimeTable { lower });
        }
        limit *= 2;
    }
}

/// 1-based index of `p` in `table`.
pub fn twin_index(p: u64, table: &TwinPrimeTable) -> Result<usize> {
    table.index_of(p)
}

/// Exponents of the listed primes in an integer, plus the unfactored rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub exponents: BTreeMap<u64, u32>,
    pub leftover: BigUint,
}

impl Factorization {
    pub fn exponent(&self, p: u64) -> u32 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.leftover.is_one()
    }

    /// Total number of prime factors found, with multiplicity.
    pub fn count(&self) -> u64 {
        self.exponents.values().map(|&e| e as u64).sum()
    }
}

/// Divides `q` by each of `primes` as often as possible.
pub fn factor_over(q: &BigUint, primes: &[u64]) -> Factorization {
    let mut rest = q.clone();
    let mut exponents = BTreeMap::new();
    if rest.is_zero() {
        return Factorization {
            exponents,
            leftover: rest,
        };
    }
    for &p in primes {
        if p < 2 || exponents.contains_key(&p) {
            continue;
        }
        let mut e = 0u32;
        loop {
            let (quot, rem) = num_integer::Integer::div_rem(&rest, &BigUint::from(p));
            if !rem.is_zero() {
                break;
            }
            rest = quot;
            e += 1;
        }
        if e > 0 {
            exponents.insert(p, e);
        }
    }
    Factorization {
        exponents,
        leftover: rest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_twin_primes() {
        let t = twin_primes(10).unwrap();
        assert_eq!(t.lower(), &[5, 11, 17, 29, 41, 59, 71, 101, 107, 137]);
        assert_eq!(twin_index(29, &t).unwrap(), 4);
        assert_eq!(twin_index(5, &t).unwrap(), 1);
        assert_eq!(twin_index(7, &t), Err(Error::NotInTable(7)));
        assert!(twin_primes(0).is_err());
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let composite = sieve(100_000);
        for n in 0..=100_000u64 {
            assert_eq!(is_prime(n), !composite[n as usize], "{n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn first_primes_list() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert!(first_primes(0).is_empty());
    }

    #[test]
    fn factorization() {
        let f = factor_over(&BigUint::from(1729u32 * 4), &[2, 7, 13, 19]);
        assert_eq!(f.exponent(2), 2);
        assert_eq!(f.exponent(7), 1);
        assert_eq!(f.exponent(13), 1);
        assert_eq!(f.exponent(19), 1);
        assert!(f.is_complete());
        let g = factor_over(&BigUint::from(7u32 * 23), &[7]);
        assert_eq!(g.leftover, BigUint::from(23u32));
        assert_eq!(g.count(), 1);
    }
}
