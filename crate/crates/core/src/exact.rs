//! Single-query exact attacks: adversarial prediction vectors whose exact
//! score factors uniquely back into the labeling.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, Weak};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decimal::{self, DecimalScore, ScoreKind};
use crate::error::{Error, Result};
use crate::fixed;
use crate::primes::{factor_over, first_primes, twin_primes};
use crate::rational::Rational;
use crate::scoring::{ClassLabeling, ExactScore, Labeling, PredictionMatrix, PredictionVector};

/// Upper limits on construction sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuards {
    /// Binary construction; the score numerator has `2^n` bits.
    pub binary_max_n: usize,
    pub twin_max_n: usize,
    /// `n * K` for the multi-class matrix.
    pub multiclass_max_cells: usize,
}

impl Default for SizeGuards {
    fn default() -> Self {
        SizeGuards {
            binary_max_n: 32,
            twin_max_n: 100_000,
            multiclass_max_cells: 10_000,
        }
    }
}

/// Beyond this the bitmask no longer fits the exponent type.
const BINARY_HARD_LIMIT: usize = 62;

fn guard(what: &'static str, requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        return Err(Error::SizeGuard {
            what,
            requested,
            limit,
        });
    }
    Ok(())
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

pub fn build_twin_prime_vector(n: usize) -> Result<PredictionVector> {
    build_twin_prime_vector_with(n, &SizeGuards::default())
}

pub fn build_twin_prime_vector_with(n: usize, guards: &SizeGuards) -> Result<PredictionVector> {
    require_positive(n)?;
    guard("twin-prime construction", n, guards.twin_max_n)?;
    let table = twin_primes(n)?;
    let pairs: Vec<(u64, u64)> = table.lower().iter().map(|&p| (p, p + 2)).collect();
    PredictionVector::from_u64_pairs(&pairs)
}

fn product(factors: &[u64]) -> BigUint {
    match factors.len() {
        0 => BigUint::one(),
        1 => BigUint::from(factors[0]),
        len => {
            let (a, b) = factors.split_at(len / 2);
            product(a) * product(b)
        }
    }
}

/// Inverts the twin-prime construction. `n` is taken from the score when
/// present and otherwise inferred from the numerator's factor count.
pub fn decode_twin_prime(score: &ExactScore) -> Result<Labeling> {
    decode_twin_prime_with(score, &SizeGuards::default())
}

pub fn decode_twin_prime_with(score: &ExactScore, guards: &SizeGuards) -> Result<Labeling> {
    let v = score.value();
    let num = v.odd_numer();
    if v.exp2() > 0 {
        return Err(Error::Decode("numerator is even".into()));
    }
    let zeros = v.exp2().unsigned_abs() as usize;

    // Every upper member is at least 7, so the factor count is bounded by bits / log2(7).
    let max_n = ((num.bits() as f64 / 7f64.log2()).floor() as usize).min(guards.twin_max_n);
    let n = match score.n() {
        Some(n) => n,
        None => infer_twin_size(num, max_n)?,
    };
    if n == 0 || n > guards.twin_max_n {
        return Err(Error::Decode(format!("implausible dataset size {n}")));
    }
    let table = twin_primes(n)?;
    let upper: Vec<u64> = table.lower().iter().map(|p| p + 2).collect();
    if product(&upper) != **num {
        return Err(Error::Decode(format!(
            "numerator is not the product of the first {n} upper twin primes"
        )));
    }

    let mut den = v.odd_denom().as_ref().clone();
    let mut bits = vec![false; n];
    for (i, &p) in table.lower().iter().enumerate() {
        let (q, r) = den.div_rem(&BigUint::from(p));
        if r.is_zero() {
            bits[i] = true;
            den = q;
        }
    }
    if !den.is_one() {
        return Err(Error::Decode("denominator has factors outside the construction".into()));
    }
    let ones = bits.iter().filter(|&&b| b).count();
    if ones + zeros != n {
        return Err(Error::Decode(format!(
            "power of two {zeros} does not match {} zero labels",
            n - ones
        )));
    }
    Labeling::new(bits)
}

/// Counts leading upper twin primes dividing `num` exactly once.
fn infer_twin_size(num: &BigUint, max_n: usize) -> Result<usize> {
    if max_n == 0 {
        return Err(Error::Decode("numerator too small for any dataset".into()));
    }
    let table = twin_primes(max_n)?;
    let upper: Vec<u64> = table.lower().iter().map(|p| p + 2).collect();
    let f = factor_over(num, &upper);
    let n = upper.iter().take_while(|&&q| f.exponent(q) == 1).count();
    if n == 0 {
        return Err(Error::Decode("numerator has no upper twin prime factor".into()));
    }
    Ok(n)
}

/// The binary-representation construction together with its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRepVector {
    n: usize,
    vector: PredictionVector,
}

impl BinaryRepVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self) -> &PredictionVector {
        &self.vector
    }

    pub fn into_vector(self) -> PredictionVector {
        self.vector
    }
}

impl AsRef<PredictionVector> for BinaryRepVector {
    fn as_ref(&self) -> &PredictionVector {
        &self.vector
    }
}

/// `2^(2^n) - 1 = ∏_{i<=n} (1 + 2^(2^(i-1)))`, shared between callers.
fn fermat_product(n: usize) -> Arc<BigUint> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Weak<BigUint>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut map = cache.lock().expect("cache poisoned");
    if let Some(v) = map.get(&n).and_then(Weak::upgrade) {
        return v;
    }
    let v = Arc::new((BigUint::one() << (1u64 << n)) - 1u32);
    map.insert(n, Arc::downgrade(&v));
    v
}

pub fn build_binary_vector(n: usize) -> Result<BinaryRepVector> {
    build_binary_vector_with(n, &SizeGuards::default())
}

pub fn build_binary_vector_with(n: usize, guards: &SizeGuards) -> Result<BinaryRepVector> {
    require_positive(n)?;
    guard("binary construction", n, guards.binary_max_n.min(BINARY_HARD_LIMIT))?;
    let mut entries = Vec::with_capacity(n);
    let mut complements = Vec::with_capacity(n);
    let one = Arc::new(BigUint::one());
    for i in 0..n {
        let shift = 1u64 << i;
        let den = Arc::new((BigUint::one() << shift) + 1u32);
        // α/(1+α) and 1/(1+α), α = 2^(2^i)
        entries.push(Rational::from_odd_parts(false, one.clone(), den.clone(), shift as i64));
        complements.push(Rational::from_odd_parts(false, one.clone(), den, 0));
    }
    let vector = PredictionVector::from_parts(entries, complements)
        .with_denominator_product(fermat_product(n));
    Ok(BinaryRepVector { n, vector })
}

/// Labeling whose 1-positions are the set bits of `exponent`, bit `i-1`
/// standing for label `i`.
pub fn binary_labeling_from_exponent(exponent: u64, n: usize) -> Result<Labeling> {
    require_positive(n)?;
    if n < 64 && exponent >> n != 0 {
        return Err(Error::Decode(format!("exponent {exponent} needs more than {n} bits")));
    }
    Labeling::from_mask(exponent, n)
}

/// The power-of-two exponent a labeling produces under the binary construction.
pub fn binary_exponent(labels: &Labeling) -> Result<u64> {
    if labels.len() > 64 {
        return Err(Error::InvalidArgument("labeling longer than 64".into()));
    }
    Ok(labels
        .iter()
        .enumerate()
        .filter(|&(_, b)| b)
        .fold(0u64, |acc, (i, _)| acc | (1 << i)))
}

pub fn decode_binary(score: &ExactScore) -> Result<Labeling> {
    let v = score.value();
    if !v.odd_denom().is_one() || v.exp2() > 0 {
        return Err(Error::Decode("denominator is not a power of two".into()));
    }
    let num = v.odd_numer();
    let bits = num.bits();
    if !bits.is_power_of_two() {
        return Err(Error::Decode("numerator is not 2^(2^n) - 1".into()));
    }
    let n = bits.trailing_zeros() as usize;
    if let Some(expected) = score.n() {
        if expected != n {
            return Err(Error::Decode(format!(
                "numerator implies n = {n}, score says n = {expected}"
            )));
        }
    }
    if n == 0 || n > BINARY_HARD_LIMIT {
        return Err(Error::Decode(format!("implausible dataset size {n}")));
    }
    let expect = fermat_product(n);
    if !Arc::ptr_eq(num, &expect) && **num != *expect {
        return Err(Error::Decode("numerator is not 2^(2^n) - 1".into()));
    }
    binary_labeling_from_exponent(v.exp2().unsigned_abs(), n)
}

/// Decodes the binary construction from a rounded Log-Loss.
///
/// `N = (2^n - 1) + Σ_j log2(1 + 2^(-2^(j-1))) - n·LL/ln 2`, evaluated in
/// fixed point; the result must lie within 1/4 of an integer in `[0, 2^n)`.
pub fn decode_binary_from_decimal(ll: &DecimalScore, n: usize) -> Result<Labeling> {
    require_positive(n)?;
    if n > BINARY_HARD_LIMIT {
        return Err(Error::SizeGuard {
            what: "binary construction",
            requested: n,
            limit: BINARY_HARD_LIMIT,
        });
    }
    if ll.kind() != ScoreKind::LogLoss {
        return Err(Error::InvalidArgument("expected a log-loss score".into()));
    }
    let loss = ll
        .value()
        .ok_or_else(|| Error::InvalidArgument("log-loss is undefined".into()))?;
    let prec: u64 = 64 + 2 * n as u64 + 4 * ll.phi() as u64;

    let l2 = fixed::ln2(prec);
    let mut total = BigInt::from((1u64 << n) - 1) << prec;
    for j in 0..n {
        let m = 1u64 << j;
        if m > prec + 8 {
            break;
        }
        // log2(1 + 2^-m) = ln((2^m + 1) / 2^m) / ln 2
        let x = Rational::from_biguints((BigUint::one() << m) + 1u32, BigUint::one() << m)?;
        total += (fixed::ln(&x, prec) << prec) / &l2;
    }
    // n·LL / ln 2, scaled by 2^prec
    let nl = &loss * &Rational::from(n as u64);
    let scaled = (nl.numer() << (2 * prec)) / (BigInt::from(nl.denom()) * &l2);
    let real = total - scaled;

    let half = BigInt::one() << (prec - 1);
    let nearest: BigInt = (&real + &half) >> prec;
    let residual = (&real - (&nearest << prec)).abs();
    if residual > (BigInt::one() << (prec - 2)) {
        let r = Rational::new(residual, BigInt::one() << prec)?;
        return Err(Error::InsufficientPrecision {
            residual: decimal::round_sig(&r, 3),
        });
    }
    let exponent = nearest
        .to_u64()
        .filter(|&e| e >> n == 0)
        .ok_or_else(|| Error::Decode(format!("exponent {nearest} outside [0, 2^{n})")))?;
    binary_labeling_from_exponent(exponent, n)
}

/// Digits `phi` with `10^(phi-1) > 4 (2^n + n)`, enough for
/// [`decode_binary_from_decimal`] to stay within its 1/4 residual.
pub fn required_precision_binary(n: usize) -> u32 {
    let bound = (BigUint::one() << n) + BigUint::from(n);
    decimal::digits_exceeding(&(bound * 4u32))
}

pub fn build_multiclass_matrix(n: usize, k: usize) -> Result<PredictionMatrix> {
    build_multiclass_matrix_with(n, k, &SizeGuards::default())
}

pub fn build_multiclass_matrix_with(
    n: usize,
    k: usize,
    guards: &SizeGuards,
) -> Result<PredictionMatrix> {
    require_positive(n)?;
    if k < 2 {
        return Err(Error::InvalidArgument(format!("class count {k} < 2")));
    }
    guard("multi-class construction", n.saturating_mul(k), guards.multiclass_max_cells)?;
    let rows = first_primes(n)
        .into_iter()
        .map(|p| {
            let powers: Vec<BigUint> = (0..k).map(|j| BigUint::from(p).pow(j as u32)).collect();
            let alpha: BigUint = powers.iter().sum();
            powers
                .into_iter()
                .map(|pj| Rational::from_biguints(pj, alpha.clone()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PredictionMatrix::new(rows)
}

/// Normaliser `Σ_{j<K} p^j` of a multi-class row.
fn normalizer(p: u64, k: usize) -> BigUint {
    (0..k).map(|j| BigUint::from(p).pow(j as u32)).sum()
}

pub fn decode_multiclass(score: &ExactScore, n: usize, k: usize) -> Result<ClassLabeling> {
    require_positive(n)?;
    if k < 2 {
        return Err(Error::InvalidArgument(format!("class count {k} < 2")));
    }
    let primes = first_primes(n);
    let alpha: BigUint = primes.iter().map(|&p| normalizer(p, k)).product();
    // value = ∏α / M
    let m = &Rational::from_biguints(alpha, BigUint::one())? / score.value();
    if !m.denom().is_one() || !m.is_positive() {
        return Err(Error::Decode("∏α / score is not an integer".into()));
    }
    let m = m.numer().magnitude().clone();
    let f = factor_over(&m, &primes);
    if !f.is_complete() {
        return Err(Error::Decode("factor outside the first n primes".into()));
    }
    let classes = primes
        .iter()
        .map(|&p| {
            let e = f.exponent(p) as usize;
            if e >= k {
                Err(Error::Decode(format!("exponent {e} of {p} is at least K = {k}")))
            } else {
                Ok(e + 1)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ClassLabeling::new(classes, k)
}
