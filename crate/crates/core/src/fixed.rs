//! Binary fixed-point transcendental functions on arbitrary-precision
//! integers. A result `m` at precision `p` stands for `m / 2^p`.
//!
//! `ln` and `ln2` are within [`LN_ERROR_ULPS`] units of the last place of the
//! true value. Callers widen their intervals by that much and retry at higher
//! precision when a rounding decision is still ambiguous.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Error bound of [`ln`] and [`ln2`], in units of `2^-prec`.
pub const LN_ERROR_ULPS: u32 = 2;

const GUARD_BITS: u64 = 48;

/// `atanh(z)` for `|z| <= 1/3`, with `z` and the result scaled by `2^w`.
fn atanh_scaled(z: &BigInt, w: u64) -> BigInt {
    let z2: BigInt = (z * z) >> w;
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut k: u64 = 1;
    loop {
        term = (&term * &z2) >> w;
        if term.is_zero() {
            break;
        }
        sum += &term / BigInt::from(2 * k + 1);
        k += 1;
    }
    sum
}

fn ln2_scaled(w: u64) -> BigInt {
    // ln 2 = 2 atanh(1/3)
    let third = (BigInt::one() << w) / BigInt::from(3);
    atanh_scaled(&third, w) << 1
}

/// `ln 2` scaled by `2^prec`.
pub fn ln2(prec: u64) -> BigInt {
    ln2_scaled(prec + GUARD_BITS) >> GUARD_BITS
}

/// `ln(y)` where `y = m / 2^(bits(m) - 1)` lies in `[1, 2)`, scaled by `2^w`.
fn ln_mantissa_scaled(m: &BigUint, w: u64) -> BigInt {
    let bits = m.bits();
    let keep = w + 2;
    let top: BigUint = if bits > keep {
        m >> (bits - keep)
    } else {
        m << (keep - bits)
    };
    // top / 2^(w+1) approximates y in [1, 2)
    let one = BigInt::one() << (w + 1);
    let t = BigInt::from(top);
    let z = ((&t - &one) << w) / (&t + &one);
    atanh_scaled(&z, w) << 1
}

/// Natural log of a positive rational, scaled by `2^prec`.
///
/// Panics if `x` is not positive.
pub fn ln(x: &Rational, prec: u64) -> BigInt {
    assert!(x.is_positive(), "ln of a non-positive value");
    let w = prec + GUARD_BITS;
    let (num, den) = (x.odd_numer(), x.odd_denom());
    let k = num.bits() as i64 - den.bits() as i64 + x.exp2();
    let mut acc = ln_mantissa_scaled(num, w) - ln_mantissa_scaled(den, w);
    if k != 0 {
        let extra = 64 - k.unsigned_abs().leading_zeros() as u64 + 2;
        let l2 = ln2_scaled(w + extra);
        acc += (l2 * BigInt::from(k)) >> extra;
    }
    acc >> GUARD_BITS
}

/// `e^x` for `x = mant / 2^prec`, returned scaled by `2^prec`. Relative error
/// is a few units in the last place; used only to pick rational
/// approximations whose exact logarithms are recomputed with [`ln`].
pub fn exp(mant: &BigInt, prec: u64) -> BigInt {
    let w = prec + GUARD_BITS;
    let x: BigInt = mant << GUARD_BITS;
    let l2 = ln2_scaled(w);
    // x = k ln2 + r with 0 <= r < ln2
    let k: BigInt = {
        let q = &x / &l2;
        if x.is_negative() && (&q * &l2) != x {
            q - 1
        } else {
            q
        }
    };
    let r = &x - &k * &l2;
    let one = BigInt::one() << w;
    let mut term = one.clone();
    let mut sum = one;
    let mut i: u64 = 1;
    loop {
        term = ((&term * &r) >> w) / BigInt::from(i);
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    let k: i64 = k.try_into().expect("exponent out of range");
    let shifted = if k >= 0 {
        sum << k as u64
    } else {
        sum >> (-k) as u64
    };
    shifted >> GUARD_BITS
}
