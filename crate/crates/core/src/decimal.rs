//! Significant-digit decimal rendering of scores.
//!
//! All scores are rounded once, to `phi` significant digits, round-half-even,
//! and printed in normalized scientific notation (`4.1e-1`, `1.0e0`, `7e2`).
//! Two scores are equal on the wire exactly when their strings are equal.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScoreKind {
    LogLoss,
    Auc,
    AucNotDefined,
}

/// A score rounded to `phi` significant digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecimalScore {
    digits: String,
    phi: u32,
    kind: ScoreKind,
}

impl DecimalScore {
    pub(crate) fn new(digits: String, phi: u32, kind: ScoreKind) -> Self {
        DecimalScore { digits, phi, kind }
    }

    pub fn auc_not_defined(phi: u32) -> Self {
        DecimalScore {
            digits: String::new(),
            phi,
            kind: ScoreKind::AucNotDefined,
        }
    }

    /// Parses a wire string. `ND` stands for an undefined AUC.
    pub fn parse(s: &str, kind: ScoreKind) -> Result<Self> {
        if s == "ND" {
            return match kind {
                ScoreKind::Auc | ScoreKind::AucNotDefined => Ok(Self::auc_not_defined(0)),
                ScoreKind::LogLoss => Err(Error::Parse("log-loss cannot be ND".into())),
            };
        }
        let phi = significant_digits_of(s)?;
        Ok(DecimalScore {
            digits: s.to_string(),
            phi,
            kind,
        })
    }

    pub fn digits(&self) -> &str {
        &self.digits
    }

    pub fn phi(&self) -> u32 {
        self.phi
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn is_defined(&self) -> bool {
        self.kind != ScoreKind::AucNotDefined
    }

    /// Exact value of the digit string.
    pub fn value(&self) -> Option<Rational> {
        if !self.is_defined() {
            return None;
        }
        Rational::from_decimal_str(&self.digits).ok()
    }

    /// Wire form: the digit string, or `ND`.
    pub fn wire(&self) -> &str {
        if self.is_defined() {
            &self.digits
        } else {
            "ND"
        }
    }
}

impl fmt::Display for DecimalScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.wire())
    }
}

/// Validates normalized scientific notation and returns its digit count.
fn significant_digits_of(s: &str) -> Result<u32> {
    let bad = || Error::Parse(format!("not normalized scientific notation: {s:?}"));
    let (mantissa, exp) = s.split_once('e').ok_or_else(bad)?;
    exp.parse::<i64>().map_err(|_| bad())?;
    if exp.starts_with('+') || (exp.len() > 1 && exp.starts_with('0')) {
        return Err(bad());
    }
    let (lead, rest) = match mantissa.split_once('.') {
        Some((l, r)) if !r.is_empty() => (l, r),
        Some(_) => return Err(bad()),
        None => (mantissa, ""),
    };
    if lead.len() != 1 || !lead.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if !rest.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if lead == "0" && (rest.bytes().any(|b| b != b'0') || exp != "0") {
        return Err(bad());
    }
    Ok(1 + rest.len() as u32)
}

fn format_sig(q: &BigUint, exp10: i64, phi: u32) -> String {
    let s = q.to_str_radix(10);
    debug_assert_eq!(s.len(), phi as usize);
    if phi == 1 {
        format!("{s}e{exp10}")
    } else {
        format!("{}.{}e{exp10}", &s[..1], &s[1..])
    }
}

fn zero_string(phi: u32) -> String {
    if phi == 1 {
        "0e0".to_string()
    } else {
        format!("0.{}e0", "0".repeat(phi as usize - 1))
    }
}

fn pow10(k: u32) -> BigUint {
    BigUint::from(10u32).pow(k)
}

/// Rounds a non-negative rational to `phi` significant digits, half-even.
pub fn round_sig(x: &Rational, phi: u32) -> String {
    assert!(phi >= 1, "phi must be positive");
    assert!(!x.is_negative(), "negative scores are not representable");
    if x.is_zero() {
        return zero_string(phi);
    }
    let num = x.numer().magnitude().clone();
    let den = x.denom();
    // first guess at floor(log10 x), then correct by exact comparison
    let guess = x.ln_f64().map(|l| (l / std::f64::consts::LN_10).floor()).unwrap_or(0.0);
    let mut e10 = guess as i64;
    let ge_pow = |e: i64| -> bool {
        // x >= 10^e
        if e >= 0 {
            num >= &den * pow10(e as u32)
        } else {
            &num * pow10((-e) as u32) >= den
        }
    };
    while !ge_pow(e10) {
        e10 -= 1;
    }
    while ge_pow(e10 + 1) {
        e10 += 1;
    }
    // scaled = x * 10^(phi - 1 - e10)
    let shift = phi as i64 - 1 - e10;
    let (sn, sd) = if shift >= 0 {
        (&num * pow10(shift as u32), den)
    } else {
        (num, &den * pow10((-shift) as u32))
    };
    let (mut q, rem) = sn.div_rem(&sd);
    let twice: BigUint = rem << 1u32;
    if twice > sd || (twice == sd && q.is_odd()) {
        q += 1u32;
    }
    if q == pow10(phi) {
        q = pow10(phi - 1);
        e10 += 1;
    }
    format_sig(&q, e10, phi)
}

/// Correctly rounded `ln(x) / n` at `phi` significant digits, for `x > 1`.
///
/// The logarithm is evaluated at a working precision of at least
/// `max(2 phi + 10 digits, 64 bits)` and widened until both ends of its
/// error interval round identically.
pub fn round_ln_over(x: &Rational, n: usize, phi: u32) -> String {
    assert!(n >= 1);
    assert!(x > &Rational::one(), "log-loss requires a score above 1");
    let digits_bits = ((2 * phi as u64 + 10) as f64 * std::f64::consts::LOG2_10).ceil() as u64;
    let mut prec = digits_bits.max(64) + 16;
    loop {
        let m = fixed::ln(x, prec);
        let slack = BigInt::from(fixed::LN_ERROR_ULPS);
        let scale = BigInt::from(n) << prec;
        let lo = &m - &slack;
        let hi = &m + &slack;
        if lo.is_positive() {
            let lo = Rational::new(lo, scale.clone()).expect("nonzero scale");
            let hi = Rational::new(hi, scale).expect("nonzero scale");
            let a = round_sig(&lo, phi);
            if a == round_sig(&hi, phi) {
                return a;
            }
        }
        prec *= 2;
    }
}

/// Fast path: rounds an f64 estimate carrying absolute error at most `err`.
/// Returns `None` when the interval straddles a rounding boundary.
pub(crate) fn round_sig_f64(v: f64, err: f64, phi: u32) -> Option<String> {
    if !v.is_finite() || !err.is_finite() || v - err <= 0.0 {
        return None;
    }
    let p = phi as usize - 1;
    let lo = format!("{:.*e}", p, v - err);
    let hi = format!("{:.*e}", p, v + err);
    (lo == hi).then_some(lo)
}

/// The power of ten a normalized string lives in, `k` in `d.dd..e{k}`.
pub fn decimal_exponent(s: &str) -> Option<i64> {
    s.split_once('e').and_then(|(_, e)| e.parse().ok())
}

/// Significant digits needed so that `10^(phi-1) > bound`.
pub(crate) fn digits_exceeding(bound: &BigUint) -> u32 {
    let mut phi = 1u32;
    while pow10(phi - 1) <= *bound {
        phi += 1;
    }
    phi
}
