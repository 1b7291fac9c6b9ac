//! Exact rationals over arbitrary-precision integers.
//!
//! A value is kept as `±(odd numerator / odd denominator) · 2^exp2`, always
//! reduced. Splitting the power of two out keeps reduction cheap for the
//! scores produced by the binary construction, whose numerators run to
//! billions of bits while their denominators are pure powers of two. Limbs
//! sit behind `Arc` so scores computed from the same vector share them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    negative: bool,
    num: Arc<BigUint>,
    den: Arc<BigUint>,
    exp2: i64,
}

fn strip_twos(x: BigUint) -> (BigUint, i64) {
    match x.trailing_zeros() {
        None | Some(0) => (x, 0),
        Some(t) => (x >> t, t as i64),
    }
}

fn reduce_odd(n: BigUint, d: BigUint) -> (BigUint, BigUint) {
    if n.is_one() || d.is_one() {
        return (n, d);
    }
    let g = gcd(&n, &d);
    if g.is_one() {
        (n, d)
    } else {
        (n / &g, d / &g)
    }
}

/// Binary gcd degrades to one subtraction per step when the operands have
/// very different sizes, so take one remainder first.
pub(crate) fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (big, small) = if a.bits() >= b.bits() { (a, b) } else { (b, a) };
    if small.is_zero() {
        return big.clone();
    }
    if big.bits() > 2 * small.bits() + 64 {
        let r = big % small;
        if r.is_zero() {
            return small.clone();
        }
        return small.gcd(&r);
    }
    big.gcd(small)
}

fn gcd_arc(a: &Arc<BigUint>, b: &Arc<BigUint>) -> BigUint {
    if a.is_one() || b.is_one() {
        BigUint::one()
    } else {
        gcd(a, b)
    }
}

fn div_arc(x: &Arc<BigUint>, g: &BigUint) -> Arc<BigUint> {
    if g.is_one() {
        Arc::clone(x)
    } else {
        Arc::new(x.as_ref() / g)
    }
}

fn mul_arc(x: Arc<BigUint>, y: Arc<BigUint>) -> Arc<BigUint> {
    if x.is_one() {
        y
    } else if y.is_one() {
        x
    } else {
        Arc::new(x.as_ref() * y.as_ref())
    }
}

/// Natural log of a positive integer, accurate to roughly f64 precision
/// regardless of how many bits the integer has.
pub(crate) fn ln_biguint_f64(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map(f64::ln).unwrap_or(f64::NAN)
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
        top.ln() + shift as f64 * LN_2
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational {
            negative: false,
            num: Arc::new(BigUint::zero()),
            den: Arc::new(BigUint::one()),
            exp2: 0,
        }
    }

    pub fn one() -> Self {
        Self::pow2(0)
    }

    pub fn half() -> Self {
        Self::pow2(-1)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Rational {
            negative: false,
            num: Arc::new(BigUint::one()),
            den: Arc::new(BigUint::one()),
            exp2: e,
        }
    }

    fn normalize(negative: bool, num: BigUint, den: BigUint, exp2: i64) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero();
        }
        let (n, tn) = strip_twos(num);
        let (d, td) = strip_twos(den);
        let (n, d) = reduce_odd(n, d);
        Rational {
            negative,
            num: Arc::new(n),
            den: Arc::new(d),
            exp2: exp2 + tn - td,
        }
    }

    /// Builds from already-reduced odd parts. The caller guarantees both are
    /// odd and coprime.
    pub(crate) fn from_odd_parts(
        negative: bool,
        num: Arc<BigUint>,
        den: Arc<BigUint>,
        exp2: i64,
    ) -> Self {
        debug_assert!(num.is_odd() && den.is_odd());
        Rational {
            negative,
            num,
            den,
            exp2,
        }
    }

    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
        Ok(Self::normalize(
            negative && !num.is_zero(),
            num.magnitude().clone(),
            den.magnitude().clone(),
            0,
        ))
    }

    pub fn from_biguints(num: BigUint, den: BigUint) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(false, num, den, 0))
    }

    pub fn from_u64s(num: u64, den: u64) -> Result<Self> {
        Self::from_biguints(BigUint::from(num), BigUint::from(den))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        let v: BigInt = v.into();
        Self::normalize(v.is_negative(), v.magnitude().clone(), BigUint::one(), 0)
    }

    /// Parses a plain or scientific decimal such as `0.2`, `-1.5`, `3.2e-1`.
    pub fn from_decimal_str(s: &str) -> Result<Self> {
        let err = || Error::Parse(format!("not a decimal number: {s:?}"));
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(pos) => {
                let e: i64 = s[pos + 1..].parse().map_err(|_| err())?;
                (&s[..pos], e)
            }
            None => (s, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let mag: BigUint = digits.parse().map_err(|_| err())?;
        let scale = exponent - frac_part.len() as i64;
        let ten = BigUint::from(10u32);
        let (num, den) = if scale >= 0 {
            (mag * ten.pow(scale as u32), BigUint::one())
        } else {
            (mag, ten.pow((-scale) as u32))
        };
        Ok(Self::normalize(negative, num, den, 0))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.exp2 == 0 && self.num.is_one() && self.den.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn is_positive(&self) -> bool {
        !self.negative && !self.is_zero()
    }

    /// Odd part of the numerator's magnitude (zero for the zero value).
    pub fn odd_numer(&self) -> &Arc<BigUint> {
        &self.num
    }

    /// Odd part of the denominator.
    pub fn odd_denom(&self) -> &Arc<BigUint> {
        &self.den
    }

    /// Exponent of two: the value is `±odd_numer / odd_denom · 2^exp2`.
    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    pub fn numer(&self) -> BigInt {
        let mag = if self.exp2 > 0 {
            self.num.as_ref() << self.exp2 as u64
        } else {
            self.num.as_ref().clone()
        };
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, mag)
    }

    pub fn denom(&self) -> BigUint {
        if self.exp2 < 0 {
            self.den.as_ref() << (-self.exp2) as u64
        } else {
            self.den.as_ref().clone()
        }
    }

    pub fn abs(&self) -> Self {
        Rational {
            negative: false,
            ..self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational {
            negative: self.negative,
            num: Arc::clone(&self.den),
            den: Arc::clone(&self.num),
            exp2: -self.exp2,
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> Self {
        &Rational::one() - self
    }

    /// Rough `log2 |self|` from bit lengths; within 1 of the truth.
    fn log2_floorish(&self) -> i64 {
        self.num.bits() as i64 - self.den.bits() as i64 + self.exp2
    }

    /// Natural log at f64 accuracy. `None` for non-positive values.
    pub fn ln_f64(&self) -> Option<f64> {
        if !self.is_positive() {
            return None;
        }
        Some(ln_biguint_f64(&self.num) - ln_biguint_f64(&self.den) + self.exp2 as f64 * LN_2)
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.ln_f64_abs().exp();
        if self.negative {
            -v
        } else {
            v
        }
    }

    fn ln_f64_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_biguint_f64(&self.num) - ln_biguint_f64(&self.den) + self.exp2 as f64 * LN_2
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (la, lb) = (self.log2_floorish(), other.log2_floorish());
        if la > lb + 1 {
            return Ordering::Greater;
        }
        if lb > la + 1 {
            return Ordering::Less;
        }
        // a_num * b_den * 2^ea  vs  b_num * a_den * 2^eb
        let mut lhs = self.num.as_ref() * other.den.as_ref();
        let mut rhs = other.num.as_ref() * self.den.as_ref();
        match self.exp2.cmp(&other.exp2) {
            Ordering::Greater => lhs <<= (self.exp2 - other.exp2) as u64,
            Ordering::Less => rhs <<= (other.exp2 - self.exp2) as u64,
            Ordering::Equal => {}
        }
        lhs.cmp(&rhs)
    }

    fn add_signed(&self, other: &Self, negate_other: bool) -> Self {
        let other_negative = other.negative != negate_other && !other.is_zero();
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return Rational {
                negative: other_negative,
                ..other.clone()
            };
        }
        let m = self.exp2.min(other.exp2);
        let a = (self.num.as_ref() * other.den.as_ref()) << (self.exp2 - m) as u64;
        let b = (other.num.as_ref() * self.den.as_ref()) << (other.exp2 - m) as u64;
        let den = self.den.as_ref() * other.den.as_ref();
        let sa = BigInt::from_biguint(if self.negative { Sign::Minus } else { Sign::Plus }, a);
        let sb = BigInt::from_biguint(if other_negative { Sign::Minus } else { Sign::Plus }, b);
        let sum = sa + sb;
        Self::normalize(sum.is_negative(), sum.magnitude().clone(), den, m)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.negative, other.negative) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_magnitude(other),
            (true, true) => other.cmp_magnitude(self),
        }
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;

    fn mul(self, rhs: &'a Rational) -> Rational {
        if self.is_zero() || rhs.is_zero() {
            return Rational::zero();
        }
        let g1 = gcd_arc(&self.num, &rhs.den);
        let g2 = gcd_arc(&rhs.num, &self.den);
        let num = mul_arc(div_arc(&self.num, &g1), div_arc(&rhs.num, &g2));
        let den = mul_arc(div_arc(&self.den, &g2), div_arc(&rhs.den, &g1));
        Rational {
            negative: self.negative != rhs.negative,
            num,
            den,
            exp2: self.exp2 + rhs.exp2,
        }
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        &self * &rhs
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;

    /// Panics on division by zero; use [`Rational::checked_div`] otherwise.
    fn div(self, rhs: &'a Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        self.add_signed(rhs, false)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        self.add_signed(rhs, true)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        &self - &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        if self.is_zero() {
            self
        } else {
            Rational {
                negative: !self.negative,
                ..self
            }
        }
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::from_integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.bits() + self.den.bits() + self.exp2.unsigned_abs() > 4096 {
            write!(
                f,
                "Rational(~2^{} over odd parts of {}/{} bits)",
                self.log2_floorish(),
                self.num.bits(),
                self.den.bits()
            )
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`; the result is reduced.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.parse().map_err(|_| err())?;
                let q: BigInt = q.parse().map_err(|_| err())?;
                Rational::new(p, q)
            }
            None => Ok(Rational::from_integer(s.parse::<BigInt>().map_err(|_| err())?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn reduces_on_construction() {
        assert_eq!(r("6/8").to_string(), "3/4");
        assert_eq!(r("-10/4").to_string(), "-5/2");
        assert_eq!(r("0/7").to_string(), "0/1");
        assert_eq!(r("12").to_string(), "12/1");
        assert_eq!(r("5/-10").to_string(), "-1/2");
        assert_eq!("1/0".parse::<Rational>(), Err(Error::DivisionByZero));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&r("1/3") + &r("1/6"), r("1/2"));
        assert_eq!(&r("1/3") - &r("1/2"), r("-1/6"));
        assert_eq!(&r("2/3") * &r("9/4"), r("3/2"));
        assert_eq!(&r("2/3") / &r("4/9"), r("3/2"));
        assert_eq!(r("5/7").one_minus(), r("2/7"));
        assert_eq!(r("1/2").one_minus(), r("1/2"));
        assert_eq!(&r("3/8") - &r("3/8"), Rational::zero());
        assert!(r("0").recip().is_err());
    }

    #[test]
    fn ordering() {
        assert!(r("1/3") < r("1/2"));
        assert!(r("-1/2") < r("1/3"));
        assert!(r("-1/2") < r("-1/3"));
        assert!(r("1024/3") > r("341/1"));
        assert_eq!(r("4/6").cmp(&r("2/3")), Ordering::Equal);
        let huge = Rational::pow2(1 << 20);
        assert!(huge > r("12345678901234567890/3"));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Rational::from_decimal_str("0.2").unwrap(), r("1/5"));
        assert_eq!(Rational::from_decimal_str("3.2e-1").unwrap(), r("8/25"));
        assert_eq!(Rational::from_decimal_str("1.0e0").unwrap(), r("1"));
        assert_eq!(Rational::from_decimal_str("-1.5").unwrap(), r("-3/2"));
        assert_eq!(Rational::from_decimal_str("6.93e2").unwrap(), r("693"));
        assert!(Rational::from_decimal_str("abc").is_err());
        assert!(Rational::from_decimal_str("1.2.3").is_err());
        assert!(Rational::from_decimal_str("").is_err());
    }

    #[test]
    fn ln_f64_handles_huge_operands() {
        let x = Rational::pow2(1 << 30);
        let ln = x.ln_f64().unwrap();
        assert!((ln / ((1u64 << 30) as f64 * LN_2) - 1.0).abs() < 1e-12);
        assert!((r("91/55").ln_f64().unwrap() - (91f64 / 55f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn numer_denom_materialise_twos() {
        let x = r("12/5");
        assert_eq!(x.exp2(), 2);
        assert_eq!(x.numer(), BigInt::from(12));
        assert_eq!(x.denom(), BigUint::from(5u32));
    }
}
