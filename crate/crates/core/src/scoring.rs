//! Domain types and the scoring engine.
//!
//! Log-Loss is never materialised as a real number in exact mode. Instead
//! [`exact_score`] returns `e^(n·LL)`, which for rational predictions is the
//! reciprocal of `∏ [x_i if ℓ_i = 1 else 1 − x_i]` and therefore an exact
//! rational. Fixed-precision reporting ([`logloss_decimal`], [`auc`]) rounds
//! once to `phi` significant digits.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::One;

use crate::decimal::{self, DecimalScore, ScoreKind};
use crate::error::{Error, Result};
use crate::rational::{ln_biguint_f64, Rational};

/// Ground-truth binary labels; position `i` (0-based here) is datapoint
/// `d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling {
    bits: Vec<bool>,
}

impl Labeling {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty("labeling"));
        }
        Ok(Labeling { bits })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidLabeling(format!("label {b} is not 0 or 1")));
        }
        Self::new(bits.iter().map(|&b| b == 1).collect())
    }

    /// The `len` low bits of `mask`, bit `i` giving label `i`.
    pub fn from_mask(mask: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(Error::InvalidArgument(format!("mask labeling of length {len}")));
        }
        Self::new((0..len).map(|i| (mask >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }

    /// Indices (0-based) labelled 1.
    pub fn positives(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i]).collect()
    }

    /// Indices (0-based) labelled 0.
    pub fn negatives(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.bits[i]).collect()
    }

    /// Number of positions where the two labelings agree.
    pub fn agreement(&self, other: &Labeling) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a == b).count()
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Labeling {
    type Err = Error;

    /// Bitstring form, index 1 leftmost: `"101"`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidLabeling(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Labeling::new(bits)
    }
}

/// Multi-class labels in `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassLabeling {
    classes: Vec<usize>,
    k: usize,
}

impl ClassLabeling {
    pub fn new(classes: Vec<usize>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("class count {k} < 2")));
        }
        if classes.is_empty() {
            return Err(Error::Empty("class labeling"));
        }
        for (index, &class) in classes.iter().enumerate() {
            if class == 0 || class > k {
                return Err(Error::ClassOutOfRange {
                    index,
                    class,
                    classes: k,
                });
            }
        }
        Ok(ClassLabeling { classes, k })
    }

    /// Comma-separated classes, e.g. `"2,3"`.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let classes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidLabeling(format!("bad class {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(classes, k)
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

impl fmt::Display for ClassLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Per-point `-g` contribution in f64 with a bound on its absolute error.
#[derive(Debug, Clone, Copy)]
struct TermEstimate {
    value: f64,
    err: f64,
}

impl TermEstimate {
    fn of(c: &Rational) -> Self {
        // -ln c = ln(den) - ln(num) - exp2 ln 2
        let ln_num = ln_biguint_f64(c.odd_numer());
        let ln_den = ln_biguint_f64(c.odd_denom());
        let shift = c.exp2() as f64 * std::f64::consts::LN_2;
        let value = ln_den - ln_num - shift;
        let err = 1e-15 * (ln_num.abs() + ln_den.abs() + shift.abs() + value.abs() + 1.0);
        TermEstimate { value, err }
    }
}

/// Binary prediction scores, each strictly inside (0, 1).
#[derive(Debug, Clone)]
pub struct PredictionVector {
    entries: Vec<Rational>,
    complements: Vec<Rational>,
    terms: Vec<(TermEstimate, TermEstimate)>,
    den_product: OnceLock<Arc<BigUint>>,
}

impl PartialEq for PredictionVector {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for PredictionVector {}

impl PredictionVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("prediction vector"));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for (index, x) in entries.iter().enumerate() {
            if x <= &zero || x >= &one {
                return Err(Error::PredictionOutOfRange {
                    index,
                    value: x.to_string(),
                });
            }
        }
        let complements = entries.iter().map(Rational::one_minus).collect();
        Ok(Self::from_parts(entries, complements))
    }

    /// Trusted constructor for builders that already hold `1 - x_i`.
    pub(crate) fn from_parts(entries: Vec<Rational>, complements: Vec<Rational>) -> Self {
        debug_assert_eq!(entries.len(), complements.len());
        let terms = entries
            .iter()
            .zip(&complements)
            .map(|(x, c)| (TermEstimate::of(x), TermEstimate::of(c)))
            .collect();
        PredictionVector {
            entries,
            complements,
            terms,
            den_product: OnceLock::new(),
        }
    }

    /// Seeds the cached product of the entries' odd denominators.
    pub(crate) fn with_denominator_product(self, product: Arc<BigUint>) -> Self {
        let _ = self.den_product.set(product);
        self
    }

    pub fn from_u64_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|&(p, q)| Rational::from_u64s(p, q))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The factor contributed to `e^(n·LL)` by point `i` under `label`.
    fn likelihood(&self, i: usize, label: bool) -> &Rational {
        if label {
            &self.entries[i]
        } else {
            &self.complements[i]
        }
    }

    /// f64 estimate of `-ln` of the likelihood factor and its error bound.
    pub(crate) fn term_f64(&self, i: usize, label: bool) -> (f64, f64) {
        let (one, zero) = self.terms[i];
        let t = if label { one } else { zero };
        (t.value, t.err)
    }

    /// `∏ odd_denom(x_i)`. Both `x_i` and `1 - x_i` share that odd
    /// denominator, so this is the numerator of every score before reduction.
    fn denominator_product(&self) -> Arc<BigUint> {
        Arc::clone(self.den_product.get_or_init(|| {
            let mut acc = BigUint::one();
            for x in &self.entries {
                if !x.odd_denom().is_one() {
                    acc *= x.odd_denom().as_ref();
                }
            }
            Arc::new(acc)
        }))
    }
}

/// Binary predictions per class: `n` rows of `K` entries, each row summing to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionMatrix {
    rows: Vec<Vec<Rational>>,
    k: usize,
}

impl PredictionMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let k = rows.first().map(Vec::len).ok_or(Error::Empty("prediction matrix"))?;
        if k < 2 {
            return Err(Error::InvalidArgument(format!("class count {k} < 2")));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    actual: row.len(),
                });
            }
            let mut sum = Rational::zero();
            for (c, x) in row.iter().enumerate() {
                if x <= &zero || x >= &one {
                    return Err(Error::PredictionOutOfRange {
                        index: r * k + c,
                        value: x.to_string(),
                    });
                }
                sum = &sum + x;
            }
            if !sum.is_one() {
                return Err(Error::RowNotNormalized {
                    row: r,
                    sum: sum.to_string(),
                });
            }
        }
        Ok(PredictionMatrix { rows, k })
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn class_count(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// `e^(n·LL)` as a reduced rational, together with the dataset size when
/// known. Dividing `ln(value)` by `n` gives the normalised Log-Loss; the
/// unnormalised sum is `ln(value)` itself, so both conventions decode from
/// the same value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScore {
    value: Rational,
    n: Option<usize>,
}

impl ExactScore {
    pub fn new(value: Rational, n: usize) -> Result<Self> {
        let s = Self::from_value(value)?;
        Ok(ExactScore { n: Some(n), ..s })
    }

    /// A score whose dataset size is left for the decoder to infer.
    pub fn from_value(value: Rational) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "exact score must be positive, got {value}"
            )));
        }
        Ok(ExactScore { value, n: None })
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    /// Normalised Log-Loss as an f64, for display only.
    pub fn logloss_f64(&self) -> Option<f64> {
        Some(self.value.ln_f64()? / self.n? as f64)
    }
}

impl fmt::Display for ExactScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// `e^(n·LL(x, ℓ))`, computed exactly.
pub fn exact_score(x: &PredictionVector, labels: &Labeling) -> Result<ExactScore> {
    check_len(x.len(), labels.len())?;
    let mut den = BigUint::one();
    let mut exp2 = 0i64;
    for (i, label) in labels.iter().enumerate() {
        let c = x.likelihood(i, label);
        exp2 -= c.exp2();
        if !c.odd_numer().is_one() {
            den *= c.odd_numer().as_ref();
        }
    }
    let num = x.denominator_product();
    let (num, den) = if num.is_one() || den.is_one() {
        (num, Arc::new(den))
    } else {
        let g = crate::rational::gcd(&num, &den);
        if g.is_one() {
            (num, Arc::new(den))
        } else {
            (Arc::new(num.as_ref() / &g), Arc::new(den / &g))
        }
    };
    Ok(ExactScore {
        value: Rational::from_odd_parts(false, num, den, exp2),
        n: Some(x.len()),
    })
}

/// f64 estimate of `n·LL` together with an absolute error bound.
pub(crate) fn unnormalized_loss_f64(x: &PredictionVector, labels: &Labeling) -> (f64, f64) {
    let mut value = 0.0;
    let mut err = 0.0;
    for (i, label) in labels.iter().enumerate() {
        let (one, zero) = x.terms[i];
        let t = if label { one } else { zero };
        value += t.value;
        err += t.err;
    }
    err += value.abs() * 1e-15 * labels.len() as f64;
    (value, 4.0 * err)
}

/// Log-Loss rounded to `phi` significant digits (normalised by `n`).
pub fn logloss_decimal(x: &PredictionVector, labels: &Labeling, phi: u32) -> Result<DecimalScore> {
    if phi == 0 {
        return Err(Error::InvalidArgument("phi must be at least 1".into()));
    }
    check_len(x.len(), labels.len())?;
    let n = x.len() as f64;
    let (value, err) = unnormalized_loss_f64(x, labels);
    let digits = match decimal::round_sig_f64(value / n, err / n, phi) {
        Some(s) => s,
        None => {
            let score = exact_score(x, labels)?;
            decimal::round_ln_over(score.value(), x.len(), phi)
        }
    };
    Ok(DecimalScore::new(digits, phi, ScoreKind::LogLoss))
}

/// Same as [`logloss_decimal`] but always through the high-precision path.
pub fn logloss_decimal_exact_path(
    x: &PredictionVector,
    labels: &Labeling,
    phi: u32,
) -> Result<DecimalScore> {
    if phi == 0 {
        return Err(Error::InvalidArgument("phi must be at least 1".into()));
    }
    let score = exact_score(x, labels)?;
    Ok(DecimalScore::new(
        decimal::round_ln_over(score.value(), x.len(), phi),
        phi,
        ScoreKind::LogLoss,
    ))
}

/// `e^(Σ −ln v[i][ℓ_i])`: the reciprocal of the product of the true-class
/// probabilities.
pub fn exact_score_multiclass(v: &PredictionMatrix, labels: &ClassLabeling) -> Result<ExactScore> {
    check_len(v.len(), labels.len())?;
    if labels.class_count() != v.class_count() {
        return Err(Error::InvalidArgument(format!(
            "labeling has K = {}, matrix has K = {}",
            labels.class_count(),
            v.class_count()
        )));
    }
    let mut prod = Rational::one();
    for (row, &class) in v.rows().iter().zip(labels.classes()) {
        prod = &prod * &row[class - 1];
    }
    ExactScore::new(prod.recip()?, v.len())
}

/// Twice the Mann-Whitney statistic (concordant pairs count 2, ties 1) and
/// the pair count `|D_1|·|D_0|`.
pub(crate) fn mann_whitney_doubled(x: &PredictionVector, labels: &Labeling) -> (u128, u128) {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x.entries[a].cmp(&x.entries[b]));
    let mut negatives_below: u128 = 0;
    let mut doubled: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && x.entries[order[j]] == x.entries[order[i]] {
            if labels.get(order[j]) {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        doubled += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
        i = j;
    }
    (doubled, labels.ones() as u128 * labels.zeros() as u128)
}

/// Area under the ROC curve (Mann-Whitney, ties count one half), rounded to
/// `phi` significant digits. Undefined when either class is empty.
pub fn auc(x: &PredictionVector, labels: &Labeling, phi: u32) -> Result<DecimalScore> {
    if phi == 0 {
        return Err(Error::InvalidArgument("phi must be at least 1".into()));
    }
    check_len(x.len(), labels.len())?;
    let (doubled, pairs) = mann_whitney_doubled(x, labels);
    if pairs == 0 {
        return Ok(DecimalScore::auc_not_defined(phi));
    }
    Ok(DecimalScore::new(auc_digits(doubled, 2 * pairs, phi), phi, ScoreKind::Auc))
}

pub(crate) fn auc_digits(num: u128, den: u128, phi: u32) -> String {
    let r = Rational::from_biguints(BigUint::from(num), BigUint::from(den)).expect("pairs > 0");
    decimal::round_sig(&r, phi)
}
