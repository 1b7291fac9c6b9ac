//! Attacks against an oracle that rounds to `phi` significant digits.
//!
//! A batch of `b` points is probed with a vector that holds tuned predictions
//! on the batch and exactly 1/2 everywhere else. A prediction of 1/2 adds
//! `ln 2` to the summed loss whatever the label, so the Log-Loss only moves
//! with the batch labels. The AUC still sees the out-of-batch positives, so
//! lookup tables are built to stay injective for every possible count of
//! them.

use std::collections::{HashMap, HashSet};
use std::ops::Range;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{FromPrimitive, One, Signed, ToPrimitive};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decimal::{self, ScoreKind};
use crate::error::{Error, Result};
use crate::fixed;
use crate::oracle::{DecimalAnswer, DecimalOracle};
use crate::rational::Rational;
use crate::scoring::{auc_digits, exact_score, Labeling, PredictionVector};

/// Candidate vectors tried per batch size before giving up.
pub const DEFAULT_SEARCH_BUDGET: usize = 256;

/// Largest number of (labeling, out-of-batch count) pairs enumerated for a
/// single candidate.
const ENUMERATION_CAP: u64 = 1 << 22;

/// Largest decimal exponent `e` in extreme predictions `m·10^-e`.
const DEEPEST_EXTREME: u32 = 40;

const SEED: u64 = 0x6c6c_7072_6f62_6521;

/// Smallest `phi` with `10^phi · delta >= 1`, i.e. `ceil(log10(1/delta))`.
pub fn min_digits_for_separation(delta: &Rational) -> Result<u32> {
    if !delta.is_positive() || delta > &Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "separation {delta} outside (0, 1]"
        )));
    }
    let ten = Rational::from(10);
    let mut scaled = delta.clone();
    let mut phi = 0;
    while scaled < Rational::one() {
        scaled = &scaled * &ten;
        phi += 1;
    }
    Ok(phi)
}

fn pow10(k: u32) -> BigUint {
    BigUint::from(10u32).pow(k)
}

/// `floor(log2(10^phi (10^phi + 1)))`: no batch larger than this can map
/// injectively into rounded `(AUC, LL)` pairs.
pub fn max_unique_batch(phi: u32) -> usize {
    let t = pow10(phi);
    let count = &t * (&t + 1u32);
    count.bits() as usize - 1
}

/// `ceil(n / (6 phi))`.
pub fn query_bound(n: usize, phi: u32) -> usize {
    n.div_ceil(6 * phi as usize)
}

/// `min(6 phi, max_unique_batch(phi))`.
pub fn nominal_batch_size(phi: u32) -> usize {
    (6 * phi as usize).min(max_unique_batch(phi))
}

/// Consecutive 0-based ranges of the nominal batch size covering `0..n`.
pub fn nominal_schedule(n: usize, phi: u32) -> Vec<Range<usize>> {
    let b = nominal_batch_size(phi).max(1);
    (0..n).step_by(b).map(|s| s..(s + b).min(n)).collect()
}

#[derive(Debug, Clone, Default)]
struct Interner {
    ids: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, s: String) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(s).or_insert(next)
    }

    fn get(&self, s: &str) -> Option<u32> {
        self.ids.get(s).copied()
    }
}

/// Out-of-batch points of a query: all predicted 1/2, some with labels
/// already known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    pub known_pos: usize,
    pub known_neg: usize,
    pub unknown: usize,
}

impl Context {
    pub fn isolated(unknown: usize) -> Self {
        Context { known_pos: 0, known_neg: 0, unknown }
    }

    fn outside(&self) -> usize {
        self.known_pos + self.known_neg + self.unknown
    }
}

/// Enumerates rounded tuples for candidate vectors in a fixed context.
struct Tabulator {
    n: usize,
    phi: u32,
    lls: Interner,
    aucs: Interner,
    auc_memo: HashMap<(u128, u128), u32>,
}

const ND: u32 = u32::MAX;

impl Tabulator {
    fn new(n: usize, phi: u32) -> Self {
        Tabulator {
            n,
            phi,
            lls: Interner::default(),
            aucs: Interner::default(),
            auc_memo: HashMap::new(),
        }
    }

    fn ll_id(&mut self, x: &PredictionVector, mask: u64, unknown: usize) -> u32 {
        let b = x.len();
        let (mut value, mut err) = (unknown as f64 * std::f64::consts::LN_2, 0.0);
        for i in 0..b {
            let (t, e) = x.term_f64(i, (mask >> i) & 1 == 1);
            value += t;
            err += e;
        }
        err = 4.0 * (err + value.abs() * 1e-15 * (b + 1) as f64);
        let n = self.n as f64;
        let digits = decimal::round_sig_f64(value / n, err / n, self.phi).unwrap_or_else(|| {
            let labels = Labeling::from_mask(mask, b).expect("batch fits a mask");
            let score = exact_score(x, &labels).expect("lengths agree");
            let full = score.value() * &Rational::pow2(unknown as i64);
            decimal::round_ln_over(&full, self.n, self.phi)
        });
        self.lls.intern(digits)
    }

    fn auc_id(&mut self, num: u128, den: u128) -> u32 {
        if den == 0 {
            return ND;
        }
        if let Some(&id) = self.auc_memo.get(&(num, den)) {
            return id;
        }
        let id = self.aucs.intern(auc_digits(num, den, self.phi));
        self.auc_memo.insert((num, den), id);
        id
    }

    /// Feeds every reachable `(labeling, AUC, LL)` to `visit` until it
    /// returns false.
    fn visit_keys(
        &mut self,
        x: &PredictionVector,
        ctx: Context,
        visit: &mut dyn FnMut(u64, (u32, u32)) -> bool,
    ) {
        let b = x.len();
        let entries = x.entries();
        let half = Rational::half();
        // doubled Mann-Whitney credit of a positive at a against a negative at c
        let credit = |a: &Rational, c: &Rational| match a.cmp(c) {
            std::cmp::Ordering::Greater => 2u128,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 0,
        };
        let pair: Vec<Vec<u128>> = entries
            .iter()
            .map(|a| entries.iter().map(|c| credit(a, c)).collect())
            .collect();
        let over_half: Vec<u128> = entries.iter().map(|a| credit(a, &half)).collect();
        let under_half: Vec<u128> = entries.iter().map(|a| credit(&half, a)).collect();

        let u = ctx.unknown as u128;
        let (k1, k0) = (ctx.known_pos as u128, ctx.known_neg as u128);
        for mask in 0..(1u64 << b) {
            let ll = self.ll_id(x, mask, ctx.outside());
            let pos: Vec<usize> = (0..b).filter(|&i| (mask >> i) & 1 == 1).collect();
            let neg: Vec<usize> = (0..b).filter(|&i| (mask >> i) & 1 == 0).collect();
            let inner: u128 = pos
                .iter()
                .map(|&i| neg.iter().map(|&j| pair[i][j]).sum::<u128>())
                .sum();
            let sp: u128 = pos.iter().map(|&i| over_half[i]).sum();
            let sn: u128 = neg.iter().map(|&j| under_half[j]).sum();
            let (b1, b0) = (pos.len() as u128, neg.len() as u128);
            for r1 in 0..=u {
                let (m1, m0) = (k1 + r1, k0 + u - r1);
                let num = inner + m0 * sp + m1 * sn + m1 * m0;
                let auc = self.auc_id(num, 2 * (b1 + m1) * (b0 + m0));
                if !visit(mask, (auc, ll)) {
                    return;
                }
            }
        }
    }

    /// Maps each reachable `(AUC, LL)` pair to its batch labeling, or
    /// `None` at the first pair two labelings share.
    fn tabulate(&mut self, x: &PredictionVector, ctx: Context) -> Option<HashMap<(u32, u32), u64>> {
        let mut table = HashMap::with_capacity(1 << x.len().min(20));
        let mut clash = false;
        self.visit_keys(x, ctx, &mut |mask, key| match table.insert(key, mask) {
            Some(prev) if prev != mask => {
                clash = true;
                false
            }
            _ => true,
        });
        (!clash).then_some(table)
    }

    /// Number of labelings sharing a pair with some other labeling.
    fn collisions(&mut self, x: &PredictionVector, ctx: Context) -> usize {
        let mut table: HashMap<(u32, u32), u64> = HashMap::new();
        let mut bad = vec![false; 1 << x.len()];
        self.visit_keys(x, ctx, &mut |mask, key| {
            match table.insert(key, mask) {
                Some(prev) if prev != mask => {
                    bad[prev as usize] = true;
                    bad[mask as usize] = true;
                    table.insert(key, prev);
                }
                _ => {}
            }
            true
        });
        bad.iter().filter(|&&b| b).count()
    }
}

/// Decodes the Log-Loss alone when the batch's log-odds form a doubling
/// ladder `λ_i ≈ 2^(i-1) δ`: the summed loss is an affine function of the
/// bitmask of zero labels, with spacing `δ` far above the rounding error.
#[derive(Debug, Clone)]
struct Ladder {
    prec: u64,
    delta: BigInt,
    offset: BigInt,
}

impl Ladder {
    fn feasible(b: usize, phi: u32) -> bool {
        // rounding error times the ladder's span must stay below 1/8
        b <= 60 && (BigUint::from((1u64 << b) - 1) << 2u32) < pow10(phi - 1)
    }

    fn build(b: usize, n: usize, phi: u32) -> Option<(PredictionVector, Ladder)> {
        if !Self::feasible(b, phi) {
            return None;
        }
        let ln2 = std::f64::consts::LN_2;
        let eps = 0.5 * 10f64.powi(1 - phi as i32);
        let unknown = (n - b) as f64;
        let span = ((1u64 << b) - 1) as f64;
        let slack = 0.125 - eps * span;
        if slack <= 0.0 {
            return None;
        }
        let delta_f = 2.02 * eps * (b as f64 + unknown) * ln2 / slack;
        let prec = 64 + 4 * phi as u64 + (usize::BITS - n.leading_zeros()) as u64 + b as u64;
        let delta = BigInt::from_f64(delta_f * 2f64.powi(prec as i32))?;
        let scale = BigInt::one() << prec;

        let mut entries = Vec::with_capacity(b);
        let mut offset = fixed::ln2(prec) * BigInt::from(n - b);
        let (mut sum_lambda, mut sum_a, mut drift) = (0.0, 0.0, 0.0);
        for i in 0..b {
            let target: BigInt = &delta << i;
            let r = fixed::exp(&target, prec);
            let x = Rational::new(r.clone(), &r + &scale).ok()?;
            let ratio = Rational::new(r, scale.clone()).ok()?;
            let lambda = fixed::ln(&ratio, prec);
            // -ln x = ln((r + 1) / r)
            let a = fixed::ln(&x.recip().ok()?, prec);
            drift += to_f64_scaled(&(&lambda - &target).abs(), prec);
            sum_lambda += to_f64_scaled(&lambda, prec);
            sum_a += to_f64_scaled(&a, prec);
            offset += a;
            entries.push(x);
        }
        let numeric = (b + n + 8) as f64 * 4.0 * 2f64.powi(-(prec as i32));
        let bound = (eps * (sum_a + unknown * ln2 + sum_lambda) + drift + numeric) / delta_f;
        if !(bound < 0.2) {
            return None;
        }
        let vector = PredictionVector::new(entries).ok()?;
        Some((vector, Ladder { prec, delta, offset }))
    }

    /// Bitmask of the labels equal to 1.
    fn decode(&self, ll: &Rational, n: usize, b: usize) -> Option<u64> {
        let p = self.prec;
        let total = (ll.numer() * BigInt::from(n) << p) / BigInt::from(ll.denom());
        let m: BigInt = ((total - &self.offset) << p) / &self.delta;
        let nearest: BigInt = (&m + (BigInt::one() << (p - 1))) >> p;
        if (&m - (&nearest << p)).abs() > (BigInt::one() << (p - 2)) {
            return None;
        }
        let zeros = nearest.to_u64().filter(|&z| z >> b == 0)?;
        Some(!zeros & ((1u64 << b) - 1))
    }
}

fn to_f64_scaled(m: &BigInt, prec: u64) -> f64 {
    let bits = m.bits();
    if bits > 1000 {
        let shift = bits - 900;
        return (m >> shift).to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(shift as i32 - prec as i32);
    }
    m.to_f64().unwrap_or(0.0) * 2f64.powi(-(prec as i32))
}

#[derive(Debug, Clone)]
enum Decoder {
    Table {
        lls: Interner,
        aucs: Interner,
        map: HashMap<(u32, u32), u64>,
    },
    Ladder(Ladder),
}

/// A batch prediction vector with the inverse map from oracle answers to
/// batch labelings.
#[derive(Debug, Clone)]
pub struct TupleLookup {
    batch: usize,
    dataset: usize,
    phi: u32,
    vector: PredictionVector,
    decoder: Decoder,
}

impl TupleLookup {
    /// Checks `x` for injectivity when it is embedded in a query of
    /// `dataset` points, the rest at 1/2.
    pub fn from_vector(x: PredictionVector, dataset: usize, phi: u32) -> Result<Self> {
        let b = x.len();
        check_context(b, dataset, phi)?;
        let mut tab = Tabulator::new(dataset, phi);
        match tab.tabulate(&x, Context::isolated(dataset - b)) {
            Some(map) => Ok(Self::from_table(x, dataset, phi, tab, map)),
            None => Err(Error::NotInjective { batch: b, phi }),
        }
    }

    fn from_table(
        vector: PredictionVector,
        dataset: usize,
        phi: u32,
        tab: Tabulator,
        map: HashMap<(u32, u32), u64>,
    ) -> Self {
        TupleLookup {
            batch: vector.len(),
            dataset,
            phi,
            vector,
            decoder: Decoder::Table {
                lls: tab.lls,
                aucs: tab.aucs,
                map,
            },
        }
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    /// Length of the full query vectors this lookup is valid for.
    pub fn dataset_size(&self) -> usize {
        self.dataset
    }

    pub fn phi(&self) -> u32 {
        self.phi
    }

    pub fn vector(&self) -> &PredictionVector {
        &self.vector
    }

    /// Whether decoding uses the Log-Loss alone.
    pub fn is_ladder(&self) -> bool {
        matches!(self.decoder, Decoder::Ladder(_))
    }

    /// Number of stored `(AUC, LL)` keys; zero for a ladder.
    pub fn table_len(&self) -> usize {
        match &self.decoder {
            Decoder::Table { map, .. } => map.len(),
            Decoder::Ladder(_) => 0,
        }
    }

    /// Full-length query: batch entries at `start..start + b`, 1/2 elsewhere.
    pub fn query_vector(&self, start: usize) -> Result<PredictionVector> {
        if start + self.batch > self.dataset {
            return Err(Error::InvalidArgument(format!(
                "batch at {start} overruns {} points",
                self.dataset
            )));
        }
        let mut entries = vec![Rational::half(); self.dataset];
        entries[start..start + self.batch].clone_from_slice(self.vector.entries());
        PredictionVector::new(entries)
    }

    /// Batch labeling matching an oracle answer.
    pub fn decode(&self, answer: &DecimalAnswer) -> Result<Labeling> {
        let miss = || Error::LookupMiss {
            auc: answer.auc.wire().to_string(),
            ll: answer.ll.wire().to_string(),
        };
        let mask = match &self.decoder {
            Decoder::Table { lls, aucs, map } => {
                let ll = lls.get(answer.ll.digits()).ok_or_else(miss)?;
                let auc = if answer.auc.is_defined() {
                    aucs.get(answer.auc.digits()).ok_or_else(miss)?
                } else {
                    ND
                };
                *map.get(&(auc, ll)).ok_or_else(miss)?
            }
            Decoder::Ladder(ladder) => {
                if answer.ll.phi() != self.phi {
                    return Err(miss());
                }
                let ll = answer.ll.value().ok_or_else(miss)?;
                ladder.decode(&ll, self.dataset, self.batch).ok_or_else(miss)?
            }
        };
        Labeling::from_mask(mask, self.batch)
    }
}

fn check_context(b: usize, dataset: usize, phi: u32) -> Result<()> {
    if phi == 0 {
        return Err(Error::InvalidArgument("phi must be at least 1".into()));
    }
    if b == 0 || b > dataset {
        return Err(Error::InvalidArgument(format!(
            "batch of {b} in a query of {dataset} points"
        )));
    }
    if b > max_unique_batch(phi) {
        return Err(Error::PigeonholeViolation { batch: b, phi });
    }
    Ok(())
}

/// Candidate number `k` for a batch of `b`.
fn candidate(b: usize, k: usize, phi: u32, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    if k == 0 {
        return (1..=b as u64).map(|i| Rational::from_u64s(i, b as u64 + 1).unwrap()).collect();
    }
    if k % 3 == 1 {
        let dens = [10u64, 20, 50, 100, 1000];
        let d = dens.iter().copied().cycle().skip(k / 3).find(|&d| d as usize > b).unwrap();
        return sample(rng, d as usize - 1, b)
            .into_iter()
            .map(|j| Rational::from_u64s(j as u64 + 1, d).unwrap())
            .collect();
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(b);
    while out.len() < b {
        let x = random_entry(phi, rng);
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    out
}

/// A prediction from a mix of uniform values and values near 0 or 1.
fn random_entry(phi: u32, rng: &mut ChaCha8Rng) -> Rational {
    let e = rng.gen_range(1..=DEEPEST_EXTREME.max(phi + 3));
    let m = rng.gen_range(1..10u64);
    let tiny = || Rational::from_biguints(BigUint::from(m), pow10(e)).expect("nonzero");
    match rng.gen_range(0..4) {
        0 | 1 => Rational::from_u64s(rng.gen_range(1..1_000_000), 1_000_000).expect("nonzero"),
        2 => tiny(),
        _ => tiny().one_minus(),
    }
}

/// Local search steps per unit of search budget.
const LOCAL_STEPS: usize = 8;

/// Cap on tuples enumerated by one local search.
const LOCAL_WORK: usize = 1 << 23;

/// Replaces one entry at a time, keeping changes that do not increase the
/// number of colliding labelings.
fn local_search(
    tab: &mut Tabulator,
    b: usize,
    phi: u32,
    ctx: Context,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> Option<PredictionVector> {
    let mut entries = candidate(b, 2, phi, rng);
    let mut x = PredictionVector::new(entries.clone()).ok()?;
    let mut cost = tab.collisions(&x, ctx);
    for _ in 0..steps {
        if cost == 0 {
            return Some(x);
        }
        let i = rng.gen_range(0..b);
        let v = random_entry(phi, rng);
        if entries.contains(&v) {
            continue;
        }
        let old = std::mem::replace(&mut entries[i], v);
        let y = PredictionVector::new(entries.clone()).ok()?;
        let c = tab.collisions(&y, ctx);
        if c <= cost {
            x = y;
            cost = c;
        } else {
            entries[i] = old;
        }
    }
    (cost == 0).then_some(x)
}

/// Searches for an injective lookup for an isolated batch of `b` points.
pub fn build_tuple_lookup(b: usize, phi: u32, budget: usize) -> Result<TupleLookup> {
    build_tuple_lookup_for(b, b, phi, budget)
}

/// Searches for a lookup for a batch of `b` points inside queries of
/// `dataset` points whose other labels are all unknown.
pub fn build_tuple_lookup_for(
    b: usize,
    dataset: usize,
    phi: u32,
    budget: usize,
) -> Result<TupleLookup> {
    if b > dataset {
        check_context(b, dataset, phi)?;
    }
    build_tuple_lookup_in(b, phi, Context::isolated(dataset - b), budget)
}

/// Searches for a lookup for a batch of `b` points whose query also holds
/// the out-of-batch points described by `ctx`. Enumerated candidates are
/// tried first, then the Log-Loss ladder.
pub fn build_tuple_lookup_in(
    b: usize,
    phi: u32,
    ctx: Context,
    budget: usize,
) -> Result<TupleLookup> {
    let dataset = b + ctx.outside();
    check_context(b, dataset, phi)?;
    let enumerable =
        b < 63 && (1u64 << b).saturating_mul(ctx.unknown as u64 + 1) <= ENUMERATION_CAP;
    if enumerable {
        let seed = SEED
            ^ ((b as u64) << 8)
            ^ ((dataset as u64) << 24)
            ^ ((ctx.known_pos as u64) << 40)
            ^ phi as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tab = Tabulator::new(dataset, phi);
        for k in 0..budget {
            let entries = candidate(b, k, phi, &mut rng);
            let Ok(x) = PredictionVector::new(entries) else {
                continue;
            };
            if let Some(map) = tab.tabulate(&x, ctx) {
                return Ok(TupleLookup::from_table(x, dataset, phi, tab, map));
            }
        }
        let per_step = (1usize << b) * (ctx.unknown + 1);
        let steps = (budget * LOCAL_STEPS).min(LOCAL_WORK / per_step);
        if let Some(x) = local_search(&mut tab, b, phi, ctx, steps, &mut rng) {
            let map = tab.tabulate(&x, ctx).expect("collision-free");
            return Ok(TupleLookup::from_table(x, dataset, phi, tab, map));
        }
    }
    if let Some((vector, ladder)) = Ladder::build(b, dataset, phi) {
        return Ok(TupleLookup {
            batch: b,
            dataset,
            phi,
            vector,
            decoder: Decoder::Ladder(ladder),
        });
    }
    Err(Error::SearchExhausted { batch: b, phi, budget })
}

/// One planned query: a batch starting at a 0-based position.
#[derive(Debug, Clone)]
pub struct PlannedBatch {
    pub start: usize,
    pub lookup: Arc<TupleLookup>,
}

impl PlannedBatch {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.lookup.batch_size()
    }
}

/// Disjoint batches covering every point, each with its lookup.
#[derive(Debug, Clone)]
pub struct AttackPlan {
    n: usize,
    phi: u32,
    batches: Vec<PlannedBatch>,
}

impl AttackPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> u32 {
        self.phi
    }

    pub fn batches(&self) -> &[PlannedBatch] {
        &self.batches
    }

    pub fn query_count(&self) -> usize {
        self.batches.len()
    }

    /// Largest realised batch size.
    pub fn batch_size(&self) -> usize {
        self.batches.iter().map(|b| b.lookup.batch_size()).max().unwrap_or(0)
    }
}

/// Builds lookups for the largest batches that can be made injective,
/// starting at [`nominal_batch_size`] and shrinking on failure.
pub fn plan_attack(n: usize, phi: u32, budget: usize) -> Result<AttackPlan> {
    if n == 0 {
        return Err(Error::Empty("dataset"));
    }
    if phi == 0 {
        return Err(Error::InvalidArgument("phi must be at least 1".into()));
    }
    let mut built: HashMap<usize, Arc<TupleLookup>> = HashMap::new();
    let mut failed: HashSet<usize> = HashSet::new();
    let mut cap = nominal_batch_size(phi).min(n);
    let mut batches = Vec::new();
    let mut start = 0;
    while start < n {
        let want = cap.min(n - start);
        let mut found = None;
        for b in (1..=want).rev() {
            if failed.contains(&b) {
                continue;
            }
            if let Some(l) = built.get(&b) {
                found = Some(l.clone());
                break;
            }
            match build_tuple_lookup_for(b, n, phi, budget) {
                Ok(l) => {
                    let l = Arc::new(l);
                    built.insert(b, l.clone());
                    found = Some(l);
                    break;
                }
                Err(Error::SearchExhausted { .. }) => {
                    failed.insert(b);
                }
                Err(e) => return Err(e),
            }
        }
        let lookup = found.ok_or(Error::SearchExhausted { batch: 1, phi, budget })?;
        cap = lookup.batch_size();
        batches.push(PlannedBatch { start, lookup });
        start += cap;
    }
    Ok(AttackPlan { n, phi, batches })
}

/// Runs a plan against the oracle, one query per batch.
pub fn execute_plan(plan: &AttackPlan, oracle: &mut dyn DecimalOracle) -> Result<Labeling> {
    if oracle.phi() != plan.phi {
        return Err(Error::Oracle(format!(
            "oracle reports {} digits, plan expects {}",
            oracle.phi(),
            plan.phi
        )));
    }
    let mut bits = Vec::with_capacity(plan.n);
    for batch in &plan.batches {
        let answer = oracle.score(&batch.lookup.query_vector(batch.start)?)?;
        if answer.ll.kind() != ScoreKind::LogLoss {
            return Err(Error::Oracle("answer lacks a log-loss".into()));
        }
        bits.extend(batch.lookup.decode(&answer)?.iter());
    }
    Labeling::new(bits)
}

/// Recovers all `n` labels from a rounding oracle.
pub fn batched_inference(n: usize, phi: u32, oracle: &mut dyn DecimalOracle) -> Result<Labeling> {
    let plan = plan_attack(n, phi, DEFAULT_SEARCH_BUDGET)?;
    execute_plan(&plan, oracle)
}

/// `(AUC, LL)` of a labeling, as an honest rounding oracle reports them.
pub fn rounded_answer(x: &PredictionVector, labels: &Labeling, phi: u32) -> Result<DecimalAnswer> {
    Ok(DecimalAnswer {
        auc: crate::scoring::auc(x, labels, phi)?,
        ll: crate::scoring::logloss_decimal(x, labels, phi)?,
    })
}
