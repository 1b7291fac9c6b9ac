//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Time limits are wall-clock and pinned below.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use llprobe::exact::{
    binary_exponent, binary_labeling_from_exponent, build_binary_vector, build_multiclass_matrix,
    build_twin_prime_vector, decode_binary, decode_multiclass, decode_twin_prime,
};
use llprobe::mia::{run_session, AttackMode, CandidateSet, Curator, MembershipVector};
use llprobe::oracle::Counting;
use llprobe::precision::{
    execute_plan, min_digits_for_separation, plan_attack, query_bound, rounded_answer, DEFAULT_SEARCH_BUDGET,
};
use llprobe::primes::{is_prime, twin_primes};
use llprobe::scoring::{exact_score, exact_score_multiclass};
use llprobe::{ClassLabeling, ExactScore, Labeling, PredictionVector, Rational};

const LIMIT_SCORE_TABLE: Duration = Duration::from_millis(1);
const LIMIT_TWIN_DECODE: Duration = Duration::from_millis(1);
const LIMIT_TUPLES: Duration = Duration::from_millis(10);
const LIMIT_INJECTIVITY: Duration = Duration::from_secs(30);
const LIMIT_ROUND_TRIP: Duration = Duration::from_secs(60);
const LIMIT_FIXED_PRECISION: Duration = Duration::from_secs(60);

const ROUND_TRIP_TRIALS: usize = 1000;
const TAMPER_TRIALS: u64 = 100;
const FIXED_MIN_BATCH: usize = 12;
const DEMO_SEED: u64 = 20_240_611;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed<F: FnOnce() -> Verdict>(limit: Option<Duration>, f: F) -> Verdict {
    let start = Instant::now();
    let v = f();
    let took = start.elapsed();
    match limit {
        Some(limit) if took >= limit => Verdict::new(
            false,
            format!("{}; took {took:.3?}, limit {limit:?}", v.detail),
        ),
        Some(limit) => Verdict::new(v.pass, format!("{}; {took:.3?} (limit {limit:?})", v.detail)),
        None => Verdict::new(v.pass, format!("{}; {took:.3?}", v.detail)),
    }
}

fn labeling(s: &str) -> Labeling {
    s.parse().unwrap()
}

fn all_labelings(n: usize) -> impl Iterator<Item = Labeling> {
    (0..1u64 << n).map(move |m| Labeling::from_mask(m, n).unwrap())
}

fn c1_score_table() -> Verdict {
    let x = build_twin_prime_vector(2).unwrap();
    timed(Some(LIMIT_SCORE_TABLE), || {
        let expected = [("00", "91/4"), ("01", "91/22"), ("10", "91/10"), ("11", "91/55")];
        let got: Vec<String> = expected
            .iter()
            .map(|(l, _)| exact_score(&x, &labeling(l)).unwrap().to_string())
            .collect();
        let pass = expected.iter().zip(&got).all(|((_, e), g)| e == g);
        Verdict::new(pass, format!("scores {}", got.join(" ")))
    })
}

fn c2_twin_decode() -> Verdict {
    let score = ExactScore::from_value("1729/170".parse().unwrap()).unwrap();
    timed(Some(LIMIT_TWIN_DECODE), || match decode_twin_prime(&score) {
        Ok(l) => Verdict::new(l.to_string() == "101" && l.len() == 3, format!("decoded {l} (n = {})", l.len())),
        Err(e) => Verdict::new(false, format!("decode failed: {e}")),
    })
}

fn c3_binary_examples() -> Verdict {
    let exp = binary_exponent(&labeling("1011")).unwrap();
    let decoded = binary_labeling_from_exponent(18, 5).unwrap();
    let x = build_binary_vector(5).unwrap();
    let via_score = decode_binary(&exact_score(x.vector(), &decoded).unwrap()).unwrap();
    Verdict::new(
        exp == 13 && decoded.to_string() == "01001" && via_score == decoded,
        format!("exponent({}) = {exp}, labels(18, 5) = {decoded}, score round trip {via_score}", "1011"),
    )
}

fn c4_precision_formulas() -> Verdict {
    let d1 = min_digits_for_separation(&Rational::from_decimal_str("0.2").unwrap()).unwrap();
    let d3 = min_digits_for_separation(&Rational::from_decimal_str("0.002").unwrap()).unwrap();
    let q = query_bound(100, 15);
    Verdict::new(
        d1 == 1 && d3 == 3 && q == 2,
        format!("phi(0.2) = {d1}, phi(0.002) = {d3}, query_bound(100, 15) = {q}"),
    )
}

fn c5_tuples() -> Verdict {
    let x = PredictionVector::from_u64_pairs(&[(1, 5), (2, 5), (3, 5)]).unwrap();
    timed(Some(LIMIT_TUPLES), || {
        let tuples: HashSet<(String, String)> = all_labelings(3)
            .map(|l| {
                let a = rounded_answer(&x, &l, 2).unwrap();
                (a.auc.wire().to_string(), a.ll.wire().to_string())
            })
            .collect();
        Verdict::new(tuples.len() == 8, format!("{} distinct tuples of 8", tuples.len()))
    })
}

fn c6_injectivity() -> Verdict {
    timed(Some(LIMIT_INJECTIVITY), || {
        let mut bad = Vec::new();
        for n in 1..=12 {
            let twin = build_twin_prime_vector(n).unwrap();
            let binary = build_binary_vector(n).unwrap();
            for (name, x) in [("twin", &twin), ("binary", binary.vector())] {
                let distinct: HashSet<String> =
                    all_labelings(n).map(|l| exact_score(x, &l).unwrap().to_string()).collect();
                if distinct.len() != 1 << n {
                    bad.push(format!("{name} n={n}"));
                }
            }
        }
        Verdict::new(
            bad.is_empty(),
            if bad.is_empty() {
                "all 2^n scores distinct for n = 1..12, both constructions".to_string()
            } else {
                format!("collisions in {}", bad.join(", "))
            },
        )
    })
}

fn c7_round_trip() -> Verdict {
    timed(Some(LIMIT_ROUND_TRIP), || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let twin = build_twin_prime_vector(64).unwrap();
        let binary = build_binary_vector(32).unwrap();
        let mut mismatches = 0usize;
        for _ in 0..ROUND_TRIP_TRIALS {
            let l = Labeling::new((0..64).map(|_| rng.gen()).collect()).unwrap();
            if decode_twin_prime(&exact_score(&twin, &l).unwrap()).ok() != Some(l) {
                mismatches += 1;
            }
            let l = Labeling::new((0..32).map(|_| rng.gen()).collect()).unwrap();
            if decode_binary(&exact_score(binary.vector(), &l).unwrap()).ok() != Some(l) {
                mismatches += 1;
            }
        }
        let mut multiclass = 0usize;
        for k in 2..=5 {
            for n in 1..=6 {
                let m = build_multiclass_matrix(n, k).unwrap();
                for code in 0..k.pow(n as u32) {
                    let classes: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k + 1).collect();
                    let l = ClassLabeling::new(classes, k).unwrap();
                    let s = exact_score_multiclass(&m, &l).unwrap();
                    if decode_multiclass(&s, n, k).ok() != Some(l) {
                        mismatches += 1;
                    }
                    multiclass += 1;
                }
            }
        }
        Verdict::new(
            mismatches == 0,
            format!(
                "{mismatches} mismatches over {ROUND_TRIP_TRIALS} twin n=64, {ROUND_TRIP_TRIALS} binary n=32, {multiclass} multiclass"
            ),
        )
    })
}

fn c8_fixed_precision() -> Verdict {
    let (n, phi) = (60, 2);
    timed(Some(LIMIT_FIXED_PRECISION), || {
        let hidden = MembershipVector::random(n, DEMO_SEED).unwrap();
        let curator = Curator::new(hidden.clone());
        let plan = match plan_attack(n, phi, DEFAULT_SEARCH_BUDGET) {
            Ok(p) => p,
            Err(e) => return Verdict::new(false, format!("no plan: {e}")),
        };
        let b = plan.batch_size();
        let mut oracle = Counting::new(curator.decimal_oracle(phi));
        let recovered = execute_plan(&plan, &mut oracle);
        let exact = recovered.as_ref().ok() == Some(hidden.bits());
        let queries = oracle.queries();
        let pass = exact && queries == n.div_ceil(b) && b >= FIXED_MIN_BATCH;
        Verdict::new(
            pass,
            format!(
                "b* = {b} (need >= {FIXED_MIN_BATCH}), {queries} queries, recovery {}",
                if exact { "exact" } else { "wrong" }
            ),
        )
    })
}

fn c9_mia_demo() -> Verdict {
    let run = || {
        let candidates = CandidateSet::numbered(50).unwrap();
        let curator = Curator::new(MembershipVector::random(50, DEMO_SEED).unwrap());
        run_session(&candidates, &curator, AttackMode::ExactTwin, None).unwrap()
    };
    let a = run();
    let b = run();
    Verdict::new(
        a.correct == 50 && a.queries_used == 1 && a == b,
        format!(
            "accuracy {}, queries {}, repeat identical: {}",
            a.accuracy_exact(),
            a.queries_used,
            a == b
        ),
    )
}

/// Prime factors present in an untampered score, with the side they sit on.
fn served_factors(score: &Rational, candidates: &[u64]) -> Vec<(u64, bool)> {
    let num = score.numer().to_biguint().unwrap();
    let den = score.denom();
    let mut out = Vec::new();
    for &p in candidates {
        let p_big = BigUint::from(p);
        if (&num % &p_big) == BigUint::from(0u32) {
            out.push((p, true));
        }
        if (&den % &p_big) == BigUint::from(0u32) {
            out.push((p, false));
        }
    }
    out
}

fn foreign_prime(rng: &mut ChaCha8Rng, score: &Rational) -> u64 {
    let product = score.numer().to_biguint().unwrap() * score.denom();
    loop {
        let q = rng.gen_range(1_000_000u64..2_000_000);
        if is_prime(q) && (&product % q) != BigUint::from(0u32) {
            return q;
        }
    }
}

fn c10_tamper() -> Verdict {
    let mut silent = Vec::new();
    for trial in 0..TAMPER_TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let twin = trial % 2 == 0;
        let n = if twin { rng.gen_range(1..=64) } else { rng.gen_range(1..=32) };
        let l = Labeling::new((0..n).map(|_| rng.gen()).collect()).unwrap();
        let (score, alphabet) = if twin {
            let t = twin_primes(n).unwrap();
            let mut alphabet = vec![2];
            for &p in t.lower() {
                alphabet.extend([p, p + 2]);
            }
            (exact_score(&build_twin_prime_vector(n).unwrap(), &l).unwrap(), alphabet)
        } else {
            let x = build_binary_vector(n).unwrap();
            (exact_score(x.vector(), &l).unwrap(), vec![2, 3, 5, 17, 257, 65537])
        };
        let value = score.value().clone();
        let factors = served_factors(&value, &alphabet);
        let (p, in_numerator) = factors[rng.gen_range(0..factors.len())];
        let q = foreign_prime(&mut rng, &value);
        let swap = Rational::from_u64s(q, p).unwrap();
        let tampered = if in_numerator { &value * &swap } else { &value / &swap };
        let decoded = ExactScore::from_value(tampered).and_then(|s| {
            if twin {
                decode_twin_prime(&s)
            } else {
                decode_binary(&s)
            }
        });
        if let Ok(l2) = decoded {
            silent.push(format!("trial {trial}: {p}->{q} decoded {l2}"));
        }
    }
    Verdict::new(
        silent.is_empty(),
        if silent.is_empty() {
            format!("{TAMPER_TRIALS} tampered scores, all rejected")
        } else {
            format!("silently decoded: {}", silent.join("; "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1 two-point score table", c1_score_table),
        ("2 twin decode 1729/170", c2_twin_decode),
        ("3 binary exponent examples", c3_binary_examples),
        ("4 precision formulas", c4_precision_formulas),
        ("5 tuple injectivity at phi=2", c5_tuples),
        ("6 exhaustive injectivity n<=12", c6_injectivity),
        ("7 random round trips", c7_round_trip),
        ("8 fixed precision n=60 phi=2", c8_fixed_precision),
        ("9 membership inference demo", c9_mia_demo),
        ("10 tamper detection", c10_tamper),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
