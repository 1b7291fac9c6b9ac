//! Membership inference through a score oracle.
//!
//! A [`Curator`] holds the hidden membership bits and answers scores for
//! submitted prediction vectors. Attacks only ever see a `dyn` oracle, so
//! they have no route to the hidden bits; accuracy is computed on the
//! curator side afterwards.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{build_binary_vector, build_twin_prime_vector, decode_binary, decode_twin_prime};
use crate::oracle::{Counting, DecimalAnswer, DecimalOracle, ExactOracle};
use crate::precision::{batched_inference, rounded_answer};
use crate::rational::Rational;
use crate::scoring::{exact_score, ExactScore, Labeling, PredictionVector};

/// Datapoints under attack, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    ids: Vec<String>,
}

impl CandidateSet {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Empty("candidate set"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::InvalidArgument(format!("duplicate candidate {dup:?}")));
        }
        Ok(CandidateSet { ids })
    }

    /// Candidates named `d1`, `d2`, ...
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("d{i}")).collect())
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Membership bits over a candidate order; 1 means "in the training set".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MembershipVector {
    bits: Labeling,
}

impl MembershipVector {
    pub fn new(bits: Labeling) -> Self {
        MembershipVector { bits }
    }

    pub fn for_candidates(bits: Labeling, candidates: &CandidateSet) -> Result<Self> {
        if bits.len() != candidates.len() {
            return Err(Error::LengthMismatch {
                expected: candidates.len(),
                actual: bits.len(),
            });
        }
        Ok(Self::new(bits))
    }

    /// Uniformly random membership from a seeded generator.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::new(Labeling::new((0..n).map(|_| rng.gen()).collect())?))
    }

    pub fn bits(&self) -> &Labeling {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Identifiers of the members.
    pub fn members<'a>(&self, candidates: &'a CandidateSet) -> Vec<&'a str> {
        candidates
            .ids()
            .iter()
            .zip(self.bits.iter())
            .filter(|(_, b)| *b)
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

impl fmt::Display for MembershipVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttackMode {
    ExactTwin,
    ExactBinary,
    FixedPrecision,
}

impl fmt::Display for AttackMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackMode::ExactTwin => "EXACT_TWIN",
            AttackMode::ExactBinary => "EXACT_BINARY",
            AttackMode::FixedPrecision => "FIXED_PRECISION",
        })
    }
}

/// What the adversary ends up with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOutcome {
    pub mode: AttackMode,
    pub queries_used: usize,
    pub recovered: MembershipVector,
}

/// An outcome scored against the hidden membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackReport {
    pub mode: AttackMode,
    pub queries_used: usize,
    pub recovered: MembershipVector,
    pub correct: usize,
    pub total: usize,
}

impl AttackReport {
    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    pub fn accuracy_exact(&self) -> Rational {
        Rational::from_u64s(self.correct as u64, self.total as u64).expect("total > 0")
    }
}

/// Holds the hidden membership and answers scores truthfully over all of it.
#[derive(Debug, Clone)]
pub struct Curator {
    hidden: MembershipVector,
}

/// Exact-mode oracle over a curator's hidden bits.
#[derive(Debug)]
pub struct CuratorExactOracle<'a> {
    hidden: &'a Labeling,
}

/// Rounding oracle over a curator's hidden bits.
#[derive(Debug)]
pub struct CuratorDecimalOracle<'a> {
    hidden: &'a Labeling,
    phi: u32,
}

pub fn curator_oracle(hidden: MembershipVector) -> Curator {
    Curator::new(hidden)
}

impl Curator {
    pub fn new(hidden: MembershipVector) -> Self {
        Curator { hidden }
    }

    pub fn n(&self) -> usize {
        self.hidden.len()
    }

    /// Curator-side access, for handing the bits to an out-of-process server.
    pub fn hidden(&self) -> &MembershipVector {
        &self.hidden
    }

    pub fn exact_oracle(&self) -> CuratorExactOracle<'_> {
        CuratorExactOracle {
            hidden: self.hidden.bits(),
        }
    }

    pub fn decimal_oracle(&self, phi: u32) -> CuratorDecimalOracle<'_> {
        CuratorDecimalOracle {
            hidden: self.hidden.bits(),
            phi,
        }
    }

    pub fn evaluate(&self, outcome: AttackOutcome) -> AttackReport {
        let correct = if outcome.recovered.len() == self.n() {
            self.hidden.bits().agreement(outcome.recovered.bits())
        } else {
            0
        };
        AttackReport {
            mode: outcome.mode,
            queries_used: outcome.queries_used,
            recovered: outcome.recovered,
            correct,
            total: self.n(),
        }
    }
}

impl ExactOracle for CuratorExactOracle<'_> {
    fn score(&mut self, x: &PredictionVector) -> Result<ExactScore> {
        exact_score(x, self.hidden)
    }
}

impl DecimalOracle for CuratorDecimalOracle<'_> {
    fn phi(&self) -> u32 {
        self.phi
    }

    fn score(&mut self, x: &PredictionVector) -> Result<DecimalAnswer> {
        rounded_answer(x, self.hidden, self.phi)
    }
}

fn check_length(recovered: Labeling, n: usize) -> Result<MembershipVector> {
    if recovered.len() != n {
        return Err(Error::Decode(format!(
            "decoded {} labels for {n} candidates",
            recovered.len()
        )));
    }
    Ok(MembershipVector::new(recovered))
}

/// Submits one crafted vector and decodes the exact answer.
pub fn one_query_attack(
    candidates: &CandidateSet,
    oracle: &mut dyn ExactOracle,
    mode: AttackMode,
) -> Result<AttackOutcome> {
    let n = candidates.len();
    let mut counted = Counting::new(oracle);
    let recovered = match mode {
        AttackMode::ExactTwin => {
            let x = build_twin_prime_vector(n)?;
            decode_twin_prime(&counted.score(&x)?)?
        }
        AttackMode::ExactBinary => {
            let x = build_binary_vector(n)?;
            decode_binary(&counted.score(x.vector())?)?
        }
        AttackMode::FixedPrecision => {
            return Err(Error::InvalidArgument(
                "fixed-precision mode needs a rounding oracle".into(),
            ))
        }
    };
    Ok(AttackOutcome {
        mode,
        queries_used: counted.queries(),
        recovered: check_length(recovered, n)?,
    })
}

/// Batched attack against an oracle rounding to `phi` digits.
pub fn fixed_precision_attack(
    candidates: &CandidateSet,
    oracle: &mut dyn DecimalOracle,
    phi: u32,
) -> Result<AttackOutcome> {
    let n = candidates.len();
    let mut counted = Counting::new(oracle);
    let recovered = batched_inference(n, phi, &mut counted)?;
    Ok(AttackOutcome {
        mode: AttackMode::FixedPrecision,
        queries_used: counted.queries(),
        recovered: check_length(recovered, n)?,
    })
}

/// Runs one in-process session: the attack talks to the curator's oracle,
/// then the curator scores the result.
pub fn run_session(
    candidates: &CandidateSet,
    curator: &Curator,
    mode: AttackMode,
    phi: Option<u32>,
) -> Result<AttackReport> {
    if curator.n() != candidates.len() {
        return Err(Error::LengthMismatch {
            expected: candidates.len(),
            actual: curator.n(),
        });
    }
    let outcome = match mode {
        AttackMode::FixedPrecision => {
            let phi = phi.ok_or_else(|| Error::InvalidArgument("phi required".into()))?;
            fixed_precision_attack(candidates, &mut curator.decimal_oracle(phi), phi)?
        }
        _ => one_query_attack(candidates, &mut curator.exact_oracle(), mode)?,
    };
    Ok(curator.evaluate(outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hidden(s: &str) -> MembershipVector {
        MembershipVector::new(s.parse().unwrap())
    }

    #[test]
    fn curator_answers_exact_scores() {
        let c = curator_oracle(hidden("10"));
        let x = build_twin_prime_vector(2).unwrap();
        assert_eq!(c.exact_oracle().score(&x).unwrap().to_string(), "91/10");
        let c = curator_oracle(hidden("0"));
        let half = PredictionVector::from_u64_pairs(&[(1, 2)]).unwrap();
        assert_eq!(c.exact_oracle().score(&half).unwrap().to_string(), "2/1");
        assert!(c.exact_oracle().score(&x).is_err());
    }

    #[test]
    fn single_query_recovery() {
        for (bits, mode) in [("101", AttackMode::ExactTwin), ("01001", AttackMode::ExactBinary)] {
            let cands = CandidateSet::numbered(bits.len()).unwrap();
            let report = run_session(&cands, &curator_oracle(hidden(bits)), mode, None).unwrap();
            assert_eq!(report.recovered.to_string(), bits);
            assert_eq!(report.queries_used, 1);
            assert_eq!(report.accuracy(), 1.0);
        }
    }

    #[test]
    fn candidate_sets() {
        assert!(CandidateSet::numbered(0).is_err());
        assert!(CandidateSet::new(vec!["a".into(), "a".into()]).is_err());
        let c = CandidateSet::numbered(3).unwrap();
        assert_eq!(hidden("101").members(&c), ["d1", "d3"]);
    }

    #[test]
    fn fixed_mode_requires_rounding_oracle() {
        let cands = CandidateSet::numbered(2).unwrap();
        let c = curator_oracle(hidden("10"));
        assert!(one_query_attack(&cands, &mut c.exact_oracle(), AttackMode::FixedPrecision).is_err());
    }
}
