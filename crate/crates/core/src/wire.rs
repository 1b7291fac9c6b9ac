//! Text forms: rationals as `"p/q"`, labelings as bitstrings, and JSON
//! documents for vectors, scores, reports and plans.

use serde::{Deserialize, Serialize};

use crate::decimal::{DecimalScore, ScoreKind};
use crate::error::{Error, Result};
use crate::mia::{AttackMode, AttackReport};
use crate::oracle::DecimalAnswer;
use crate::precision::{self, AttackPlan};
use crate::rational::Rational;
use crate::scoring::{ExactScore, PredictionMatrix, PredictionVector};

fn is_canonical_integer(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

/// Parses a reduced, non-negative `"p/q"`; anything that would not print
/// back byte-for-byte is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |why: &str| Error::Parse(format!("{why}: {s:?}"));
    let (p, q) = s.split_once('/').ok_or_else(|| bad("expected p/q"))?;
    if !is_canonical_integer(p) || !is_canonical_integer(q) {
        return Err(bad("expected decimal integers"));
    }
    if q == "0" {
        return Err(bad("zero denominator"));
    }
    let r: Rational = s.parse()?;
    if r.to_string() != s {
        return Err(bad("not reduced"));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    Twin,
    Binary,
    Multiclass,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Vector(Vec<String>),
    Matrix(Vec<Vec<String>>),
}

/// A prediction vector or matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDoc {
    pub kind: VectorKind,
    pub n: usize,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub entries: Entries,
}

impl VectorDoc {
    pub fn from_vector(kind: VectorKind, x: &PredictionVector) -> Self {
        VectorDoc {
            kind,
            n: x.len(),
            k: None,
            entries: Entries::Vector(x.entries().iter().map(ToString::to_string).collect()),
        }
    }

    pub fn from_matrix(m: &PredictionMatrix) -> Self {
        VectorDoc {
            kind: VectorKind::Multiclass,
            n: m.len(),
            k: Some(m.class_count()),
            entries: Entries::Matrix(
                m.rows()
                    .iter()
                    .map(|row| row.iter().map(ToString::to_string).collect())
                    .collect(),
            ),
        }
    }

    pub fn to_vector(&self) -> Result<PredictionVector> {
        match &self.entries {
            Entries::Vector(v) => {
                self.check_n(v.len())?;
                PredictionVector::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
            }
            Entries::Matrix(_) => Err(Error::Parse("expected a vector, found a matrix".into())),
        }
    }

    pub fn to_matrix(&self) -> Result<PredictionMatrix> {
        match &self.entries {
            Entries::Matrix(rows) => {
                self.check_n(rows.len())?;
                let rows = rows
                    .iter()
                    .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let m = PredictionMatrix::new(rows)?;
                if let Some(k) = self.k {
                    if k != m.class_count() {
                        return Err(Error::Parse(format!("K = {k} but rows have {}", m.class_count())));
                    }
                }
                Ok(m)
            }
            Entries::Vector(_) => Err(Error::Parse("expected a matrix, found a vector".into())),
        }
    }

    fn check_n(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }
}

/// An exact score (`escore`, `n`) or a rounded pair (`ll`, `auc`, `phi`).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escore: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ll: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<u32>,
}

impl ScoreDoc {
    pub fn exact(score: &ExactScore) -> Self {
        ScoreDoc {
            escore: Some(score.to_string()),
            n: score.n(),
            ..Default::default()
        }
    }

    pub fn decimal(answer: &DecimalAnswer, phi: u32) -> Self {
        ScoreDoc {
            ll: Some(answer.ll.wire().to_string()),
            auc: Some(answer.auc.wire().to_string()),
            phi: Some(phi),
            ..Default::default()
        }
    }

    pub fn to_exact(&self) -> Result<ExactScore> {
        let s = self
            .escore
            .as_deref()
            .ok_or_else(|| Error::Parse("missing escore".into()))?;
        let v = parse_rational(s)?;
        match self.n {
            Some(n) => ExactScore::new(v, n),
            None => ExactScore::from_value(v),
        }
    }

    pub fn to_log_loss(&self) -> Result<DecimalScore> {
        let s = self.ll.as_deref().ok_or_else(|| Error::Parse("missing ll".into()))?;
        let ll = DecimalScore::parse(s, ScoreKind::LogLoss)?;
        if let Some(phi) = self.phi {
            if phi != ll.phi() {
                return Err(Error::Parse(format!("ll {s:?} does not have {phi} digits")));
            }
        }
        Ok(ll)
    }
}

/// Curator-side summary of one attack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub mode: AttackMode,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<u32>,
    pub seed: u64,
    pub queries_used: usize,
    pub correct: usize,
    pub accuracy: String,
    pub recovered: String,
}

impl ReportDoc {
    pub fn new(report: &AttackReport, phi: Option<u32>, seed: u64) -> Self {
        ReportDoc {
            mode: report.mode,
            n: report.total,
            phi,
            seed,
            queries_used: report.queries_used,
            correct: report.correct,
            accuracy: report.accuracy_exact().to_string(),
            recovered: report.recovered.to_string(),
        }
    }
}

/// A batch as a 1-based inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchDoc {
    pub first: usize,
    pub last: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDoc {
    pub n: usize,
    pub phi: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    pub max_unique_batch: usize,
    pub query_bound: usize,
    pub batch_size: usize,
    pub queries: usize,
    pub batches: Vec<BatchDoc>,
}

impl PlanDoc {
    /// The schedule at the nominal batch size.
    pub fn nominal(n: usize, phi: u32) -> Self {
        let batches: Vec<BatchDoc> = precision::nominal_schedule(n, phi)
            .into_iter()
            .map(|r| BatchDoc {
                first: r.start + 1,
                last: r.end,
            })
            .collect();
        PlanDoc {
            n,
            phi,
            delta: None,
            max_unique_batch: precision::max_unique_batch(phi),
            query_bound: precision::query_bound(n, phi),
            batch_size: precision::nominal_batch_size(phi).min(n),
            queries: batches.len(),
            batches,
        }
    }

    /// The schedule a built plan actually uses.
    pub fn realized(plan: &AttackPlan) -> Self {
        let batches: Vec<BatchDoc> = plan
            .batches()
            .iter()
            .map(|b| BatchDoc {
                first: b.range().start + 1,
                last: b.range().end,
            })
            .collect();
        PlanDoc {
            n: plan.n(),
            phi: plan.phi(),
            delta: None,
            max_unique_batch: precision::max_unique_batch(plan.phi()),
            query_bound: precision::query_bound(plan.n(), plan.phi()),
            batch_size: plan.batch_size(),
            queries: plan.query_count(),
            batches,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_rationals() {
        assert_eq!(parse_rational("91/55").unwrap().to_string(), "91/55");
        assert_eq!(parse_rational("4/1").unwrap(), Rational::from(4));
        for bad in ["4", "2/4", "-1/2", "1/0", "01/2", "1/+2", " 1/2", "1/2 ", "a/b", "1//2"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn vector_documents_round_trip() {
        let x = crate::exact::build_twin_prime_vector(2).unwrap();
        let doc = VectorDoc::from_vector(VectorKind::Twin, &x);
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(text, r#"{"kind":"twin","n":2,"entries":["5/7","11/13"]}"#);
        let back: VectorDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_vector().unwrap(), x);

        let m = crate::exact::build_multiclass_matrix(2, 3).unwrap();
        let doc = VectorDoc::from_matrix(&m);
        let text = serde_json::to_string(&doc).unwrap();
        let back: VectorDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
        assert!(back.to_vector().is_err());
    }

    #[test]
    fn score_documents() {
        let s = ExactScore::new("1729/170".parse().unwrap(), 3).unwrap();
        let text = serde_json::to_string(&ScoreDoc::exact(&s)).unwrap();
        assert_eq!(text, r#"{"escore":"1729/170","n":3}"#);
        let back: ScoreDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_exact().unwrap(), s);
        assert!(serde_json::from_str::<ScoreDoc>(r#"{"escore":"1/2","x":1}"#).is_err());
    }

    #[test]
    fn plan_documents() {
        let p = PlanDoc::nominal(100, 15);
        assert_eq!(p.queries, 2);
        assert_eq!(p.batches, [BatchDoc { first: 1, last: 90 }, BatchDoc { first: 91, last: 100 }]);
        assert_eq!(PlanDoc::nominal(6, 1).queries, 1);
    }
}
