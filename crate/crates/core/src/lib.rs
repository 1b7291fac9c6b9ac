//! Exact label reconstruction from Log-Loss scores.

pub mod decimal;
pub mod error;
pub mod exact;
pub mod fixed;
pub mod mia;
pub mod oracle;
pub mod precision;
pub mod primes;
pub mod protocol;
pub mod rational;
pub mod scoring;
pub mod wire;

pub use decimal::{DecimalScore, ScoreKind};
pub use error::{Error, Result};
pub use mia::{AttackMode, AttackReport, CandidateSet, Curator, MembershipVector};
pub use oracle::{DecimalAnswer, DecimalOracle, ExactOracle};
pub use rational::Rational;
pub use scoring::{ClassLabeling, ExactScore, Labeling, PredictionMatrix, PredictionVector};
