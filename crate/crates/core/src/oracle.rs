//! The only channel through which an attacker learns anything: score oracles.

use crate::decimal::DecimalScore;
use crate::error::Result;
use crate::scoring::{ExactScore, PredictionVector};

/// Answers exact scores `e^(n·LL)` for submitted prediction vectors.
pub trait ExactOracle {
    fn score(&mut self, x: &PredictionVector) -> Result<ExactScore>;
}

/// A rounded `(AUC, LL)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecimalAnswer {
    pub auc: DecimalScore,
    pub ll: DecimalScore,
}

/// Answers `(AUC, LL)` rounded to `phi()` significant digits.
pub trait DecimalOracle {
    fn phi(&self) -> u32;
    fn score(&mut self, x: &PredictionVector) -> Result<DecimalAnswer>;
}

impl<T: ExactOracle + ?Sized> ExactOracle for &mut T {
    fn score(&mut self, x: &PredictionVector) -> Result<ExactScore> {
        (**self).score(x)
    }
}

impl<T: DecimalOracle + ?Sized> DecimalOracle for &mut T {
    fn phi(&self) -> u32 {
        (**self).phi()
    }

    fn score(&mut self, x: &PredictionVector) -> Result<DecimalAnswer> {
        (**self).score(x)
    }
}

/// Counts the queries passed through to an inner oracle.
#[derive(Debug)]
pub struct Counting<O> {
    inner: O,
    queries: usize,
}

impl<O> Counting<O> {
    pub fn new(inner: O) -> Self {
        Counting { inner, queries: 0 }
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: ExactOracle> ExactOracle for Counting<O> {
    fn score(&mut self, x: &PredictionVector) -> Result<ExactScore> {
        self.queries += 1;
        self.inner.score(x)
    }
}

impl<O: DecimalOracle> DecimalOracle for Counting<O> {
    fn phi(&self) -> u32 {
        self.inner.phi()
    }

    fn score(&mut self, x: &PredictionVector) -> Result<DecimalAnswer> {
        self.queries += 1;
        self.inner.score(x)
    }
}
