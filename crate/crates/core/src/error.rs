use thiserror::Error;

use crate::combinators::{HypothesisLedger, HypothesisViolation};

pub type Result<T> = std::result::Result<T, Error>;

/// A rejected theorem hypothesis together with every check that was run.
#[derive(Debug, Clone)]
pub struct HypothesisFailure {
    pub violation: HypothesisViolation,
    pub ledger: HypothesisLedger,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("bad interval [{lo}, {hi}): lower endpoint must be below upper endpoint")]
    BadInterval { lo: String, hi: String },
    #[error("rational arithmetic overflowed i64")]
    Overflow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("spectrum not separated on window: points {a} and {b} are {gap:e} apart")]
    NotSeparated { a: f64, b: f64, gap: f64 },
    #[error("duplicate points: {a} and {b}")]
    DuplicatePoints { a: f64, b: f64 },
    #[error("no convergence after {cap} iterations")]
    NoConvergence { cap: usize },
    #[error("grid step {h} too coarse: need h <= {required}")]
    GridTooCoarse { h: String, required: String },
    #[error("duplicate offsets: {0}")]
    DuplicateOffsets(String),
    #[error("offset {offset} outside [0, {period})")]
    OffsetOutOfRange { offset: String, period: String },
    #[error("domain is not contained in the fundamental cell [0, {cell})")]
    DomainNotInFundamentalCell { cell: String },
    #[error("frequency set is not contained in {period}Z (witness {witness})")]
    OmegaNotInLattice { period: String, witness: f64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("delta {0} >= 1/4: the quarter bound does not hold")]
    DeltaTooLarge(f64),
    #[error("epsilon {0} outside (0, 1/4)")]
    EpsilonOutOfRange(String),
    #[error("delta {delta} must satisfy 0 < delta < epsilon = {epsilon}")]
    DeltaNotLessThanEpsilon { delta: String, epsilon: String },
    #[error("singular linear system")]
    SingularSystem,
    #[error("Gram matrix numerically singular (lambda_min = {lambda_min:e})")]
    GramSingular { lambda_min: f64 },
    #[error("multiplier vanishes on the spectrum (min |m| = {floor:e} at {at})")]
    MultiplierFloorZero { floor: f64, at: f64 },
    #[error("first coset offset must be 0, got {0}")]
    OffsetNotNormalized(String),
    #[error("hypothesis violated: {}", .0.violation)]
    Hypothesis(Box<HypothesisFailure>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn violation(&self) -> Option<&HypothesisViolation> {
        match self {
            Error::Hypothesis(f) => Some(&f.violation),
            _ => None,
        }
    }

    /// True when the error encodes a mathematical hypothesis that fails,
    /// as opposed to malformed input or a numerical breakdown.
    pub fn is_hypothesis_gate(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis(_)
                | Error::DeltaTooLarge(_)
                | Error::EpsilonOutOfRange(_)
                | Error::DeltaNotLessThanEpsilon { .. }
                | Error::DomainNotInFundamentalCell { .. }
                | Error::OmegaNotInLattice { .. }
                | Error::NotSeparated { .. }
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::GramSingular { .. } | Error::SingularSystem | Error::MultiplierFloorZero { .. })
    }
}
