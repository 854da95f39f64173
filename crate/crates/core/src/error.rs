use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("negative slope {0} (curves must be wide-sense increasing)")]
    NegativeSlope(Rational),
    #[error("concave curve has negative value {0} at 0+")]
    NegativeOrigin(Rational),
    #[error("curve needs at least one affine piece")]
    Empty,
    #[error("negative abscissa {0}")]
    NegativeTime(Rational),
    #[error("degenerate T-SPEC: peak rate equals sustainable rate ({0})")]
    DegenerateTSpec(Rational),
    #[error("invalid T-SPEC: {0}")]
    InvalidTSpec(&'static str),
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BandwidthError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("negative delay constraint {0}")]
    NegativeDelay(Rational),
    #[error("negative buffer size {0}")]
    NegativeBuffer(Rational),
    #[error("effective bandwidth is unbounded; no finite buffer statement exists")]
    UnboundedRate,
    #[error("flow has zero equivalent capacity")]
    ZeroRate,
    #[error("flow mix has no classes")]
    EmptyMix,
    #[error("flow mix has no class with a positive count")]
    NoActiveClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdmissionError {
    #[error(transparent)]
    Bandwidth(#[from] BandwidthError),
    #[error("link capacity must be positive, got {0}")]
    NonPositiveCapacity(Rational),
    #[error("delay constraint must be non-negative, got {0}")]
    NegativeDelay(Rational),
    #[error("count vector has {got} entries, catalog has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("count vector is all zero")]
    NothingRequested,
    #[error("catalog is empty")]
    EmptyCatalog,
    #[error("class {0} has zero sustainable rate; its admissible count is unbounded without a cap")]
    UnboundedClass(usize),
    #[error("trade-off table needs one or two free classes, got {0}")]
    FreeClassCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Bandwidth(#[from] BandwidthError),
    #[error("time step must be positive")]
    NonPositiveStep,
    #[error("service rate must be positive")]
    NonPositiveRate,
    #[error("horizon must be non-negative")]
    NegativeHorizon,
    #[error("trace must start at 0 and be non-decreasing")]
    InvalidTrace,
}
