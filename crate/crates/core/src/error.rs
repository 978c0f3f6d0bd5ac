use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series has no nonzero coefficient below its truncation index")]
    ZeroSeries,
    #[error("truncation index {have} cannot justify order {want}")]
    InsufficientOrder { have: i64, want: i64 },
    #[error("unsupported Eisenstein weight {0}")]
    UnsupportedWeight(u32),
    #[error("expected weight {expected}, got {got}")]
    WeightMismatch { expected: i64, got: i64 },
    #[error("bad dimension {0} for this lattice")]
    BadDimension(usize),
    #[error("closest-vector search is not supported for {0}")]
    UnsupportedLattice(String),
    #[error("t must be positive")]
    NonpositiveT,
    #[error("tail bound cannot reach 2^-{0}")]
    PrecisionExhausted(u32),
    #[error("head pole at u = {0} needs the sine-cancelled path")]
    PoleAtU(i64),
    #[error("normalizing coefficient is not bounded away from zero")]
    DegenerateHead,
    #[error("oracle does not converge for r = {0}")]
    SlowConvergence(String),
    #[error("unknown form name {0:?}")]
    UnknownForm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
