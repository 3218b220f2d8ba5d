//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by geometry construction, generation, and metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// A nearest-neighbor query was issued against an index with no points.
    #[error("empty index: nearest-neighbor query needs at least one stored point")]
    EmptyIndex,

    /// A point's dimension does not match the structure it is used with.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Requested gallery surface does not exist.
    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    /// A spacing value or spacing-related parameter is out of range.
    #[error("invalid spacing: {0}")]
    InvalidSpacing(String),

    /// A user-provided start parameter lies outside the parametric domain.
    #[error("start parameter outside the parametric domain")]
    SeedOutsideDomain,

    /// Rejection sampling could not find an in-domain start parameter.
    #[error("no start parameter found inside the domain after {0} rejection samples")]
    NoStartFound(u64),

    /// An operation needs more points than the input provides.
    #[error("too few points: need at least {need}, have {have}")]
    TooFewPoints { need: usize, have: usize },

    /// Second derivatives were requested from a surface that has none.
    #[error("surface `{0}` provides no Hessians")]
    MissingHessians(String),

    /// An altitude grid file failed validation.
    #[error("invalid altitude grid: {0}")]
    InvalidAltitudeGrid(String),

    /// Underlying I/O failure (altitude grid loading, CSV export).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
