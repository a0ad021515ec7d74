use thiserror::Error;

/// Errors raised by the arithmetic, lattice and geometry layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two values over different imaginary quadratic fields were combined.
    #[error("field mismatch: d={left} vs d={right}")]
    TagMismatch { left: u32, right: u32 },

    /// A generating set does not span a full-rank lattice.
    #[error("degenerate lattice: {0}")]
    DegenerateLattice(String),

    /// A lattice expected to be a sublattice is not contained in its superlattice.
    #[error("lattice is not contained in the given superlattice")]
    NotContained,

    /// An enumeration would exceed the configured cap.
    #[error("resource cap exceeded: {needed} representatives requested, cap is {cap}")]
    ResourceCap { needed: String, cap: u64 },

    /// Two curves with proportional slopes were intersected.
    #[error("curves are parallel ({})", if *.identical { "identical" } else { "disjoint" })]
    ParallelCurves { identical: bool },

    /// A linear system has an infinite solution family modulo the lattice.
    #[error("degenerate intersection: {0}")]
    DegenerateIntersection(String),

    /// The inputs violate the hypotheses of a closed-form shortcut.
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// A computed invariant contradicts an independent computation.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
