use thiserror::Error;

/// Errors produced by the measurement-model operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The matrix deviates from its adjoint by more than the Hermiticity
    /// tolerance.
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// The matrix fails one of the density-matrix requirements; the violated
    /// property is named.
    #[error("invalid density matrix: {property}")]
    InvalidState { property: String },

    /// The matrix is not an orthogonal projector.
    #[error("matrix is not a projector: max |P² - P| = {deviation:.3e}")]
    NotProjector { deviation: f64 },

    /// Two operands live on Hilbert spaces of different dimension.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Meter parameters outside the admissible range.
    #[error("invalid meter: {reason}")]
    InvalidMeter { reason: String },

    /// Conditioning on an outcome whose probability is numerically zero.
    #[error("outcome probability {probability:.3e} is at or below {threshold:.1e}")]
    ZeroProbability { probability: f64, threshold: f64 },

    /// The reconstruction bases are not complementary.
    #[error("bases are not complementary: {diagnostic}")]
    NotComplementary { diagnostic: String },

    /// A basis overlap required by the reconstruction formula is numerically
    /// zero.
    #[error("overlap |⟨b_{mu}|a_{nu}⟩| = {overlap:.3e} is below {minimum:.1e}")]
    ZeroOverlap {
        nu: usize,
        mu: usize,
        overlap: f64,
        minimum: f64,
    },

    /// The record set does not cover every projector pair exactly once, or
    /// its metadata is inconsistent.
    #[error("invalid record set (need one record per projector pair): {reason}")]
    IncompleteRecords { reason: String },

    /// The oracle grid violates its extent invariant.
    #[error("meter grid too small: {reason}")]
    GridTooSmall { reason: String },

    /// A precondition on a plain argument was violated.
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
