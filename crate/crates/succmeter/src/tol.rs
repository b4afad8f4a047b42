//! Numerical tolerances used across the crate.
//!
//! Every threshold that a validation or a contract depends on lives here so
//! the values are pinned in one place.

/// Maximum allowed `|M - M†|` entry for a matrix accepted as Hermitian.
pub const HERMITIAN: f64 = 1e-10;

/// Maximum allowed `|tr ρ - 1|` for a density matrix.
pub const TRACE_ONE: f64 = 1e-10;

/// Smallest admissible eigenvalue of a density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Maximum allowed `|P² - P|` and `|P_i P_j|` (i ≠ j) entry for projectors.
pub const PROJECTOR: f64 = 1e-10;

/// Maximum deviation from orthonormality for basis vectors.
pub const ORTHONORMAL: f64 = 1e-10;

/// Reconstruction residual `|Σ_n a_n P_n - H|` allowed for a spectral
/// decomposition of `H`.
pub const SPECTRAL_RECONSTRUCT: f64 = 1e-9;

/// Relative (to the spectral range) eigenvalue-grouping tolerance used when
/// none is supplied explicitly.
pub const GROUP_TOL_REL: f64 = 1e-9;

/// Absolute floor for the automatic grouping tolerance; merges splittings
/// that are pure roundoff even when the spectral range vanishes.
pub const GROUP_TOL_FLOOR: f64 = 1e-12;

/// Outcome probabilities at or below this are treated as zero when
/// conditioning on a measurement outcome.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Smallest admissible overlap `|⟨b_μ|a_n⟩|` between reconstruction bases.
pub const OVERLAP_MIN: f64 = 1e-8;

/// Noise amplification `exp(ε₁²/8σ_Q₁²)` beyond which a reconstruction is
/// flagged ill-conditioned (off-diagonal retrieval dominated by noise).
pub const ILL_CONDITIONED_AMPLIFICATION: f64 = 1e5;

/// Marginal identities of a quasi-probability table must hold within this.
pub const MARGINAL: f64 = 1e-10;

/// Truncated Gaussian mass tolerated outside an oracle position grid.
pub const GRID_MASS: f64 = 1e-14;
