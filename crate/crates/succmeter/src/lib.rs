//! Simulation of quantum measurements with explicit meter degrees of freedom.
//!
//! A system observable is coupled impulsively to the position of a Gaussian
//! pointer; reading the pointer (rather than postulating a state collapse)
//! yields the measurement statistics. The crate covers:
//!
//! - single measurements: pointer densities, pointer means, the decoherence
//!   factor and the reduced post-measurement state ([`single`]);
//! - successive measurements of two observables: the coupling-dependent
//!   quasi-probability table, the two-pointer correlations, and its
//!   Kirkwood–Dirac / Margenau–Hill / Wigner-rule limits ([`successive`]);
//! - reconstruction of the initial density matrix from projector-pair
//!   correlation measurements at arbitrary coupling strength
//!   ([`reconstruct`]);
//! - an independent verification path that represents the meters as
//!   wavefunctions on position grids and extracts every statistic by
//!   quadrature ([`oracle`]).
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything is safe to share across threads. With the
//! `parallel` feature (enabled by default) the data-parallel inner loops run
//! on rayon; disabling it yields a fully sequential build with identical
//! results.

pub mod error;
pub mod exec;
pub mod io;
pub mod meter;
pub mod operator;
pub mod oracle;
pub mod presets;
pub mod reconstruct;
pub mod scan;
pub mod single;
pub mod successive;
pub mod tol;

pub use error::{Error, Result};
pub use meter::GaussianMeter;
pub use operator::{
    CMatrix, CVector, DensityMatrix, OrthonormalBasis, Projector, SpectralDecomposition,
};
pub use successive::QuasiProbTable;
