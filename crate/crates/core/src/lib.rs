//! Spectral toolkit for waveguides with cylindrical ends.
//!
//! The library is organised around the chain of objects that a cylindrical
//! end produces:
//!
//! 1. [`cross_section`] — 2D cross-section domains and their scalar Helmholtz
//!    eigenpairs (Dirichlet and Neumann), solved analytically on rectangles
//!    and discs or by P1 finite elements on triangle meshes.
//! 2. [`pencil`] — the Maxwell pencil and its elliptic augmentation: axial
//!    dispersion, thresholds, multiplicity accounting and reconstruction of
//!    full vector mode sections from scalar potentials.
//! 3. [`waves`] — flux-normalised incoming/outgoing cylinder waves, the wave
//!    families `E` and `Gamma`, and the per-frequency mode ledger.
//! 4. [`scattering`] — scattering matrices for straight guides and separable
//!    step junctions, block assembly, radiation coefficients and decay
//!    diagnostics.
//!
//! All public types are immutable after construction and safe to share
//! across threads.

pub mod cross_section;
pub mod error;
pub mod numerics;
pub mod pencil;
pub mod scattering;
pub mod tol;
pub mod waves;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
