//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive dimension: {name} = {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh boundary is multiply connected ({loops} loops); only 1-connected domains are supported")]
    MultiplyConnected { loops: usize },

    #[error("backend {backend} is not available for this cross-section kind")]
    BackendUnavailable { backend: &'static str },

    #[error("invalid cutoff {0}; cutoff must be positive")]
    InvalidCutoff(f64),

    #[error("eigensolver failed to converge: requested eigenvalues up to cutoff {cutoff}, converged {achieved}")]
    EigensolverConvergence { cutoff: f64, achieved: usize },

    #[error("point ({0}, {1}) lies outside the cross-section domain")]
    PointOutsideDomain(f64, f64),

    #[error("k = {k} is within tolerance of the threshold sqrt(mu) with mu = {mu}")]
    ThresholdProximity { k: f64, mu: f64 },

    #[error("k = 0 is not admitted here")]
    ZeroFrequency,

    #[error("k^2 - lambda^2 is numerically zero (mu = {mu:e}); use the special lambda = +-k eigenvectors")]
    DegenerateMu { mu: f64 },

    #[error("axial flux is defined only for propagating modes (lambda real); got lambda = {0}")]
    EvanescentInput(num_complex::Complex<f64>),

    #[error("|flux| = {flux:e} below threshold-degeneracy limit; cannot normalise")]
    ThresholdDegeneracy { flux: f64 },

    #[error("cutoff profile support [{t_inner}, {t_outer}] violates the end's cylindrical part")]
    SupportViolation { t_inner: f64, t_outer: f64 },

    #[error("matching system is ill-conditioned: estimated condition number {cond:e}")]
    IllConditioned { cond: f64 },

    #[error("scattering blocks disagree: {0}")]
    BlockMismatch(String),

    #[error("source violates the compatibility conditions: residuals ({0:e}, {1:e}, {2:e})")]
    IncompatibleSource(f64, f64, f64),

    #[error("decay fit needs at least {need} axial sample stations, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("{0}")]
    Config(String),
}
