//! Tolerances used across the crate.
//!
//! Every threshold that a test or an operation compares against lives here,
//! with a note on where it comes from.

/// Rayleigh-quotient residual target for the FEM generalized eigensolver.
pub const EIG_RESIDUAL: f64 = 1e-10;

/// Relative gap below which two eigenvalues are treated as one cluster and
/// their eigenvectors re-orthonormalised together.
pub const CLUSTER_GAP: f64 = 1e-6;

/// Orthonormality defect allowed for analytic-backend eigenfunction Gram
/// matrices (exact formulas, quadrature only).
pub const GRAM_ANALYTIC: f64 = 1e-10;

/// Orthonormality defect allowed for FEM-backend Gram matrices.
pub const GRAM_FEM: f64 = 1e-8;

/// `|k^2 - mu| < THRESHOLD_PROXIMITY * max(1, k^2)` counts as "k sits on a
/// threshold" and is rejected: the transverse reconstruction divides by
/// `k^2 - lambda^2` and the wave normalisation degenerates there.
pub const THRESHOLD_PROXIMITY: f64 = 1e-8;

/// Relative tolerance when matching `mu = k^2 - lambda^2` against a spectrum.
pub const MU_MATCH: f64 = 1e-8;

/// Pencil residual bound for analytically backed mode sections.
pub const PENCIL_RESIDUAL_ANALYTIC: f64 = 1e-9;

/// Pencil residual bound for FEM-backed mode sections (h = 0.02 class).
pub const PENCIL_RESIDUAL_FEM: f64 = 1e-5;

/// Below this |flux| a propagating mode is treated as threshold-degenerate.
pub const FLUX_DEGENERATE: f64 = 1e-12;

/// Unitarity defect allowed for straight-guide scattering matrices
/// (diagonal phases, exact up to rounding).
pub const UNITARITY_STRAIGHT: f64 = 1e-12;

/// Unitarity defect allowed for step-junction scattering matrices at the
/// reference truncation M = 40.
pub const UNITARITY_STEP: f64 = 1e-3;

/// Agreement between the radiation-coefficient quadrature formula and the
/// direct modal solution in a straight guide.
pub const RADIATION_AGREEMENT: f64 = 1e-6;

/// Compatibility residual above which a source is rejected as incompatible.
pub const COMPATIBILITY: f64 = 1e-8;

/// Condition-number estimate above which a matching system is reported as
/// ill-conditioned.
pub const MATCHING_CONDITION: f64 = 1e12;
