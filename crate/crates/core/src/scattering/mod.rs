//! Scattering matrices for straight guides and separable step junctions:
//! unitarity, the s/t inverse pair, block assembly, radiation coefficients
//! and decay diagnostics.

pub mod radiation;
pub mod source;
pub mod step;
pub mod straight;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use radiation::{decay_diagnostic, radiation_coefficients, DecayFit};
pub use source::{compatibility_residual, windowed_mode_source, SourceField};
pub use step::{maxwell_step_smatrix, step_incoming_basis_smatrix, step_smatrix, SeparableStep};
pub use straight::{straight_incoming_basis_smatrix, straight_smatrix, FamilyFilter, StraightGuide};

use crate::error::Error;
use crate::pencil::WaveFamily;
use crate::Result;

/// Junction geometries the solvers cover. Port order: end 1 is the `-inf`
/// side, end 2 the `+inf` side.
#[derive(Debug, Clone)]
pub enum JunctionGeometry {
    Straight(StraightGuide),
    Step(SeparableStep),
}

/// One scattering channel: a propagating mode at one end. Row `i` of a
/// matrix is the outgoing version of channel `i`, column `j` the incoming
/// version of channel `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMeta {
    pub end: usize,
    pub family: WaveFamily,
    pub mode: usize,
    pub lambda: f64,
}

/// A complex scattering matrix with channel metadata and stored residuals.
#[derive(Debug, Clone)]
pub struct ScatteringMatrix {
    pub k: f64,
    pub entries: DMatrix<Complex64>,
    pub channels: Vec<ChannelMeta>,
    pub unitarity_residual: f64,
    /// Modal truncation used to compute the entries (0 = exact).
    pub truncation: usize,
    /// Condition-number estimate of the matching system, when one was solved.
    pub condition: Option<f64>,
}

impl ScatteringMatrix {
    pub fn new(
        k: f64,
        entries: DMatrix<Complex64>,
        channels: Vec<ChannelMeta>,
        truncation: usize,
        condition: Option<f64>,
    ) -> Self {
        assert_eq!(entries.nrows(), entries.ncols());
        assert_eq!(entries.nrows(), channels.len());
        let unitarity_residual = unitarity_defect(&entries);
        ScatteringMatrix { k, entries, channels, unitarity_residual, truncation, condition }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry-wise conjugate with the same channel set (time reversal).
    pub fn conjugated(&self) -> Self {
        let entries = self.entries.map(|z| z.conj());
        ScatteringMatrix::new(
            self.k,
            entries,
            self.channels.clone(),
            self.truncation,
            self.condition,
        )
    }
}

/// `|| S^H S - I ||_max`.
pub fn unitarity_defect(s: &DMatrix<Complex64>) -> f64 {
    let n = s.nrows();
    let g = s.adjoint() * s;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
            worst = worst.max((g[(i, j)] - want).norm());
        }
    }
    worst
}

/// `|| T S - I ||_max` for the inverse-pair contract.
pub fn inverse_pair_residual(t: &ScatteringMatrix, s: &ScatteringMatrix) -> f64 {
    assert_eq!(t.dim(), s.dim());
    let p = &t.entries * &s.entries;
    let mut worst = 0.0f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
            worst = worst.max((p[(i, j)] - want).norm());
        }
    }
    worst
}

/// Block-diagonal assembly `sigma = diag(s, upsilon)` of the Maxwell block
/// and the augmented scalar block.
///
/// Errors when the frequencies disagree or a channel appears in both
/// blocks; the unitarity residual of the result equals the worse block's.
pub fn assemble_sigma(
    s: &ScatteringMatrix,
    upsilon: &ScatteringMatrix,
) -> Result<ScatteringMatrix> {
    if s.k != upsilon.k {
        return Err(Error::BlockMismatch(format!(
            "frequency mismatch: {} vs {}",
            s.k, upsilon.k
        )));
    }
    for a in &s.channels {
        for b in &upsilon.channels {
            if a == b {
                return Err(Error::BlockMismatch(format!(
                    "channel {a:?} appears in both blocks"
                )));
            }
        }
    }
    let n = s.dim() + upsilon.dim();
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    entries.view_mut((0, 0), (s.dim(), s.dim())).copy_from(&s.entries);
    entries
        .view_mut((s.dim(), s.dim()), (upsilon.dim(), upsilon.dim()))
        .copy_from(&upsilon.entries);
    let mut channels = s.channels.clone();
    channels.extend_from_slice(&upsilon.channels);
    Ok(ScatteringMatrix::new(
        s.k,
        entries,
        channels,
        s.truncation.max(upsilon.truncation),
        match (s.condition, upsilon.condition) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        },
    ))
}

/// Energy balance for one incident channel: `|1 - sum_i |s_ij|^2|`.
pub fn energy_defect(s: &ScatteringMatrix, j: usize) -> f64 {
    let total: f64 = (0..s.dim()).map(|i| s.entries[(i, j)].norm_sqr()).sum();
    (1.0 - total).abs()
}
