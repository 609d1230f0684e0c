//! Scattering matrices of a straight guide: no reflection, no mode
//! conversion, transmission phases `exp(i lambda_j L)` between the two port
//! reference planes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ChannelMeta, ScatteringMatrix};
use crate::cross_section::CrossSection;
use crate::error::Error;
use crate::pencil::WaveFamily;
use crate::waves::{build_ledger, CylinderWave, Direction, LedgerOptions};
use crate::Result;

/// A straight guide of the given length: port 1 at `t = 0` (left), port 2
/// at `t = L` (right); both ends share one cross-section.
#[derive(Debug, Clone)]
pub struct StraightGuide {
    pub cs: CrossSection,
    pub length: f64,
}

impl StraightGuide {
    pub fn new(cs: CrossSection, length: f64) -> Result<Self> {
        if length < 0.0 {
            return Err(Error::NonPositiveDimension { name: "L", value: length });
        }
        Ok(StraightGuide { cs, length })
    }
}

/// Which families enter the channel set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyFilter {
    /// TE/TM channels only: the Maxwell block `s`.
    Maxwell,
    /// Scalar and constant channels only: the augmented block `upsilon`.
    Augmented,
    /// Everything: `sigma` directly.
    All,
}

impl FamilyFilter {
    fn accepts(self, family: WaveFamily) -> bool {
        match self {
            FamilyFilter::Maxwell => matches!(family, WaveFamily::Te | WaveFamily::Tm),
            FamilyFilter::Augmented => !matches!(family, WaveFamily::Te | WaveFamily::Tm),
            FamilyFilter::All => true,
        }
    }
}

/// Channel list for the straight guide: per end, its outgoing propagating
/// waves in ledger order. The wave list is shared by both ports.
pub(crate) fn straight_channels(
    guide: &StraightGuide,
    k: f64,
    filter: FamilyFilter,
) -> Result<(Vec<ChannelMeta>, Vec<CylinderWave>)> {
    let ledger = build_ledger(&[&guide.cs, &guide.cs], k, &LedgerOptions::default())?;
    let mut channels = Vec::new();
    let mut waves = Vec::new();
    let mut per_end_mode = [0usize; 2];
    for w in ledger.e_waves.iter().chain(&ledger.gamma_waves) {
        if w.direction == Direction::Outgoing && filter.accepts(w.family) {
            let end = w.end_index;
            channels.push(ChannelMeta {
                end,
                family: w.family,
                mode: per_end_mode[end],
                lambda: w.lambda,
            });
            waves.push(w.clone());
            per_end_mode[end] += 1;
        }
    }
    // stable order: end, then ledger order
    let mut idx: Vec<usize> = (0..channels.len()).collect();
    idx.sort_by_key(|&i| (channels[i].end, channels[i].mode));
    let channels = idx.iter().map(|&i| channels[i]).collect();
    let waves = idx.iter().map(|&i| waves[i].clone()).collect();
    Ok((channels, waves))
}

/// The straight-guide scattering matrix: a port-swap permutation with
/// transmission phases `exp(i lambda_j L)` and exactly zero reflection.
pub fn straight_smatrix(
    guide: &StraightGuide,
    k: f64,
    filter: FamilyFilter,
) -> Result<ScatteringMatrix> {
    let (channels, _) = straight_channels(guide, k, filter)?;
    let n = channels.len();
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for (i, ci) in channels.iter().enumerate() {
        for (j, cj) in channels.iter().enumerate() {
            if ci.end != cj.end && ci.family == cj.family && ci.mode == cj.mode {
                entries[(i, j)] =
                    (Complex64::I * ci.lambda.abs() * guide.length).exp();
            }
        }
    }
    Ok(ScatteringMatrix::new(k, entries, channels, 0, None))
}

/// The incoming-based matrix `t` of the straight guide: conjugate phases,
/// exact inverse of `s`.
pub fn straight_incoming_basis_smatrix(
    guide: &StraightGuide,
    k: f64,
    filter: FamilyFilter,
) -> Result<ScatteringMatrix> {
    Ok(straight_smatrix(guide, k, filter)?.conjugated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{assemble_sigma, inverse_pair_residual};
    use std::f64::consts::PI;

    fn guide(length: f64) -> StraightGuide {
        StraightGuide::new(CrossSection::rectangle(1.0, 1.0).unwrap(), length).unwrap()
    }

    #[test]
    fn unit_square_k4_te_phases() {
        let g = guide(2.0);
        let s = straight_smatrix(&g, 4.0, FamilyFilter::Maxwell).unwrap();
        assert_eq!(s.dim(), 4, "Upsilon = 4 over two ends");
        let lam = (16.0 - PI * PI).sqrt();
        let want = (Complex64::I * lam * 2.0).exp();
        for (i, ci) in s.channels.iter().enumerate() {
            for (j, cj) in s.channels.iter().enumerate() {
                let e = s.entries[(i, j)];
                if ci.end != cj.end && ci.mode == cj.mode {
                    assert!((e - want).norm() < 1e-13, "transmission {e} vs {want}");
                } else {
                    assert_eq!(e, Complex64::ZERO, "reflection/conversion must be 0");
                }
            }
        }
        assert!(s.unitarity_residual < 1e-13);
    }

    #[test]
    fn zero_length_is_port_swap_identity() {
        let g = guide(0.0);
        let s = straight_smatrix(&g, 4.0, FamilyFilter::Maxwell).unwrap();
        for (i, ci) in s.channels.iter().enumerate() {
            for (j, cj) in s.channels.iter().enumerate() {
                let want = if ci.end != cj.end && ci.mode == cj.mode {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                assert_eq!(s.entries[(i, j)], want);
            }
        }
    }

    #[test]
    fn inverse_pair_is_exact() {
        let g = guide(1.7);
        for filter in [FamilyFilter::Maxwell, FamilyFilter::Augmented, FamilyFilter::All] {
            let s = straight_smatrix(&g, 4.3, filter).unwrap();
            let t = straight_incoming_basis_smatrix(&g, 4.3, filter).unwrap();
            assert!(inverse_pair_residual(&t, &s) < 1e-13);
        }
    }

    #[test]
    fn sigma_diagonal_over_all_channels() {
        let g = guide(1.0);
        let k = 4.0;
        let s = straight_smatrix(&g, k, FamilyFilter::Maxwell).unwrap();
        let u = straight_smatrix(&g, k, FamilyFilter::Augmented).unwrap();
        let sigma = assemble_sigma(&s, &u).unwrap();
        // T_total = 2 Upsilon + N with Upsilon = 4, N = 2 -> per-direction 10
        assert_eq!(sigma.dim(), 10);
        assert!(sigma.unitarity_residual < 1e-13);
        let direct = straight_smatrix(&g, k, FamilyFilter::All).unwrap();
        assert_eq!(direct.dim(), sigma.dim());
    }

    #[test]
    fn below_first_threshold_maxwell_block_is_empty() {
        let g = guide(1.0);
        let s = straight_smatrix(&g, 3.0, FamilyFilter::Maxwell).unwrap();
        assert_eq!(s.dim(), 0);
        // the augmented block still carries the two constant channels
        let u = straight_smatrix(&g, 3.0, FamilyFilter::Augmented).unwrap();
        assert_eq!(u.dim(), 2);
    }

    #[test]
    fn threshold_proximity_propagates() {
        let g = guide(1.0);
        assert!(matches!(
            straight_smatrix(&g, PI, FamilyFilter::Maxwell),
            Err(Error::ThresholdProximity { .. })
        ));
    }
}
