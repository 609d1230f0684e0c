//! The Maxwell pencil and its elliptic augmentation: real spectra,
//! thresholds, multiplicities, mode reconstruction and the special
//! `lambda = +-k` eigenvectors.
//!
//! Dispersion: a scalar eigenvalue `mu` of the cross-section contributes
//! axial wavenumbers `lambda` with `lambda^2 = k^2 - mu`; real for
//! propagating points (`mu < k^2`), `lambda = +i sqrt(mu - k^2)` on the
//! canonical evanescent branch.

pub mod identities;
mod section;

use std::sync::Arc;

use num_complex::Complex64;

pub use section::{
    apply_pencil, apply_pencil_at, boundary_residual, ComponentSample, SectionSample,
    VectorModeSection, WaveFamily,
};

use crate::cross_section::{BoundaryCondition, CrossSection, ScalarEigenpair};
use crate::error::Error;
use crate::Result;

/// One point of the pencil spectrum: frequency, axial wavenumber, and the
/// generating scalar eigenpair.
#[derive(Debug, Clone)]
pub struct PencilPoint {
    pub k: f64,
    pub lambda: Complex64,
    /// `k^2 - lambda^2`, stored redundantly and checked on construction.
    pub mu: f64,
    pub bc_origin: BoundaryCondition,
    pub potential: Arc<ScalarEigenpair>,
}

impl PencilPoint {
    /// Propagating point `lambda = sign * sqrt(k^2 - mu)`; requires `mu < k^2`.
    pub fn propagating(k: f64, sign: f64, potential: Arc<ScalarEigenpair>) -> Result<Self> {
        let mu = potential.mu();
        if mu >= k * k {
            return Err(Error::ThresholdProximity { k, mu });
        }
        let lambda = Complex64::from(sign.signum() * (k * k - mu).sqrt());
        Ok(PencilPoint { k, lambda, mu, bc_origin: potential.bc(), potential })
    }

    /// Evanescent point on the canonical branch `lambda = +i sqrt(mu - k^2)`.
    pub fn evanescent(k: f64, potential: Arc<ScalarEigenpair>) -> Result<Self> {
        let mu = potential.mu();
        if mu <= k * k {
            return Err(Error::ThresholdProximity { k, mu });
        }
        let lambda = Complex64::new(0.0, (mu - k * k).sqrt());
        Ok(PencilPoint { k, lambda, mu, bc_origin: potential.bc(), potential })
    }

    pub fn is_propagating(&self) -> bool {
        self.lambda.im == 0.0
    }

    /// Dispersion defect `|lambda^2 + mu - k^2|`; zero by construction up to
    /// rounding.
    pub fn dispersion_defect(&self) -> f64 {
        (self.lambda * self.lambda + self.mu - self.k * self.k).norm()
    }
}

/// Geometric multiplicities at one `(k, lambda)`:
/// `kappa_a = 2 kappa_m = 2 (kappa_d + kappa_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub kappa_a: usize,
    pub kappa_m: usize,
    pub kappa_d: usize,
    pub kappa_n: usize,
}

/// A merged threshold entry.
#[derive(Debug, Clone)]
pub struct ThresholdEntry {
    pub k: f64,
    pub multiplicity: usize,
    pub origins: Vec<ThresholdOrigin>,
}

/// One (end, boundary condition) source of a threshold.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdOrigin {
    pub end: usize,
    pub bc: BoundaryCondition,
    pub multiplicity: usize,
}

fn is_threshold_proximal(k: f64, mu: f64) -> bool {
    (k * k - mu).abs() < crate::tol::THRESHOLD_PROXIMITY * (k * k).max(1.0)
}

/// Scalar eigenvalues feeding the Maxwell pencil at frequency `k`:
/// Dirichlet `mu` and positive Neumann `mu`. Errors on threshold proximity.
fn pencil_potentials(
    cs: &CrossSection,
    k: f64,
    cutoff: f64,
) -> Result<Vec<Arc<ScalarEigenpair>>> {
    let mut out = Vec::new();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        for pair in cs.helmholtz_eigs(bc, cutoff)?.iter() {
            if pair.is_constant() {
                continue;
            }
            if is_threshold_proximal(k, pair.mu()) {
                return Err(Error::ThresholdProximity { k, mu: pair.mu() });
            }
            out.push(pair.clone());
        }
    }
    Ok(out)
}

/// All real eigenvalue points of the Maxwell pencil at frequency `k`:
/// `lambda = +-sqrt(k^2 - mu)` for every Dirichlet `mu < k^2` and positive
/// Neumann `mu < k^2`, repeated by multiplicity. `mu = 0` is excluded (not a
/// Maxwell eigenvalue for `k != 0`). Deterministic order: descending
/// `lambda`, then Dirichlet before Neumann, then ascending `mu`.
pub fn real_maxwell_spectrum(cs: &CrossSection, k: f64) -> Result<Vec<PencilPoint>> {
    if k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let k = k.abs();
    let mut points = Vec::new();
    for pot in pencil_potentials(cs, k, k * k * (1.0 + 1e-6) + 1.0)? {
        if pot.mu() < k * k {
            points.push(PencilPoint::propagating(k, 1.0, pot.clone())?);
            points.push(PencilPoint::propagating(k, -1.0, pot)?);
        }
    }
    points.sort_by(|a, b| {
        (-a.lambda.re, a.bc_origin, a.mu)
            .partial_cmp(&(-b.lambda.re, b.bc_origin, b.mu))
            .unwrap()
    });
    Ok(points)
}

/// Evanescent pencil points (`mu > k^2`) up to `mu <= mu_cutoff`, on the
/// canonical branch, ascending in `mu`.
pub fn evanescent_points(cs: &CrossSection, k: f64, mu_cutoff: f64) -> Result<Vec<PencilPoint>> {
    let k = k.abs();
    let mut points = Vec::new();
    for pot in pencil_potentials(cs, k, mu_cutoff)? {
        if pot.mu() > k * k {
            points.push(PencilPoint::evanescent(k, pot)?);
        }
    }
    points.sort_by(|a, b| (a.mu, a.bc_origin).partial_cmp(&(b.mu, b.bc_origin)).unwrap());
    Ok(points)
}

/// All thresholds `k = sqrt(mu) <= k_max` over a list of ends, sorted
/// ascending, coincidences merged with multiplicities summed.
pub fn thresholds(cs_list: &[&CrossSection], k_max: f64) -> Result<Vec<ThresholdEntry>> {
    let mut raw: Vec<(f64, usize, BoundaryCondition)> = Vec::new();
    for (end, cs) in cs_list.iter().enumerate() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            for pair in cs.helmholtz_eigs(bc, k_max * k_max)?.iter() {
                if pair.mu() > 0.0 && !pair.is_constant() {
                    raw.push((pair.mu().sqrt(), end, bc));
                }
            }
        }
    }
    raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut entries: Vec<ThresholdEntry> = Vec::new();
    let tol = |k: f64| 1e-8 * k.max(1.0);
    for (k, end, bc) in raw {
        match entries.last_mut() {
            Some(e) if (k - e.k).abs() <= tol(k) => {
                e.multiplicity += 1;
                if let Some(o) = e.origins.iter_mut().find(|o| o.end == end && o.bc == bc) {
                    o.multiplicity += 1;
                } else {
                    e.origins.push(ThresholdOrigin { end, bc, multiplicity: 1 });
                }
            }
            _ => entries.push(ThresholdEntry {
                k,
                multiplicity: 1,
                origins: vec![ThresholdOrigin { end, bc, multiplicity: 1 }],
            }),
        }
    }
    Ok(entries)
}

/// Distance from `k` to the nearest threshold of any listed end (searching
/// slightly beyond `k`).
pub fn threshold_distance(cs_list: &[&CrossSection], k: f64) -> Result<f64> {
    let entries = thresholds(cs_list, 2.0 * k.abs() + 1.0)?;
    Ok(entries
        .iter()
        .map(|e| (e.k - k.abs()).abs())
        .fold(f64::INFINITY, f64::min))
}

/// Which channel of the augmented system a potential drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// `phi_3`/`psi_3` slots: TE/TM Maxwell modes.
    Maxwell,
    /// `alpha`/`beta` slots: augmented-only scalar modes.
    Scalar,
}

/// Reconstruct the full vector mode of a pencil point.
///
/// Dirichlet potentials drive `phi_3` (TM) or `beta`; Neumann potentials
/// drive `psi_3` (TE) or `alpha`. Requires `|k^2 - lambda^2|` away from
/// zero; the `lambda = +-k` vectors come from [`special_vectors`].
pub fn build_mode(point: &PencilPoint, k: f64, channel: ChannelKind) -> Result<VectorModeSection> {
    debug_assert_eq!(point.k, k, "pencil point frequency must match");
    let family = match (point.bc_origin, channel) {
        (BoundaryCondition::Dirichlet, ChannelKind::Maxwell) => WaveFamily::Tm,
        (BoundaryCondition::Neumann, ChannelKind::Maxwell) => WaveFamily::Te,
        (BoundaryCondition::Neumann, ChannelKind::Scalar) => WaveFamily::AlphaScalar,
        (BoundaryCondition::Dirichlet, ChannelKind::Scalar) => WaveFamily::BetaScalar,
    };
    VectorModeSection::from_potential(point.potential.clone(), family, point.lambda, k)
}

/// The special eigenvectors at `lambda^2 = k^2`.
///
/// For `k != 0`: the two vectors at `lambda = +-k` with constant
/// `alpha = 1/sqrt(|Omega|)` and `psi_3 = (lambda/k) alpha`; they do not
/// belong to the Maxwell pencil domain. For `k = 0`: the alpha-constant and
/// psi3-constant pair at `lambda = 0` (the latter is a Maxwell eigenvector).
pub fn special_vectors(cs: &CrossSection, k: f64) -> Result<Vec<(PencilPoint, VectorModeSection)>> {
    let neumann = cs.helmholtz_eigs(BoundaryCondition::Neumann, 1.0)?;
    let const_pair = neumann
        .iter()
        .find(|p| p.is_constant())
        .expect("Neumann list always includes the constant mode")
        .clone();
    if k == 0.0 {
        let (alpha_vec, psi_vec) = VectorModeSection::k_zero_pair(const_pair.clone());
        let point = PencilPoint {
            k: 0.0,
            lambda: Complex64::ZERO,
            mu: 0.0,
            bc_origin: BoundaryCondition::Neumann,
            potential: const_pair,
        };
        return Ok(vec![(point.clone(), alpha_vec), (point, psi_vec)]);
    }
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let section = VectorModeSection::constant_special(const_pair.clone(), sign, k);
        let point = PencilPoint {
            k,
            lambda: section.lambda(),
            mu: 0.0,
            bc_origin: BoundaryCondition::Neumann,
            potential: const_pair.clone(),
        };
        out.push((point, section));
    }
    Ok(out)
}

/// Multiplicity accounting at a real `(k, lambda)` with `lambda^2 != k^2`:
/// `kappa_d`/`kappa_n` count matches of `mu = k^2 - lambda^2` in the
/// Dirichlet/Neumann spectra; `kappa_m = kappa_d + kappa_n`,
/// `kappa_a = 2 kappa_m`.
pub fn multiplicity_report(cs: &CrossSection, k: f64, lambda: f64) -> Result<MultiplicityReport> {
    let mu = k * k - lambda * lambda;
    let tol = crate::tol::MU_MATCH * mu.abs().max(1.0);
    let cutoff = (mu + tol).max(1e-6) + 1.0;
    let mut kappa_d = 0usize;
    let mut kappa_n = 0usize;
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        for pair in cs.helmholtz_eigs(bc, cutoff)?.iter() {
            if pair.is_constant() {
                continue;
            }
            if (pair.mu() - mu).abs() <= tol {
                match bc {
                    BoundaryCondition::Dirichlet => kappa_d += 1,
                    BoundaryCondition::Neumann => kappa_n += 1,
                }
            }
        }
    }
    let kappa_m = kappa_d + kappa_n;
    Ok(MultiplicityReport { kappa_a: 2 * kappa_m, kappa_m, kappa_d, kappa_n })
}

/// Decay-rate parameter for remainder diagnostics: half the distance from
/// the real axis to the first evanescent branch,
/// `delta = min_q sqrt(mu_first_evanescent - k^2) / 2`.
pub fn spectral_gap_delta(cs_list: &[&CrossSection], k: f64) -> Result<f64> {
    let k = k.abs();
    let mut delta = f64::INFINITY;
    for cs in cs_list {
        let mut cutoff = (k * k + 10.0).max(2.0 * k * k);
        let first_ev = loop {
            let mut best = f64::INFINITY;
            for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
                for pair in cs.helmholtz_eigs(bc, cutoff)?.iter() {
                    if pair.mu() > k * k && pair.mu() < best {
                        best = pair.mu();
                    }
                }
            }
            if best.is_finite() {
                break best;
            }
            cutoff *= 4.0;
        };
        delta = delta.min(0.5 * (first_ev - k * k).sqrt());
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> CrossSection {
        CrossSection::rectangle(1.0, 1.0).unwrap()
    }

    #[test]
    fn spectrum_unit_square_k4() {
        // pi < 4 < sqrt(2) pi: only the doubly degenerate Neumann pi^2
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 4.0).unwrap();
        assert_eq!(pts.len(), 4, "kappa = 4");
        let lam = (16.0 - PI * PI).sqrt();
        for p in &pts {
            assert!((p.lambda.re.abs() - lam).abs() < 1e-12);
            assert_eq!(p.bc_origin, BoundaryCondition::Neumann);
            assert!(p.dispersion_defect() < 1e-12);
        }
        // symmetric: +lambda and -lambda in equal numbers
        let plus = pts.iter().filter(|p| p.lambda.re > 0.0).count();
        assert_eq!(plus, 2);
    }

    #[test]
    fn spectrum_below_first_threshold_is_empty() {
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 3.0).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn spectrum_k46_adds_dirichlet_pair() {
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 4.6).unwrap();
        // crossing sqrt(2) pi adds the Dirichlet (1,1) pair and the Neumann
        // (1,1) pair (both sit at mu = 2 pi^2 on the square): kappa = 8
        assert_eq!(pts.len(), 8, "kappa = 8");
        let lam_d = (4.6f64 * 4.6 - 2.0 * PI * PI).sqrt();
        let n_dir = pts
            .iter()
            .filter(|p| p.bc_origin == BoundaryCondition::Dirichlet)
            .count();
        assert_eq!(n_dir, 2);
        let d = pts
            .iter()
            .find(|p| p.bc_origin == BoundaryCondition::Dirichlet)
            .unwrap();
        assert!((d.lambda.re.abs() - lam_d).abs() < 1e-12);
        assert!((lam_d - 1.191).abs() < 1e-3);
    }

    #[test]
    fn zero_frequency_rejected() {
        assert!(matches!(
            real_maxwell_spectrum(&unit_square(), 0.0),
            Err(Error::ZeroFrequency)
        ));
    }

    #[test]
    fn threshold_proximity_rejected() {
        let cs = unit_square();
        assert!(matches!(
            real_maxwell_spectrum(&cs, PI),
            Err(Error::ThresholdProximity { .. })
        ));
    }

    #[test]
    fn thresholds_unit_square() {
        let cs = unit_square();
        let list = thresholds(&[&cs], 8.0).unwrap();
        // first: k = pi from Neumann, multiplicity 2 (cos pi x, cos pi y)
        assert!((list[0].k - PI).abs() < 1e-12);
        assert_eq!(list[0].multiplicity, 2);
        assert_eq!(list[0].origins[0].bc, BoundaryCondition::Neumann);
        // second: sqrt(2) pi, Dirichlet (1,1) and Neumann (1,1) coincide
        assert!((list[1].k - 2.0f64.sqrt() * PI).abs() < 1e-12);
        assert_eq!(list[1].multiplicity, 2);
        assert_eq!(list[1].origins.len(), 2);
        // below pi: empty
        assert!(thresholds(&[&cs], 3.0).unwrap().is_empty());
    }

    #[test]
    fn thresholds_two_ends_merge_union() {
        let sq = unit_square();
        let rect = CrossSection::rectangle(0.7, 0.4).unwrap();
        let list = thresholds(&[&sq, &rect], 8.0).unwrap();
        // contains pi (end 0) and pi/0.7 (end 1)
        assert!(list
            .iter()
            .any(|e| (e.k - PI).abs() < 1e-12 && e.origins.iter().all(|o| o.end == 0)));
        assert!(list
            .iter()
            .any(|e| (e.k - PI / 0.7).abs() < 1e-12 && e.origins.iter().all(|o| o.end == 1)));
        for w in list.windows(2) {
            assert!(w[0].k <= w[1].k);
        }
    }

    #[test]
    fn kappa_constant_between_thresholds_and_even() {
        let cs = unit_square();
        let th = thresholds(&[&cs], 8.0).unwrap();
        let edges: Vec<f64> = th.iter().map(|e| e.k).collect();
        for band in edges.windows(2) {
            if (band[1] - band[0]).abs() < 1e-9 {
                continue;
            }
            let mut counts = Vec::new();
            for i in 1..=5 {
                let k = band[0] + (band[1] - band[0]) * i as f64 / 6.0;
                let kappa = real_maxwell_spectrum(&cs, k).unwrap().len();
                assert_eq!(kappa % 2, 0);
                counts.push(kappa);
            }
            assert!(counts.windows(2).all(|w| w[0] == w[1]), "kappa constant in band");
        }
    }

    #[test]
    fn build_mode_te_pencil_residual_small() {
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 4.0).unwrap();
        for p in &pts {
            for channel in [ChannelKind::Maxwell, ChannelKind::Scalar] {
                let sec = build_mode(p, 4.0, channel).unwrap();
                let r = apply_pencil(&sec, p.lambda, 4.0, &cs);
                assert!(
                    r < crate::tol::PENCIL_RESIDUAL_ANALYTIC,
                    "{:?} {channel:?}: residual {r}",
                    sec.family()
                );
            }
        }
    }

    #[test]
    fn zero_section_zero_residual() {
        let cs = unit_square();
        let z = VectorModeSection::zero(4.0);
        assert_eq!(apply_pencil(&z, Complex64::from(1.3), 4.0, &cs), 0.0);
    }

    #[test]
    fn perturbed_lambda_gives_large_residual() {
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 4.0).unwrap();
        let sec = build_mode(&pts[0], 4.0, ChannelKind::Maxwell).unwrap();
        let r = apply_pencil(&sec, pts[0].lambda + 0.1, 4.0, &cs);
        // regression floor measured once on the analytic backend (0.1766)
        assert!(r > 0.15, "perturbed residual {r} should be far from zero");
    }

    #[test]
    fn build_mode_rejects_lambda_equals_k() {
        let cs = unit_square();
        let neu = cs.helmholtz_eigs(BoundaryCondition::Neumann, 15.0).unwrap();
        let pot = neu.iter().find(|p| !p.is_constant()).unwrap().clone();
        let point = PencilPoint {
            k: 4.0,
            lambda: Complex64::from(4.0),
            mu: 0.0,
            bc_origin: BoundaryCondition::Neumann,
            potential: pot,
        };
        assert!(matches!(
            build_mode(&point, 4.0, ChannelKind::Maxwell),
            Err(Error::DegenerateMu { .. })
        ));
    }

    #[test]
    fn boundary_conditions_hold_for_built_modes() {
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 4.6).unwrap();
        let samples = cs.boundary_samples(100);
        for p in &pts {
            for channel in [ChannelKind::Maxwell, ChannelKind::Scalar] {
                let sec = build_mode(p, 4.6, channel).unwrap();
                let r = boundary_residual(&sec, &samples);
                assert!(r < 1e-9, "{:?}: boundary residual {r}", sec.family());
            }
        }
    }

    #[test]
    fn special_vectors_k2() {
        let cs = unit_square();
        let sv = special_vectors(&cs, 2.0).unwrap();
        assert_eq!(sv.len(), 2);
        for (point, sec) in &sv {
            assert!((point.lambda.re.abs() - 2.0).abs() < 1e-15);
            // alpha = 1 on the unit square, psi3 = lambda/k
            let s = sec.eval([0.3, 0.4]);
            assert!((s.alpha.v.re - 1.0).abs() < 1e-15);
            assert!((s.psi[2].v.re - point.lambda.re / 2.0).abs() < 1e-15);
            // exact pencil solution
            let r = apply_pencil(sec, point.lambda, 2.0, &cs);
            assert!(r < 1e-14, "special vector residual {r}");
            // not in the Maxwell domain
            assert!(!sec.in_maxwell_domain());
        }
    }

    #[test]
    fn special_vectors_k0() {
        let cs = unit_square();
        let sv = special_vectors(&cs, 0.0).unwrap();
        assert_eq!(sv.len(), 2);
        assert!(sv.iter().all(|(p, _)| p.lambda == Complex64::ZERO));
        // one of them is a Maxwell eigenvector (psi3 constant), one is not
        let maxwell: Vec<bool> = sv.iter().map(|(_, s)| s.in_maxwell_domain()).collect();
        assert_eq!(maxwell.iter().filter(|&&b| b).count(), 1);
        for (p, s) in &sv {
            assert!(apply_pencil(s, p.lambda, 0.0, &cs) < 1e-14);
        }
    }

    #[test]
    fn multiplicity_report_examples() {
        let cs = unit_square();
        let lam = (16.0 - PI * PI).sqrt();
        let rep = multiplicity_report(&cs, 4.0, lam).unwrap();
        assert_eq!(
            rep,
            MultiplicityReport { kappa_a: 4, kappa_m: 2, kappa_d: 0, kappa_n: 2 }
        );
        // miss: lambda matching nothing
        let rep = multiplicity_report(&cs, 4.0, 1.234).unwrap();
        assert_eq!(rep.kappa_a, 0);
        // double Dirichlet eigenvalue 5 pi^2: pick k, lambda with k^2-lambda^2 = 5 pi^2
        let mu = 5.0 * PI * PI;
        let k = 7.5;
        let lam = (k * k - mu).sqrt();
        let rep = multiplicity_report(&cs, k, lam).unwrap();
        assert_eq!(rep.kappa_d, 2);
        assert_eq!(rep.kappa_n, 2); // Neumann shares 5 pi^2 on the square
        assert_eq!(rep.kappa_a, 2 * rep.kappa_m);
    }

    #[test]
    fn delta_is_half_gap() {
        let cs = unit_square();
        let k = 4.0;
        // first evanescent mu above 16: Dirichlet 2 pi^2 = 19.74
        let want = 0.5 * (2.0 * PI * PI - 16.0f64).sqrt();
        let got = spectral_gap_delta(&[&cs], k).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn evanescent_points_on_canonical_branch() {
        let cs = unit_square();
        let pts = evanescent_points(&cs, 4.0, 60.0).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            assert!(p.lambda.re == 0.0 && p.lambda.im > 0.0);
            assert!(p.dispersion_defect() < 1e-10);
        }
        // ascending mu
        for w in pts.windows(2) {
            assert!(w[0].mu <= w[1].mu);
        }
    }

    #[test]
    fn fem_backed_mode_has_small_residual() {
        let cs = CrossSection::rectangle_fem(1.0, 1.0, 0.02).unwrap();
        let pts = real_maxwell_spectrum(&cs, 4.0).unwrap();
        let sec = build_mode(&pts[0], 4.0, ChannelKind::Maxwell).unwrap();
        let r = apply_pencil(&sec, pts[0].lambda, 4.0, &cs);
        assert!(
            r < crate::tol::PENCIL_RESIDUAL_FEM,
            "fem pencil residual {r}"
        );
    }
}
