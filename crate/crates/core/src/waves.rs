//! Flux-normalised cylinder waves, the wave families `E` and `Gamma`, and
//! the per-frequency mode ledger.
//!
//! Flux convention (this fixes the normalisation the scattering matrices
//! are unitary in): Maxwell families carry the axial Poynting flux
//! `Re int <phi x conj(psi), e3>`, scalar families `lambda ||u||^2`, the
//! constant special family `(lambda/k) ||alpha||^2`. Positive flux means
//! outgoing, energy toward `t = +infinity`.

use num_complex::Complex64;

use crate::cross_section::CrossSection;
use crate::error::Error;
use crate::pencil::{
    self, build_mode, special_vectors, ChannelKind, PencilPoint, VectorModeSection, WaveFamily,
};
use crate::Result;

/// Propagation direction along the end's axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Incoming,
    Outgoing,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Incoming => write!(f, "in"),
            Direction::Outgoing => write!(f, "out"),
        }
    }
}

/// Axial support of the smooth cutoff extension; `t_inner = t_outer - 1`.
#[derive(Debug, Clone, Copy)]
pub struct CutoffProfile {
    pub t_inner: f64,
    pub t_outer: f64,
}

impl CutoffProfile {
    pub fn new(t_outer: f64) -> Self {
        CutoffProfile { t_inner: t_outer - 1.0, t_outer }
    }

    /// Quintic smoothstep: 0 below `t_inner`, 1 above `t_outer`, C^2 across.
    pub fn chi(&self, t: f64) -> f64 {
        let x = (t - self.t_inner) / (self.t_outer - self.t_inner);
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
        }
    }

    pub fn chi_prime(&self, t: f64) -> f64 {
        let w = self.t_outer - self.t_inner;
        let x = (t - self.t_inner) / w;
        if !(0.0..=1.0).contains(&x) {
            0.0
        } else {
            30.0 * x * x * (x - 1.0) * (x - 1.0) / w
        }
    }
}

/// A normalised propagating wave on one cylinder end.
#[derive(Debug, Clone)]
pub struct CylinderWave {
    pub end_index: usize,
    pub section: VectorModeSection,
    pub lambda: f64,
    pub k: f64,
    pub direction: Direction,
    /// Flux of the raw input section, before normalisation.
    pub flux_raw: f64,
    pub family: WaveFamily,
    pub cutoff_profile: CutoffProfile,
}

fn family_group(f: WaveFamily) -> u8 {
    match f {
        WaveFamily::Te | WaveFamily::Tm => 0,
        WaveFamily::AlphaScalar | WaveFamily::ConstantSpecial => 1,
        WaveFamily::BetaScalar => 2,
    }
}

fn scalar_weight(section: &VectorModeSection) -> f64 {
    let la = section.lambda().re;
    match section.family() {
        WaveFamily::ConstantSpecial => la / section.k(),
        _ => la,
    }
}

/// Signed axial energy flux of a propagating mode section.
///
/// Maxwell families: `Re int (phi_1 conj(psi_2) - phi_2 conj(psi_1))`.
/// Scalar families: `lambda ||u||^2`; constant family `(lambda/k) ||alpha||^2`.
pub fn axial_flux(section: &VectorModeSection, cs: &CrossSection) -> Result<f64> {
    if section.lambda().im != 0.0 {
        return Err(Error::EvanescentInput(section.lambda()));
    }
    Ok(flux_pairing(section, section, cs).re)
}

/// Sesquilinear flux pairing of two propagating sections at the same k.
///
/// The pairing is block-diagonal over family groups (Maxwell; alpha-type
/// including the constant family; beta-type): within the Maxwell group it is
/// the symmetrised Poynting form, within scalar groups the
/// lambda-weighted L2 product of the potentials. Distinct groups pair to
/// zero, mirroring the block structure of the augmented scattering matrix.
pub fn flux_pairing(
    a: &VectorModeSection,
    b: &VectorModeSection,
    cs: &CrossSection,
) -> Complex64 {
    if family_group(a.family()) != family_group(b.family()) {
        return Complex64::ZERO;
    }
    let quad = cs.interior_quadrature(24);
    match family_group(a.family()) {
        0 => {
            // 1/2 [P(a,b) + conj(P(b,a))] with P the Poynting cross form
            let mut pab = Complex64::ZERO;
            let mut pba = Complex64::ZERO;
            for &(p, w) in &quad {
                let sa = a.eval(p);
                let sb = b.eval(p);
                pab += w
                    * (sa.phi[0].v * sb.psi[1].v.conj() - sa.phi[1].v * sb.psi[0].v.conj());
                pba += w
                    * (sb.phi[0].v * sa.psi[1].v.conj() - sb.phi[1].v * sa.psi[0].v.conj());
            }
            0.5 * (pab + pba.conj())
        }
        group => {
            let weight = 0.5 * (scalar_weight(a) + scalar_weight(b));
            let mut l2 = Complex64::ZERO;
            for &(p, w) in &quad {
                let (va, vb) = if group == 1 {
                    (a.eval(p).alpha.v, b.eval(p).alpha.v)
                } else {
                    (a.eval(p).beta.v, b.eval(p).beta.v)
                };
                l2 += w * va * vb.conj();
            }
            weight * l2
        }
    }
}

/// Scale a raw propagating mode to unit flux, orient it by the flux sign,
/// and fix its phase deterministically (the generating potential made
/// real-positive at the first usable reference point).
pub fn normalize_and_orient(
    raw: &VectorModeSection,
    cs: &CrossSection,
    end_index: usize,
    t_outer: f64,
) -> Result<CylinderWave> {
    let flux = axial_flux(raw, cs)?;
    if flux.abs() < crate::tol::FLUX_DEGENERATE {
        return Err(Error::ThresholdDegeneracy { flux: flux.abs() });
    }
    let mut section = raw.scaled(Complex64::from(1.0 / flux.abs().sqrt()));
    // phase fixing on the generating potential
    if let Some(pot) = section.potential().cloned() {
        let amp = section.amplitude();
        for p in cs.reference_points() {
            let v = amp * pot.sample(p).value;
            if v.norm() > 1e-9 {
                section = section.scaled(v.conj() / v.norm());
                break;
            }
        }
    }
    let direction = if flux > 0.0 { Direction::Outgoing } else { Direction::Incoming };
    Ok(CylinderWave {
        end_index,
        lambda: section.lambda().re,
        k: section.k(),
        direction,
        flux_raw: flux,
        family: section.family(),
        cutoff_profile: CutoffProfile::new(t_outer),
        section,
    })
}

/// Per-frequency inventory of propagating waves and evanescent points over
/// all ends.
#[derive(Debug, Clone)]
pub struct ModeLedger {
    pub k: f64,
    pub n_ends: usize,
    /// Maxwell-family waves (TE/TM), `2 Upsilon` of them.
    pub e_waves: Vec<CylinderWave>,
    /// Augmented-only waves (alpha/beta scalars and the constant pair),
    /// `2 (Upsilon + N)` of them.
    pub gamma_waves: Vec<CylinderWave>,
    /// Evanescent pencil points per end, canonical branch.
    pub evanescent: Vec<(usize, PencilPoint)>,
    pub upsilon: usize,
    pub t_total: usize,
    pub threshold_distance: f64,
    /// Remainder decay rate: half the spectral gap.
    pub delta: f64,
}

/// Options for ledger construction.
#[derive(Debug, Clone, Copy)]
pub struct LedgerOptions {
    /// Evanescent points are listed up to this `mu` cutoff
    /// (`<= 0` picks `4 k^2 + 40`).
    pub evanescent_mu_cutoff: f64,
    /// Outer edge of the cutoff function support.
    pub t_outer: f64,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        LedgerOptions { evanescent_mu_cutoff: 0.0, t_outer: 3.0 }
    }
}

/// Enumerate, normalise and orient all propagating waves of both families
/// across the listed ends at frequency `k`.
pub fn build_ledger(
    ends: &[&CrossSection],
    k: f64,
    options: &LedgerOptions,
) -> Result<ModeLedger> {
    if k == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let k = k.abs();
    let mu_cutoff = if options.evanescent_mu_cutoff > 0.0 {
        options.evanescent_mu_cutoff
    } else {
        4.0 * k * k + 40.0
    };
    let mut e_waves = Vec::new();
    let mut gamma_waves = Vec::new();
    let mut evanescent = Vec::new();
    for (q, cs) in ends.iter().enumerate() {
        for point in pencil::real_maxwell_spectrum(cs, k)? {
            let maxwell = build_mode(&point, k, ChannelKind::Maxwell)?;
            e_waves.push(normalize_and_orient(&maxwell, cs, q, options.t_outer)?);
            let scalar = build_mode(&point, k, ChannelKind::Scalar)?;
            gamma_waves.push(normalize_and_orient(&scalar, cs, q, options.t_outer)?);
        }
        for (_, section) in special_vectors(cs, k)? {
            gamma_waves.push(normalize_and_orient(&section, cs, q, options.t_outer)?);
        }
        for point in pencil::evanescent_points(cs, k, mu_cutoff)? {
            evanescent.push((q, point));
        }
    }
    let sort_key = |w: &CylinderWave| {
        (
            w.end_index,
            family_group(w.family),
            w.family,
            ordered(w.section.potential().map(|p| p.mu()).unwrap_or(0.0)),
            ordered(-w.lambda),
        )
    };
    e_waves.sort_by_key(sort_key);
    gamma_waves.sort_by_key(sort_key);

    let upsilon = e_waves.len() / 2;
    let n_ends = ends.len();
    debug_assert_eq!(gamma_waves.len(), 2 * (upsilon + n_ends));
    Ok(ModeLedger {
        k,
        n_ends,
        upsilon,
        t_total: 2 * upsilon + n_ends,
        threshold_distance: pencil::threshold_distance(ends, k)?,
        delta: pencil::spectral_gap_delta(ends, k)?,
        e_waves,
        gamma_waves,
        evanescent,
    })
}

fn ordered(x: f64) -> ordered_key::OrderedF64 {
    ordered_key::OrderedF64(x)
}

mod ordered_key {
    /// Total order on finite f64 keys for deterministic sorting.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct OrderedF64(pub f64);
    impl Eq for OrderedF64 {}
    impl PartialOrd for OrderedF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for OrderedF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.partial_cmp(&other.0).expect("finite sort keys")
        }
    }
}

/// A wave extended by the smooth cutoff to the whole domain: zero outside
/// its end, `chi(t) exp(i lambda t) Phi(y)` inside.
#[derive(Debug, Clone)]
pub struct GlobalWaveField {
    pub wave: CylinderWave,
}

/// Validate the cutoff support and wrap the wave as a global field.
pub fn extend_to_domain(wave: &CylinderWave) -> Result<GlobalWaveField> {
    let p = wave.cutoff_profile;
    if p.t_inner < 0.0 || p.t_outer <= p.t_inner {
        return Err(Error::SupportViolation { t_inner: p.t_inner, t_outer: p.t_outer });
    }
    Ok(GlobalWaveField { wave: wave.clone() })
}

impl GlobalWaveField {
    /// All eight components at local coordinates `(y, t)` of end `end`.
    pub fn eval(&self, end: usize, y: [f64; 2], t: f64) -> [Complex64; 8] {
        if end != self.wave.end_index {
            return [Complex64::ZERO; 8];
        }
        let chi = self.wave.cutoff_profile.chi(t);
        if chi == 0.0 {
            return [Complex64::ZERO; 8];
        }
        let phase = (Complex64::I * self.wave.section.lambda() * t).exp();
        let mut out = self.wave.section.components(y);
        for c in out.iter_mut() {
            *c *= chi * phase;
        }
        out
    }
}
