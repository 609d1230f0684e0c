//! Vector mode sections `Phi = (phi, alpha, psi, beta)` and the action of
//! the augmented pencil on them.
//!
//! Sections are built from scalar potentials: the axial components
//! `phi_3` (Dirichlet), `psi_3` (Neumann), and the scalar fields `alpha`
//! (Neumann), `beta` (Dirichlet). Transverse components follow from the
//! reconstruction formulas, dividing by `k^2 - lambda^2`; the special
//! `lambda = +-k` vectors carry constants only and skip reconstruction.

use std::sync::Arc;

use num_complex::Complex64;

use crate::cross_section::{BoundaryPoint, CrossSection, ScalarEigenpair};
use crate::error::Error;
use crate::Result;

/// Mode families. `Te`/`Tm` live in the Maxwell pencil domain
/// (`alpha = beta = 0`), the scalar and constant families only in the
/// augmented pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WaveFamily {
    Tm,
    Te,
    AlphaScalar,
    BetaScalar,
    ConstantSpecial,
}

impl std::fmt::Display for WaveFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WaveFamily::Tm => "TM",
            WaveFamily::Te => "TE",
            WaveFamily::AlphaScalar => "alpha",
            WaveFamily::BetaScalar => "beta",
            WaveFamily::ConstantSpecial => "const",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComponentSample {
    pub v: Complex64,
    pub dx: Complex64,
    pub dy: Complex64,
}

/// All eight components with first derivatives at one point.
#[derive(Debug, Clone, Copy, Default)]
pub struct SectionSample {
    pub phi: [ComponentSample; 3],
    pub alpha: ComponentSample,
    pub psi: [ComponentSample; 3],
    pub beta: ComponentSample,
}

#[derive(Clone, Default)]
struct Slots {
    phi3: Option<(Arc<ScalarEigenpair>, Complex64)>,
    psi3: Option<(Arc<ScalarEigenpair>, Complex64)>,
    alpha: Option<(Arc<ScalarEigenpair>, Complex64)>,
    beta: Option<(Arc<ScalarEigenpair>, Complex64)>,
}

/// A full 8-component cylinder mode section.
#[derive(Clone)]
pub struct VectorModeSection {
    k: f64,
    lambda: Complex64,
    family: WaveFamily,
    amplitude: Complex64,
    /// `1 / (k^2 - lambda^2)` when transverse components are reconstructed;
    /// `None` for the constant special vectors (and the zero section).
    inv_mu: Option<Complex64>,
    slots: Slots,
}

impl std::fmt::Debug for VectorModeSection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorModeSection")
            .field("k", &self.k)
            .field("lambda", &self.lambda)
            .field("family", &self.family)
            .field("amplitude", &self.amplitude)
            .finish()
    }
}

impl VectorModeSection {
    pub fn zero(k: f64) -> Self {
        VectorModeSection {
            k,
            lambda: Complex64::ZERO,
            family: WaveFamily::Te,
            amplitude: Complex64::ZERO,
            inv_mu: None,
            slots: Slots::default(),
        }
    }

    pub(crate) fn from_potential(
        potential: Arc<ScalarEigenpair>,
        family: WaveFamily,
        lambda: Complex64,
        k: f64,
    ) -> Result<Self> {
        let mu = Complex64::from(k * k) - lambda * lambda;
        if mu.norm() <= crate::tol::THRESHOLD_PROXIMITY * (k * k).max(1.0) {
            return Err(Error::DegenerateMu { mu: mu.norm() });
        }
        let one = Complex64::ONE;
        let mut slots = Slots::default();
        match family {
            WaveFamily::Tm => slots.phi3 = Some((potential, one)),
            WaveFamily::Te => slots.psi3 = Some((potential, one)),
            WaveFamily::AlphaScalar => slots.alpha = Some((potential, one)),
            WaveFamily::BetaScalar => slots.beta = Some((potential, one)),
            WaveFamily::ConstantSpecial => {
                return Err(Error::DegenerateMu { mu: 0.0 });
            }
        }
        Ok(VectorModeSection {
            k,
            lambda,
            family,
            amplitude: one,
            inv_mu: Some(mu.inv()),
            slots,
        })
    }

    /// The `lambda = +-k` eigenvector of the augmented pencil:
    /// `alpha = 1/sqrt(|Omega|)` constant, `psi_3 = (lambda/k) alpha`.
    pub(crate) fn constant_special(
        const_pair: Arc<ScalarEigenpair>,
        lambda_sign: f64,
        k: f64,
    ) -> Self {
        let lambda = Complex64::from(lambda_sign * k.abs());
        let ratio = if k != 0.0 { lambda / k } else { Complex64::ZERO };
        VectorModeSection {
            k,
            lambda,
            family: WaveFamily::ConstantSpecial,
            amplitude: Complex64::ONE,
            inv_mu: None,
            slots: Slots {
                alpha: Some((const_pair.clone(), Complex64::ONE)),
                psi3: if ratio != Complex64::ZERO {
                    Some((const_pair, ratio))
                } else {
                    None
                },
                ..Slots::default()
            },
        }
    }

    /// The two k = 0 eigenvectors: alpha-constant, and psi3-constant (the
    /// latter is a Maxwell eigenvector).
    pub(crate) fn k_zero_pair(const_pair: Arc<ScalarEigenpair>) -> (Self, Self) {
        let alpha_vec = VectorModeSection {
            k: 0.0,
            lambda: Complex64::ZERO,
            family: WaveFamily::ConstantSpecial,
            amplitude: Complex64::ONE,
            inv_mu: None,
            slots: Slots { alpha: Some((const_pair.clone(), Complex64::ONE)), ..Slots::default() },
        };
        let psi_vec = VectorModeSection {
            k: 0.0,
            lambda: Complex64::ZERO,
            family: WaveFamily::Te,
            amplitude: Complex64::ONE,
            inv_mu: None,
            slots: Slots { psi3: Some((const_pair, Complex64::ONE)), ..Slots::default() },
        };
        (alpha_vec, psi_vec)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn family(&self) -> WaveFamily {
        self.family
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    /// The generating scalar potential, if any.
    pub fn potential(&self) -> Option<&Arc<ScalarEigenpair>> {
        self.slots
            .phi3
            .as_ref()
            .or(self.slots.psi3.as_ref())
            .or(self.slots.alpha.as_ref())
            .or(self.slots.beta.as_ref())
            .map(|(p, _)| p)
    }

    /// Maxwell-pencil domain predicate: the scalar components vanish
    /// identically.
    pub fn in_maxwell_domain(&self) -> bool {
        self.slots.alpha.is_none() && self.slots.beta.is_none()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.amplitude *= c;
        out
    }

    /// Mirror `lambda -> -lambda`. The reconstruction formulas are linear in
    /// lambda, so the same potentials with the flipped lambda give the
    /// mirrored eigenvector.
    pub fn with_lambda_sign_flipped(&self) -> Self {
        let mut out = self.clone();
        out.lambda = -self.lambda;
        out
    }

    /// All eight components with first derivatives at `p`.
    pub fn eval(&self, p: [f64; 2]) -> SectionSample {
        #[derive(Default, Clone, Copy)]
        struct Pot {
            v: Complex64,
            gx: Complex64,
            gy: Complex64,
            hxx: Complex64,
            hxy: Complex64,
            hyy: Complex64,
        }
        let load = |slot: &Option<(Arc<ScalarEigenpair>, Complex64)>| -> Pot {
            match slot {
                None => Pot::default(),
                Some((pair, c)) => {
                    let s = pair.sample(p);
                    Pot {
                        v: c * s.value,
                        gx: c * s.grad[0],
                        gy: c * s.grad[1],
                        hxx: c * s.hessian[0],
                        hxy: c * s.hessian[1],
                        hyy: c * s.hessian[2],
                    }
                }
            }
        };
        let f3 = load(&self.slots.phi3);
        let p3 = load(&self.slots.psi3);
        let al = load(&self.slots.alpha);
        let be = load(&self.slots.beta);

        let i = Complex64::I;
        let la = self.lambda;
        let k = Complex64::from(self.k);
        let a = self.amplitude;

        let mut out = SectionSample::default();
        out.phi[2] = ComponentSample { v: a * f3.v, dx: a * f3.gx, dy: a * f3.gy };
        out.psi[2] = ComponentSample { v: a * p3.v, dx: a * p3.gx, dy: a * p3.gy };
        out.alpha = ComponentSample { v: a * al.v, dx: a * al.gx, dy: a * al.gy };
        out.beta = ComponentSample { v: a * be.v, dx: a * be.gx, dy: a * be.gy };

        if let Some(im) = self.inv_mu {
            let c = a * im;
            out.phi[0] = ComponentSample {
                v: c * (i * la * f3.gx + i * k * p3.gy - i * la * al.gy + i * k * be.gx),
                dx: c * (i * la * f3.hxx + i * k * p3.hxy - i * la * al.hxy + i * k * be.hxx),
                dy: c * (i * la * f3.hxy + i * k * p3.hyy - i * la * al.hyy + i * k * be.hxy),
            };
            out.phi[1] = ComponentSample {
                v: c * (i * la * f3.gy - i * k * p3.gx + i * la * al.gx + i * k * be.gy),
                dx: c * (i * la * f3.hxy - i * k * p3.hxx + i * la * al.hxx + i * k * be.hxy),
                dy: c * (i * la * f3.hyy - i * k * p3.hxy + i * la * al.hxy + i * k * be.hyy),
            };
            out.psi[0] = ComponentSample {
                v: c * (-i * k * f3.gy + i * la * p3.gx - i * k * al.gx - i * la * be.gy),
                dx: c * (-i * k * f3.hxy + i * la * p3.hxx - i * k * al.hxx - i * la * be.hxy),
                dy: c * (-i * k * f3.hyy + i * la * p3.hxy - i * k * al.hxy - i * la * be.hyy),
            };
            out.psi[1] = ComponentSample {
                v: c * (i * k * f3.gx + i * la * p3.gy - i * k * al.gy + i * la * be.gx),
                dx: c * (i * k * f3.hxx + i * la * p3.hxy - i * k * al.hxy + i * la * be.hxx),
                dy: c * (i * k * f3.hxy + i * la * p3.hyy - i * k * al.hyy + i * la * be.hxy),
            };
        }
        out
    }

    /// Components only (no derivatives), as `(phi, alpha, psi, beta)`.
    pub fn components(&self, p: [f64; 2]) -> [Complex64; 8] {
        let s = self.eval(p);
        [
            s.phi[0].v, s.phi[1].v, s.phi[2].v, s.alpha.v, s.psi[0].v, s.psi[1].v, s.psi[2].v,
            s.beta.v,
        ]
    }
}

/// The augmented pencil applied to a section at one point: the eight
/// residual components, ordered `(row1[3], row2, row3[3], row4)`.
pub fn apply_pencil_at(
    section: &VectorModeSection,
    lambda: Complex64,
    k: f64,
    p: [f64; 2],
) -> [Complex64; 8] {
    let s = section.eval(p);
    let i = Complex64::I;
    let kk = Complex64::from(k);
    let ila = i * lambda;

    // grad(lambda) of a scalar component
    let grad_l = |c: &ComponentSample| [c.dx, c.dy, ila * c.v];
    // div(lambda) of a 3-component field
    let div_l = |f: &[ComponentSample; 3]| f[0].dx + f[1].dy + ila * f[2].v;
    // rot(lambda) of a 3-component field
    let rot_l = |f: &[ComponentSample; 3]| {
        [
            f[2].dy - ila * f[1].v,
            ila * f[0].v - f[2].dx,
            f[1].dx - f[0].dy,
        ]
    };

    let rot_psi = rot_l(&s.psi);
    let grad_beta = grad_l(&s.beta);
    let rot_phi = rot_l(&s.phi);
    let grad_alpha = grad_l(&s.alpha);
    let div_psi = div_l(&s.psi);
    let div_phi = div_l(&s.phi);

    [
        i * rot_psi[0] + i * grad_beta[0] - kk * s.phi[0].v,
        i * rot_psi[1] + i * grad_beta[1] - kk * s.phi[1].v,
        i * rot_psi[2] + i * grad_beta[2] - kk * s.phi[2].v,
        -i * div_psi - kk * s.alpha.v,
        -i * rot_phi[0] - i * grad_alpha[0] - kk * s.psi[0].v,
        -i * rot_phi[1] - i * grad_alpha[1] - kk * s.psi[1].v,
        -i * rot_phi[2] - i * grad_alpha[2] - kk * s.psi[2].v,
        i * div_phi - kk * s.beta.v,
    ]
}

/// Max norm of the pencil residual over the interior quadrature grid.
pub fn apply_pencil(
    section: &VectorModeSection,
    lambda: Complex64,
    k: f64,
    cs: &CrossSection,
) -> f64 {
    let grid = cs.interior_quadrature(12);
    let mut max = 0.0f64;
    for (p, _) in grid {
        for r in apply_pencil_at(section, lambda, k, p) {
            max = max.max(r.norm());
        }
    }
    max
}

/// Max defect of the boundary conditions `phi_tau = 0`, `psi_nu = 0`,
/// `beta = 0` over the given boundary samples.
pub fn boundary_residual(section: &VectorModeSection, samples: &[BoundaryPoint]) -> f64 {
    let mut max = 0.0f64;
    for bp in samples {
        let s = section.eval(bp.point);
        let nu = bp.normal;
        let tangential_in_plane = -nu[1] * s.phi[0].v + nu[0] * s.phi[1].v;
        let phi_tau = (tangential_in_plane.norm_sqr() + s.phi[2].v.norm_sqr()).sqrt();
        let psi_nu = (nu[0] * s.psi[0].v + nu[1] * s.psi[1].v).norm();
        let beta = s.beta.v.norm();
        max = max.max(phi_tau).max(psi_nu).max(beta);
    }
    max
}
