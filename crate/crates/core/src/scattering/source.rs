//! Source fields on a straight guide and the compatibility conditions.
//!
//! A source is the 8-component right-hand side `(f1, h1, f2, h2)` with
//! compact axial support. Solvability requires
//!
//! ```text
//! div f1 - i k h2 = 0,    div f2 + i k h1 = 0    in G,
//! <f2, nu> = 0                                   on the boundary,
//! ```
//!
//! checked here by quadrature on value/jacobian callbacks.

use num_complex::Complex64;

use crate::cross_section::CrossSection;
use crate::error::Error;
use crate::numerics::quadrature::gauss_legendre_on;
use crate::pencil::VectorModeSection;
use crate::waves::CutoffProfile;
use crate::Result;

type C = Complex64;

/// An 8-component source `(f1, h1, f2, h2)` with compact axial support;
/// components are indexed `0..3 = f1`, `3 = h1`, `4..7 = f2`, `7 = h2`.
pub struct SourceField {
    pub eval: Box<dyn Fn([f64; 3]) -> [C; 8] + Send + Sync>,
    /// 3D gradient of each component.
    pub jac: Box<dyn Fn([f64; 3]) -> [[C; 3]; 8] + Send + Sync>,
    pub support: (f64, f64),
    /// Axial points where the source is only finitely smooth (window
    /// edges); quadrature panels split here.
    pub breakpoints: Vec<f64>,
}

impl SourceField {
    /// Linear combination of sources (shared support hull, merged
    /// breakpoints).
    pub fn superpose(parts: Vec<(C, SourceField)>) -> SourceField {
        let support = parts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (_, s)| {
            (acc.0.min(s.support.0), acc.1.max(s.support.1))
        });
        let mut breakpoints: Vec<f64> = parts
            .iter()
            .flat_map(|(_, s)| s.breakpoints.iter().copied())
            .collect();
        breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let parts = std::sync::Arc::new(parts);
        let p1 = parts.clone();
        let p2 = parts;
        SourceField {
            eval: Box::new(move |x| {
                let mut out = [C::ZERO; 8];
                for (c, s) in p1.iter() {
                    let v = (s.eval)(x);
                    for i in 0..8 {
                        out[i] += c * v[i];
                    }
                }
                out
            }),
            jac: Box::new(move |x| {
                let mut out = [[C::ZERO; 3]; 8];
                for (c, s) in p2.iter() {
                    let v = (s.jac)(x);
                    for i in 0..8 {
                        for d in 0..3 {
                            out[i][d] += c * v[i][d];
                        }
                    }
                }
                out
            }),
            support,
            breakpoints,
        }
    }

    /// Axial quadrature panels: support split at the breakpoints.
    pub fn axial_panels(&self) -> Vec<(f64, f64)> {
        let mut edges = vec![self.support.0];
        for &b in &self.breakpoints {
            if b > self.support.0 + 1e-12 && b < self.support.1 - 1e-12 {
                edges.push(b);
            }
        }
        edges.push(self.support.1);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

/// Max-norm residuals of the three compatibility conditions over a
/// quadrature grid: `(div f1 - ik h2, div f2 + ik h1, <f2,nu> on boundary)`.
pub fn compatibility_residual(
    source: &SourceField,
    cs: &CrossSection,
    k: f64,
    order: usize,
) -> (f64, f64, f64) {
    let ik = C::I * k;
    let axial = gauss_legendre_on(
        (4 * order).max(24),
        source.support.0,
        source.support.1,
    );
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    for (p, _) in cs.interior_quadrature(order) {
        for &(t, _) in &axial {
            let x = [p[0], p[1], t];
            let v = (source.eval)(x);
            let j = (source.jac)(x);
            let div_f1 = j[0][0] + j[1][1] + j[2][2];
            let div_f2 = j[4][0] + j[5][1] + j[6][2];
            r1 = r1.max((div_f1 - ik * v[7]).norm());
            r2 = r2.max((div_f2 + ik * v[3]).norm());
        }
    }
    let mut r3 = 0.0f64;
    for bp in cs.boundary_quadrature(order) {
        for &(t, _) in &axial {
            let v = (source.eval)([bp.point[0], bp.point[1], t]);
            let f2_nu = v[4] * bp.normal[0] + v[5] * bp.normal[1];
            r3 = r3.max(f2_nu.norm());
        }
    }
    (r1, r2, r3)
}

/// The source `M(D,k)(chi(t) P)` of a windowed Maxwell mode
/// `P = exp(i lambda t) Phi(y)`.
///
/// Since `P` solves the homogeneous system, only the commutator with the
/// window survives: the source is supported on the window's rise and is
/// compatible by construction. `descending` flips the window
/// (`1 -> 0` instead of `0 -> 1`).
pub fn windowed_mode_source(
    section: &VectorModeSection,
    window: CutoffProfile,
    descending: bool,
    amplitude: C,
) -> Result<SourceField> {
    if !section.in_maxwell_domain() {
        return Err(Error::Config(
            "windowed sources require a Maxwell mode (alpha = beta = 0)".into(),
        ));
    }
    let sec = section.clone();
    let sec2 = section.clone();
    let lambda = section.lambda();
    let sign = if descending { -1.0 } else { 1.0 };
    let chi_p = move |t: f64| sign * window.chi_prime(t);
    let chi_pp = move |t: f64| {
        // derivative of the quintic smoothstep's first derivative
        let w = window.t_outer - window.t_inner;
        let x = (t - window.t_inner) / w;
        if !(0.0..=1.0).contains(&x) {
            0.0
        } else {
            sign * (120.0 * x * x * x - 180.0 * x * x + 60.0 * x) / (w * w)
        }
    };
    let support = (window.t_inner, window.t_outer);
    let i = C::I;

    // f1 = i chi' (z x psi) e^{i la t},  h1 = -i chi' psi3 e^{i la t}
    // f2 = -i chi' (z x phi) e^{i la t}, h2 = i chi' phi3 e^{i la t}
    let assemble = move |x: [f64; 3], s: &VectorModeSection| -> ([C; 8], [C; 8]) {
        let smp = s.eval([x[0], x[1]]);
        let e = (i * lambda * x[2]).exp();
        let base = [
            -i * smp.psi[1].v,
            i * smp.psi[0].v,
            C::ZERO,
            -i * smp.psi[2].v,
            i * smp.phi[1].v,
            -i * smp.phi[0].v,
            C::ZERO,
            i * smp.phi[2].v,
        ];
        let base_dx = [
            -i * smp.psi[1].dx,
            i * smp.psi[0].dx,
            C::ZERO,
            -i * smp.psi[2].dx,
            i * smp.phi[1].dx,
            -i * smp.phi[0].dx,
            C::ZERO,
            i * smp.phi[2].dx,
        ];
        (base.map(|b| b * e), base_dx.map(|b| b * e))
    };
    let assemble_dy = move |x: [f64; 3], s: &VectorModeSection| -> [C; 8] {
        let smp = s.eval([x[0], x[1]]);
        let e = (i * lambda * x[2]).exp();
        [
            -i * smp.psi[1].dy,
            i * smp.psi[0].dy,
            C::ZERO,
            -i * smp.psi[2].dy,
            i * smp.phi[1].dy,
            -i * smp.phi[0].dy,
            C::ZERO,
            i * smp.phi[2].dy,
        ]
        .map(|b| b * e)
    };

    Ok(SourceField {
        breakpoints: vec![window.t_inner, window.t_outer],
        eval: Box::new(move |x| {
            let cp = chi_p(x[2]);
            if cp == 0.0 {
                return [C::ZERO; 8];
            }
            let (base, _) = assemble(x, &sec);
            base.map(|b| amplitude * cp * b)
        }),
        jac: Box::new(move |x| {
            let cp = chi_p(x[2]);
            let cpp = chi_pp(x[2]);
            if cp == 0.0 && cpp == 0.0 {
                return [[C::ZERO; 3]; 8];
            }
            let (base, base_dx) = assemble(x, &sec2);
            let base_dy = assemble_dy(x, &sec2);
            let mut out = [[C::ZERO; 3]; 8];
            for c in 0..8 {
                out[c][0] = amplitude * cp * base_dx[c];
                out[c][1] = amplitude * cp * base_dy[c];
                // d/dt of chi'(t) e^{i la t} X(y)
                out[c][2] = amplitude * (cpp + cp * i * lambda) * base[c];
            }
            out
        }),
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cross_section::CrossSection;
    use crate::pencil::{build_mode, real_maxwell_spectrum, ChannelKind};
    use crate::waves::{normalize_and_orient, CutoffProfile};

    fn unit_square() -> CrossSection {
        CrossSection::rectangle(1.0, 1.0).unwrap()
    }

    #[test]
    fn windowed_mode_source_is_compatible() {
        let cs = unit_square();
        let k = 4.0;
        let pts = real_maxwell_spectrum(&cs, k).unwrap();
        let sec = build_mode(&pts[0], k, ChannelKind::Maxwell).unwrap();
        let wave = normalize_and_orient(&sec, &cs, 0, 3.0).unwrap();
        let src =
            windowed_mode_source(&wave.section, CutoffProfile::new(1.0), false, C::ONE).unwrap();
        let (r1, r2, r3) = compatibility_residual(&src, &cs, k, 12);
        assert!(r1 < 1e-10, "r1 = {r1}");
        assert!(r2 < 1e-10, "r2 = {r2}");
        assert!(r3 < 1e-10, "r3 = {r3}");
    }

    #[test]
    fn scalar_mode_rejected_as_window_source() {
        let cs = unit_square();
        let pts = real_maxwell_spectrum(&cs, 4.0).unwrap();
        let sec = build_mode(&pts[0], 4.0, ChannelKind::Scalar).unwrap();
        assert!(windowed_mode_source(&sec, CutoffProfile::new(1.0), false, C::ONE).is_err());
    }

    #[test]
    fn gradient_source_violates_compatibility() {
        // F = (grad g, 0, 0, 0) with a separable bump g: r1 = |Delta g| != 0
        let cs = unit_square();
        let bump = |x: [f64; 3]| -> f64 {
            let b = |u: f64, c: f64| (-20.0 * (u - c) * (u - c)).exp();
            b(x[0], 0.5) * b(x[1], 0.4) * b(x[2], 0.0)
        };
        let grad_bump = move |x: [f64; 3]| -> [f64; 3] {
            let g = bump(x);
            [
                -40.0 * (x[0] - 0.5) * g,
                -40.0 * (x[1] - 0.4) * g,
                -40.0 * x[2] * g,
            ]
        };
        let hess_diag = move |x: [f64; 3]| -> [f64; 3] {
            let g = bump(x);
            [
                (-40.0 + 1600.0 * (x[0] - 0.5) * (x[0] - 0.5)) * g,
                (-40.0 + 1600.0 * (x[1] - 0.4) * (x[1] - 0.4)) * g,
                (-40.0 + 1600.0 * x[2] * x[2]) * g,
            ]
        };
        let hess_offdiag = move |x: [f64; 3]| -> [f64; 3] {
            // (xy, xz, yz) mixed second derivatives
            let g = bump(x);
            [
                1600.0 * (x[0] - 0.5) * (x[1] - 0.4) * g,
                1600.0 * (x[0] - 0.5) * x[2] * g,
                1600.0 * (x[1] - 0.4) * x[2] * g,
            ]
        };
        let src = SourceField {
            eval: Box::new(move |x| {
                let g = grad_bump(x);
                let mut out = [C::ZERO; 8];
                out[0] = C::from(g[0]);
                out[1] = C::from(g[1]);
                out[2] = C::from(g[2]);
                out
            }),
            jac: Box::new(move |x| {
                let d = hess_diag(x);
                let o = hess_offdiag(x);
                let mut out = [[C::ZERO; 3]; 8];
                out[0] = [C::from(d[0]), C::from(o[0]), C::from(o[1])];
                out[1] = [C::from(o[0]), C::from(d[1]), C::from(o[2])];
                out[2] = [C::from(o[1]), C::from(o[2]), C::from(d[2])];
                out
            }),
            support: (-1.0, 1.0),
            breakpoints: vec![],
        };
        let (r1, r2, r3) = compatibility_residual(&src, &cs, 4.0, 12);
        assert!(r1 > 1.0, "Laplacian of the bump is large, got {r1}");
        assert!(r2 < 1e-12 && r3 < 1e-12);
    }

    #[test]
    fn zero_source_is_compatible() {
        let cs = unit_square();
        let src = SourceField {
            eval: Box::new(|_| [C::ZERO; 8]),
            jac: Box::new(|_| [[C::ZERO; 3]; 8]),
            support: (0.0, 1.0),
            breakpoints: vec![],
        };
        let (r1, r2, r3) = compatibility_residual(&src, &cs, 4.0, 8);
        assert_eq!((r1, r2, r3), (0.0, 0.0, 0.0));
    }
}
