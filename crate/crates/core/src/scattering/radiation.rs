//! Radiation coefficients in a straight guide and the exponential-decay
//! diagnostic.
//!
//! For a compatible source `F` the outgoing content of the radiating
//! solution is extracted channel by channel as
//! `c_j = i (f, W_j^-)_G / 2`, with `W_j^-` the outgoing-based solutions of
//! the homogeneous problem. In a straight guide these are the exact modal
//! fields `exp(i lambda_j t) Phi_j(y)` over both signs of lambda (positive:
//! outgoing toward `+inf`; negative: outgoing toward `-inf`). The factor
//! `1/2` co-normalises the duals against unit-flux waves: the symplectic
//! pairing of a unit-flux mode with itself is `2 flux`.

use num_complex::Complex64;

use super::source::SourceField;
use crate::cross_section::CrossSection;
use crate::error::Error;
use crate::numerics::quadrature::gauss_legendre_on;
use crate::pencil::{build_mode, real_maxwell_spectrum, ChannelKind};
use crate::waves::{normalize_and_orient, CylinderWave};
use crate::Result;

type C = Complex64;

/// The global outgoing Maxwell basis of a straight guide at frequency `k`:
/// unit-flux waves for every real pencil point, `lambda > 0` assigned to
/// end 2 (`+inf`), `lambda < 0` to end 1 (`-inf`). Order: descending
/// lambda, Dirichlet before Neumann, ascending `mu` (the spectrum order).
pub fn radiation_channels(cs: &CrossSection, k: f64) -> Result<Vec<CylinderWave>> {
    let mut out = Vec::new();
    for point in real_maxwell_spectrum(cs, k)? {
        let section = build_mode(&point, k, ChannelKind::Maxwell)?;
        let end = if point.lambda.re > 0.0 { 1 } else { 0 };
        out.push(normalize_and_orient(&section, cs, end, 3.0)?);
    }
    Ok(out)
}

/// Radiation coefficients `c_j` of a compatible source, aligned with
/// [`radiation_channels`].
///
/// The source is rejected when its compatibility residuals exceed the
/// tolerance; the quadrature runs over the cross-section times the source's
/// axial support.
pub fn radiation_coefficients(
    source: &SourceField,
    cs: &CrossSection,
    k: f64,
    order: usize,
) -> Result<Vec<C>> {
    let (r1, r2, r3) = super::source::compatibility_residual(source, cs, k, order);
    let tol = crate::tol::COMPATIBILITY;
    if r1 > tol || r2 > tol || r3 > tol {
        return Err(Error::IncompatibleSource(r1, r2, r3));
    }
    let channels = radiation_channels(cs, k)?;
    let quad2 = cs.interior_quadrature(order.max(16));
    // panel-wise axial rule: smooth on each panel between window edges
    let mut axial: Vec<(f64, f64)> = Vec::new();
    for (a, b) in source.axial_panels() {
        axial.extend(gauss_legendre_on((3 * order).max(32), a, b));
    }
    let mut coeffs = Vec::with_capacity(channels.len());
    for wave in &channels {
        let lambda = wave.section.lambda();
        let mut inner = C::ZERO;
        for &(p, w2) in &quad2 {
            let s = wave.section.eval(p);
            // f-part pairing only: (f1, u1) + (f2, u2)
            let u = [
                s.phi[0].v, s.phi[1].v, s.phi[2].v, C::ZERO, s.psi[0].v, s.psi[1].v,
                s.psi[2].v, C::ZERO,
            ];
            for &(t, wt) in &axial {
                let f = (source.eval)([p[0], p[1], t]);
                let phase = (C::I * lambda * t).exp();
                let mut dot = C::ZERO;
                for c in [0usize, 1, 2, 4, 5, 6] {
                    dot += f[c] * (u[c] * phase).conj();
                }
                inner += w2 * wt * dot;
            }
        }
        coeffs.push(C::I * inner / 2.0);
    }
    Ok(coeffs)
}

/// Least-squares fit of `log max-norm` against the axial station.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Fitted slope of `ln |u|` vs `t` (negative = decay).
    pub rate: f64,
    /// `rate <= -delta + FIT_TOL`.
    pub pass: bool,
}

/// Fit tolerance on the decay slope.
pub const FIT_TOL: f64 = 1e-3;

/// Fit an exponential rate to `(t, max_norm)` stations and compare against
/// the target decay `delta`.
pub fn decay_diagnostic(stations: &[(f64, f64)], delta: f64) -> Result<DecayFit> {
    let usable: Vec<(f64, f64)> = stations
        .iter()
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|&(t, v)| (t, v.ln()))
        .collect();
    if usable.len() < 10 {
        return Err(Error::InsufficientSamples { need: 10, got: usable.len() });
    }
    let n = usable.len() as f64;
    let st: f64 = usable.iter().map(|(t, _)| t).sum();
    let sv: f64 = usable.iter().map(|(_, v)| v).sum();
    let stt: f64 = usable.iter().map(|(t, _)| t * t).sum();
    let stv: f64 = usable.iter().map(|(t, v)| t * v).sum();
    let rate = (n * stv - st * sv) / (n * stt - st * st);
    Ok(DecayFit { rate, pass: rate <= -delta + FIT_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::evanescent_points;
    use crate::scattering::windowed_mode_source;
    use crate::waves::CutoffProfile;

    fn unit_square() -> CrossSection {
        CrossSection::rectangle(1.0, 1.0).unwrap()
    }

    #[test]
    fn windowed_wave_recovers_unit_coefficient() {
        let cs = unit_square();
        let k = 4.0;
        let channels = radiation_channels(&cs, k).unwrap();
        // window one outgoing-to-+inf channel
        let target = channels.iter().position(|w| w.lambda > 0.0).unwrap();
        let src = windowed_mode_source(
            &channels[target].section,
            CutoffProfile::new(1.0),
            false,
            C::ONE,
        )
        .unwrap();
        let c = radiation_coefficients(&src, &cs, k, 16).unwrap();
        for (j, cj) in c.iter().enumerate() {
            let want = if j == target { C::ONE } else { C::ZERO };
            assert!(
                (cj - want).norm() < 1e-7,
                "c[{j}] = {cj}, want {want}"
            );
        }
    }

    #[test]
    fn left_going_wave_needs_descending_window() {
        let cs = unit_square();
        let k = 4.0;
        let channels = radiation_channels(&cs, k).unwrap();
        let target = channels.iter().position(|w| w.lambda < 0.0).unwrap();
        // window descending: 1 near -inf, 0 near +inf; the construction is
        // outgoing at end 1 with unit amplitude
        let src = windowed_mode_source(
            &channels[target].section,
            CutoffProfile::new(1.0),
            true,
            C::from(2.0),
        )
        .unwrap();
        let c = radiation_coefficients(&src, &cs, k, 16).unwrap();
        for (j, cj) in c.iter().enumerate() {
            let want = if j == target { C::from(2.0) } else { C::ZERO };
            assert!((cj - want).norm() < 2e-7, "c[{j}] = {cj}, want {want}");
        }
    }

    #[test]
    fn superposed_sources_recover_amplitudes() {
        let cs = unit_square();
        let k = 4.0;
        let channels = radiation_channels(&cs, k).unwrap();
        let plus: Vec<usize> =
            (0..channels.len()).filter(|&j| channels[j].lambda > 0.0).collect();
        let amp0 = C::new(0.7, 0.0);
        let amp1 = C::new(0.0, -0.3);
        let s0 = windowed_mode_source(
            &channels[plus[0]].section,
            CutoffProfile::new(1.0),
            false,
            C::ONE,
        )
        .unwrap();
        let s1 = windowed_mode_source(
            &channels[plus[1]].section,
            CutoffProfile::new(2.0),
            false,
            C::ONE,
        )
        .unwrap();
        let src = SourceField::superpose(vec![(amp0, s0), (amp1, s1)]);
        let c = radiation_coefficients(&src, &cs, k, 16).unwrap();
        assert!((c[plus[0]] - amp0).norm() < 1e-7);
        assert!((c[plus[1]] - amp1).norm() < 1e-7);
        for (j, cj) in c.iter().enumerate() {
            if j != plus[0] && j != plus[1] {
                assert!(cj.norm() < 1e-7);
            }
        }
    }

    #[test]
    fn incompatible_source_rejected() {
        let cs = unit_square();
        let src = SourceField {
            eval: Box::new(|x| {
                let g = (-10.0 * x[2] * x[2]).exp();
                let mut out = [C::ZERO; 8];
                out[2] = C::from(g); // f1 = (0, 0, g(t)) with h2 = 0: div f1 != 0
                out
            }),
            jac: Box::new(|x| {
                let g = (-10.0 * x[2] * x[2]).exp();
                let mut out = [[C::ZERO; 3]; 8];
                out[2] = [C::ZERO, C::ZERO, C::from(-20.0 * x[2] * g)];
                out
            }),
            support: (-1.0, 1.0),
            breakpoints: vec![],
        };
        assert!(matches!(
            radiation_coefficients(&src, &cs, 4.0, 8),
            Err(Error::IncompatibleSource(..))
        ));
    }

    #[test]
    fn zero_source_gives_zero_coefficients() {
        let cs = unit_square();
        let src = SourceField {
            eval: Box::new(|_| [C::ZERO; 8]),
            jac: Box::new(|_| [[C::ZERO; 3]; 8]),
            support: (0.0, 1.0),
            breakpoints: vec![],
        };
        let c = radiation_coefficients(&src, &cs, 4.0, 8).unwrap();
        assert!(c.iter().all(|cj| cj.norm() == 0.0));
    }

    #[test]
    fn evanescent_window_radiates_nothing_and_decays() {
        let cs = unit_square();
        let k = 4.0;
        let ev = evanescent_points(&cs, k, 60.0).unwrap();
        let sec = build_mode(&ev[0], k, ChannelKind::Maxwell).unwrap();
        let src = windowed_mode_source(&sec, CutoffProfile::new(1.0), false, C::ONE).unwrap();
        let c = radiation_coefficients(&src, &cs, k, 16).unwrap();
        for cj in &c {
            assert!(cj.norm() < 1e-8, "evanescent source must not radiate, c = {cj}");
        }
        // the constructed solution chi(t) E(y, t) decays at the evanescent rate
        let rate_exact = (ev[0].mu - k * k).sqrt();
        let y = [0.3, 0.7];
        let stations: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let t = 1.5 + 0.25 * i as f64;
                let amp = (C::I * sec.lambda() * t).exp().norm();
                let peak = sec
                    .components(y)
                    .iter()
                    .map(|c| c.norm())
                    .fold(0.0, f64::max);
                (t, amp * peak)
            })
            .collect();
        let fit = decay_diagnostic(&stations, rate_exact - 1e-4).unwrap();
        assert!((fit.rate + rate_exact).abs() < 1e-4, "rate {} vs {}", fit.rate, -rate_exact);
        assert!(fit.pass);
    }

    #[test]
    fn constant_samples_fail_decay() {
        let stations: Vec<(f64, f64)> = (0..12).map(|i| (i as f64, 2.5)).collect();
        let fit = decay_diagnostic(&stations, 0.5).unwrap();
        assert!((fit.rate).abs() < 1e-12);
        assert!(!fit.pass);
    }

    #[test]
    fn too_few_stations_rejected() {
        let stations: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(
            decay_diagnostic(&stations, 0.5),
            Err(Error::InsufficientSamples { .. })
        ));
    }
}
