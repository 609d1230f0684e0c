//! Mode matching at a separable step junction.
//!
//! Geometry: a half-strip of width `a_left` (local coordinate `xi`, offset
//! by `offset` inside the wide guide) joins a half-strip of width `a_right`
//! at the plane `t = 0`. The 2D scalar Helmholtz transmission problem is
//! solved by modal expansion with `M` modes per side: continuity of the
//! field and of its axial derivative across the aperture, the homogeneous
//! condition on the step wall, and overlap integrals in closed form for the
//! sine/cosine bases. Phase reference planes sit at the step plane.
//!
//! In the 3D reading the junction is a pair of rectangular guides
//! (width x depth) with fields invariant in the depth direction. The
//! y-invariant Maxwell sector consists of the TE_{m0} family alone (its
//! E_y profile obeys the Dirichlet matching below; a y-invariant TM family
//! does not exist on a bounded rectangle), while the augmented scalar
//! channels obey the Neumann matching, whose index-0 cosine mode is the
//! `lambda = +-k` constant channel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ChannelMeta, ScatteringMatrix};
use crate::cross_section::BoundaryCondition;
use crate::error::Error;
use crate::pencil::WaveFamily;
use crate::Result;

type C = Complex64;

/// Step junction between two parallel-wall guides; `a_right >= a_left`,
/// the narrow aperture `(offset, offset + a_left)` contained in the wide
/// wall. `depth` is the invariant transverse extent (enters fluxes only as
/// a common factor, so the normalised matrices do not depend on it).
#[derive(Debug, Clone, Copy)]
pub struct SeparableStep {
    pub a_left: f64,
    pub a_right: f64,
    pub offset: f64,
    pub depth: f64,
}

impl SeparableStep {
    pub fn new(a_left: f64, a_right: f64, offset: f64, depth: f64) -> Result<Self> {
        if a_left <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "a1", value: a_left });
        }
        if a_right < a_left {
            return Err(Error::Config(format!(
                "step requires a2 >= a1, got a1 = {a_left}, a2 = {a_right}"
            )));
        }
        if offset < 0.0 || offset + a_left > a_right + 1e-12 {
            return Err(Error::Config(format!(
                "aperture [{offset}, {}] not contained in (0, {a_right})",
                offset + a_left
            )));
        }
        if depth <= 0.0 {
            return Err(Error::NonPositiveDimension { name: "depth", value: depth });
        }
        Ok(SeparableStep { a_left, a_right, offset, depth })
    }
}

/// One interval mode `norm * trig(idx pi x / a)`.
#[derive(Debug, Clone, Copy)]
pub struct IntervalMode {
    pub idx: u32,
    pub a: f64,
    pub bc: BoundaryCondition,
    pub mu: f64,
    pub norm: f64,
}

impl IntervalMode {
    fn list(a: f64, bc: BoundaryCondition, count: usize) -> Vec<IntervalMode> {
        let make = |idx: u32| {
            let p = idx as f64 * std::f64::consts::PI / a;
            let norm = if idx == 0 { (1.0 / a).sqrt() } else { (2.0 / a).sqrt() };
            IntervalMode { idx, a, bc, mu: p * p, norm }
        };
        match bc {
            BoundaryCondition::Dirichlet => (1..=count as u32).map(make).collect(),
            BoundaryCondition::Neumann => (0..count as u32).map(make).collect(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let p = self.idx as f64 * std::f64::consts::PI / self.a;
        match self.bc {
            BoundaryCondition::Dirichlet => self.norm * (p * x).sin(),
            BoundaryCondition::Neumann => self.norm * (p * x).cos(),
        }
    }

    fn axial(&self, k: f64) -> Result<C> {
        let gap = k * k - self.mu;
        if gap.abs() < crate::tol::THRESHOLD_PROXIMITY * (k * k).max(1.0) {
            return Err(Error::ThresholdProximity { k, mu: self.mu });
        }
        Ok(if gap > 0.0 { C::from(gap.sqrt()) } else { C::new(0.0, (-gap).sqrt()) })
    }
}

/// `int_a^b trig(p x + cp) trig(q x + cq) dx` in closed form.
fn trig_product_integral(
    sin_p: bool,
    p: f64,
    cp: f64,
    sin_q: bool,
    q: f64,
    cq: f64,
    x0: f64,
    x1: f64,
) -> f64 {
    let int_cos = |alpha: f64, c: f64| -> f64 {
        if alpha.abs() < 1e-13 {
            (x1 - x0) * c.cos()
        } else {
            ((alpha * x1 + c).sin() - (alpha * x0 + c).sin()) / alpha
        }
    };
    let int_sin = |alpha: f64, c: f64| -> f64 {
        if alpha.abs() < 1e-13 {
            (x1 - x0) * c.sin()
        } else {
            ((alpha * x0 + c).cos() - (alpha * x1 + c).cos()) / alpha
        }
    };
    let (dm, dp) = (p - q, p + q);
    let (cm, cc) = (cp - cq, cp + cq);
    match (sin_p, sin_q) {
        // sin sin = [cos(minus) - cos(plus)] / 2
        (true, true) => 0.5 * (int_cos(dm, cm) - int_cos(dp, cc)),
        // cos cos = [cos(minus) + cos(plus)] / 2
        (false, false) => 0.5 * (int_cos(dm, cm) + int_cos(dp, cc)),
        // sin cos = [sin(minus) + sin(plus)] / 2
        (true, false) => 0.5 * (int_sin(dm, cm) + int_sin(dp, cc)),
        // cos sin: swap roles, minus flips
        (false, true) => 0.5 * (-int_sin(-dm, -cm) + int_sin(dp, cc)),
    }
}

/// Overlap matrix `C[n][m] = int_aperture uR_n(x) uL_m(x - offset) dx`.
fn overlap_matrix(
    geom: &SeparableStep,
    right: &[IntervalMode],
    left: &[IntervalMode],
) -> DMatrix<f64> {
    let sin_basis = matches!(left.first().map(|m| m.bc), Some(BoundaryCondition::Dirichlet));
    let (x0, x1) = (geom.offset, geom.offset + geom.a_left);
    DMatrix::from_fn(right.len(), left.len(), |n, m| {
        let rn = right[n];
        let lm = left[m];
        let q = rn.idx as f64 * std::f64::consts::PI / rn.a;
        let p = lm.idx as f64 * std::f64::consts::PI / lm.a;
        // left mode argument p (x - offset)
        rn.norm
            * lm.norm
            * trig_product_integral(sin_basis, q, 0.0, sin_basis, p, -p * geom.offset, x0, x1)
    })
}

struct MatchingSystem {
    left: Vec<IntervalMode>,
    right: Vec<IntervalMode>,
    beta: Vec<C>,
    gamma: Vec<C>,
    prop_left: usize,
    prop_right: usize,
    /// factored 2M x 2M block system over (out_left, out_right)
    solver: crate::numerics::condest::LuCondest,
    condition: f64,
    c_mat: DMatrix<f64>,
    bc: BoundaryCondition,
    k: f64,
    m: usize,
}

/// Assemble the block system for outgoing coefficients given incoming ones.
///
/// Coefficient conventions at the junction plane `t = 0`:
/// left field `sum_m (inc_m e^{i beta t} + out_m e^{-i beta t}) uL_m`,
/// right field `sum_n (inc~_n e^{-i gamma t} + out~_n e^{i gamma t}) uR_n`;
/// evanescent branches decay away from the junction on the `out` side.
fn build_system(
    geom: &SeparableStep,
    k: f64,
    bc: BoundaryCondition,
    m: usize,
    reversed: bool,
) -> Result<MatchingSystem> {
    let left = IntervalMode::list(geom.a_left, bc, m);
    let right = IntervalMode::list(geom.a_right, bc, m);
    let beta: Vec<C> = left.iter().map(|md| md.axial(k)).collect::<Result<_>>()?;
    let gamma: Vec<C> = right.iter().map(|md| md.axial(k)).collect::<Result<_>>()?;
    let prop_left = beta.iter().filter(|b| b.im == 0.0).count();
    let prop_right = gamma.iter().filter(|g| g.im == 0.0).count();
    // count against the untruncated spectrum of the wide side
    let full_prop_right = {
        let start = if bc == BoundaryCondition::Dirichlet { 1 } else { 0 };
        (start..)
            .take_while(|&idx| {
                let p = idx as f64 * std::f64::consts::PI / geom.a_right;
                p * p < k * k
            })
            .count()
    };
    if m < full_prop_right {
        return Err(Error::Config(format!(
            "truncation M = {m} below the {full_prop_right} propagating modes of the wide side"
        )));
    }
    let c_mat = overlap_matrix(geom, &right, &left);

    // incoming-based (time-reversed) problem: prescribed amplitudes are
    // outgoing, unknowns incoming on propagating channels but still the
    // decaying branch on evanescent ones; in the derivative-continuity row
    // the unknown coefficient keeps its sign on propagating channels and
    // flips on evanescent ones
    let d_left: Vec<f64> =
        beta.iter().map(|b| if reversed && b.im != 0.0 { -1.0 } else { 1.0 }).collect();
    let d_right: Vec<f64> =
        gamma.iter().map(|g| if reversed && g.im != 0.0 { -1.0 } else { 1.0 }).collect();

    let n2 = 2 * m;
    let mut a = DMatrix::<C>::zeros(n2, n2);
    match bc {
        BoundaryCondition::Dirichlet => {
            // value continuity projected on the right basis:
            //   -C out + I out~ = C inc - inc~
            // derivative continuity projected on the left basis:
            //   B D out + C^T Gamma D out~ = rhs
            for n in 0..m {
                for mm in 0..m {
                    a[(n, mm)] = C::from(-c_mat[(n, mm)]);
                }
                a[(n, m + n)] = C::ONE;
            }
            for mm in 0..m {
                a[(m + mm, mm)] = beta[mm] * d_left[mm];
                for n in 0..m {
                    a[(m + mm, m + n)] = C::from(c_mat[(n, mm)]) * gamma[n] * d_right[n];
                }
            }
        }
        BoundaryCondition::Neumann => {
            // value continuity projected on the left basis:
            //   -I out + C^T out~ = inc - C^T inc~
            // derivative continuity projected on the right basis:
            //   C B D out + Gamma D out~ = rhs
            for mm in 0..m {
                a[(mm, mm)] = C::from(-1.0);
                for n in 0..m {
                    a[(mm, m + n)] = C::from(c_mat[(n, mm)]);
                }
            }
            for n in 0..m {
                for mm in 0..m {
                    a[(m + n, mm)] = C::from(c_mat[(n, mm)]) * beta[mm] * d_left[mm];
                }
                a[(m + n, m + n)] = gamma[n] * d_right[n];
            }
        }
    }

    let est = crate::numerics::condest::LuCondest::new(a)
        .ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
    let condition = est.condition_1norm();
    if !condition.is_finite() || condition > crate::tol::MATCHING_CONDITION {
        return Err(Error::IllConditioned { cond: condition });
    }
    Ok(MatchingSystem {
        left,
        right,
        beta,
        gamma,
        prop_left,
        prop_right,
        solver: est,
        condition,
        c_mat,
        bc,
        k,
        m,
    })
}

impl MatchingSystem {
    /// Right-hand side for given incoming (or prescribed outgoing, when
    /// reversed) amplitude vectors.
    fn rhs(&self, inc_left: &DVector<C>, inc_right: &DVector<C>) -> DVector<C> {
        let m = self.m;
        let mut rhs = DVector::<C>::zeros(2 * m);
        match self.bc {
            BoundaryCondition::Dirichlet => {
                for n in 0..m {
                    let mut v = -inc_right[n];
                    for mm in 0..m {
                        v += C::from(self.c_mat[(n, mm)]) * inc_left[mm];
                    }
                    rhs[n] = v;
                }
                for mm in 0..m {
                    let mut v = self.beta[mm] * inc_left[mm];
                    for n in 0..m {
                        v += C::from(self.c_mat[(n, mm)]) * self.gamma[n] * inc_right[n];
                    }
                    rhs[m + mm] = v;
                }
            }
            BoundaryCondition::Neumann => {
                for mm in 0..m {
                    let mut v = inc_left[mm];
                    for n in 0..m {
                        v -= C::from(self.c_mat[(n, mm)]) * inc_right[n];
                    }
                    rhs[mm] = v;
                }
                for n in 0..m {
                    let mut v = self.gamma[n] * inc_right[n];
                    for mm in 0..m {
                        v += C::from(self.c_mat[(n, mm)]) * self.beta[mm] * inc_left[mm];
                    }
                    rhs[m + n] = v;
                }
            }
        }
        rhs
    }

    fn solve(&self, inc_left: &DVector<C>, inc_right: &DVector<C>) -> DVector<C> {
        self.solver.solve(&self.rhs(inc_left, inc_right))
    }

    /// Channel metadata for the propagating modes, left end then right end
    /// (the mode lists are ascending in `mu`, so propagating modes come
    /// first).
    fn channels(&self, family_of: impl Fn(u32) -> WaveFamily) -> Vec<ChannelMeta> {
        let mut chan = Vec::new();
        for mode in 0..self.prop_left {
            chan.push(ChannelMeta {
                end: 0,
                family: family_of(self.left[mode].idx),
                mode,
                lambda: self.beta[mode].re,
            });
        }
        for mode in 0..self.prop_right {
            chan.push(ChannelMeta {
                end: 1,
                family: family_of(self.right[mode].idx),
                mode,
                lambda: self.gamma[mode].re,
            });
        }
        chan
    }

    /// Flux-normalised propagating block from per-column solves.
    fn propagating_smatrix(&self, family_of: impl Fn(u32) -> WaveFamily) -> ScatteringMatrix {
        let (pl, pr) = (self.prop_left, self.prop_right);
        let dim = pl + pr;
        let mut entries = DMatrix::<C>::zeros(dim, dim);
        let flux = |i: usize| -> f64 {
            if i < pl {
                self.beta[i].re
            } else {
                self.gamma[i - pl].re
            }
        };
        for j in 0..dim {
            let mut inc_l = DVector::<C>::zeros(self.m);
            let mut inc_r = DVector::<C>::zeros(self.m);
            if j < pl {
                inc_l[j] = C::ONE;
            } else {
                inc_r[j - pl] = C::ONE;
            }
            let sol = self.solve(&inc_l, &inc_r);
            for i in 0..dim {
                let raw = if i < pl { sol[i] } else { sol[self.m + (i - pl)] };
                entries[(i, j)] = raw * C::from((flux(i) / flux(j)).sqrt());
            }
        }
        ScatteringMatrix::new(
            self.k,
            entries,
            self.channels(family_of),
            self.m,
            Some(self.condition),
        )
    }
}

fn scalar_family(bc: BoundaryCondition) -> impl Fn(u32) -> WaveFamily {
    move |idx| match bc {
        BoundaryCondition::Dirichlet => WaveFamily::BetaScalar,
        BoundaryCondition::Neumann => {
            if idx == 0 {
                WaveFamily::ConstantSpecial
            } else {
                WaveFamily::AlphaScalar
            }
        }
    }
}

/// Scalar mode-matching scattering matrix of the step, flux-normalised on
/// the propagating channels. The Neumann basis includes the index-0
/// constant mode (the `lambda = k` channel); Dirichlet starts at index 1.
pub fn step_smatrix(
    geom: &SeparableStep,
    k: f64,
    bc: BoundaryCondition,
    m: usize,
) -> Result<ScatteringMatrix> {
    let sys = build_system(geom, k, bc, m, false)?;
    Ok(sys.propagating_smatrix(scalar_family(bc)))
}

/// The incoming-based matrix `t`: same matching equations with the roles of
/// incoming and outgoing waves exchanged (evanescent branches still decay).
/// Contract: `t * s = I` within the truncation tolerance.
pub fn step_incoming_basis_smatrix(
    geom: &SeparableStep,
    k: f64,
    bc: BoundaryCondition,
    m: usize,
) -> Result<ScatteringMatrix> {
    let sys = build_system(geom, k, bc, m, true)?;
    Ok(sys.propagating_smatrix(scalar_family(bc)))
}

/// Maxwell block of the step in the depth-invariant sector.
///
/// The TE block is the TE_{m0} family: its transverse electric profile
/// matches with the Dirichlet system (equivalently the axial magnetic
/// potential, a Neumann cross-section potential, through the aperture-mean
/// condition); the reduced Maxwell flux is `lambda/k` times the common
/// depth factor, so the flux-normalised entries coincide with the scalar
/// Dirichlet ones. The depth-invariant TM block is empty: a bounded
/// rectangle has no depth-invariant Dirichlet modes.
pub fn maxwell_step_smatrix(geom: &SeparableStep, k: f64, m: usize) -> Result<ScatteringMatrix> {
    let sys = build_system(geom, k, BoundaryCondition::Dirichlet, m, false)?;
    Ok(sys.propagating_smatrix(|_| WaveFamily::Te))
}

/// Maxwell incoming-based block, same reduction as [`maxwell_step_smatrix`].
pub fn maxwell_step_incoming_basis_smatrix(
    geom: &SeparableStep,
    k: f64,
    m: usize,
) -> Result<ScatteringMatrix> {
    let sys = build_system(geom, k, BoundaryCondition::Dirichlet, m, true)?;
    Ok(sys.propagating_smatrix(|_| WaveFamily::Te))
}

/// Decay parameter of the step junction: half the spectral gap over both
/// ends, `delta = min_q sqrt(mu_first_evanescent^q - k^2) / 2`.
pub fn step_spectral_gap_delta(geom: &SeparableStep, k: f64, bc: BoundaryCondition) -> f64 {
    let mut delta = f64::INFINITY;
    for a in [geom.a_left, geom.a_right] {
        let start = if bc == BoundaryCondition::Dirichlet { 1u32 } else { 0 };
        let first_ev = (start..)
            .map(|m| (m as f64 * std::f64::consts::PI / a).powi(2))
            .find(|&mu| mu > k * k)
            .expect("interval spectrum is unbounded");
        delta = delta.min(0.5 * (first_ev - k * k).sqrt());
    }
    delta
}

/// The right-guide field of one left-incidence solve, for decay
/// diagnostics: total modal sum, propagating part, and their difference.
pub struct StepRightField {
    modes: Vec<IntervalMode>,
    gamma: Vec<C>,
    coefs: DVector<C>,
    prop_right: usize,
}

/// Solve the step with unit incidence from left propagating mode `j` and
/// return the transmitted-side field data.
pub fn step_right_field(
    geom: &SeparableStep,
    k: f64,
    bc: BoundaryCondition,
    m: usize,
    j: usize,
) -> Result<StepRightField> {
    let sys = build_system(geom, k, bc, m, false)?;
    assert!(j < sys.prop_left, "incident index must be propagating");
    let mut inc_l = DVector::<C>::zeros(m);
    inc_l[j] = C::ONE;
    let inc_r = DVector::<C>::zeros(m);
    let sol = sys.solve(&inc_l, &inc_r);
    Ok(StepRightField {
        modes: sys.right.clone(),
        gamma: sys.gamma.clone(),
        coefs: DVector::from_iterator(m, (0..m).map(|n| sol[m + n])),
        prop_right: sys.prop_right,
    })
}

impl StepRightField {
    pub fn total(&self, x: f64, t: f64) -> C {
        self.part(x, t, 0, self.modes.len())
    }

    pub fn propagating(&self, x: f64, t: f64) -> C {
        self.part(x, t, 0, self.prop_right)
    }

    pub fn remainder(&self, x: f64, t: f64) -> C {
        self.part(x, t, self.prop_right, self.modes.len())
    }

    fn part(&self, x: f64, t: f64, from: usize, to: usize) -> C {
        let mut v = C::ZERO;
        for n in from..to {
            v += self.coefs[n] * (C::I * self.gamma[n] * t).exp() * self.modes[n].value(x);
        }
        v
    }

    /// Max |remainder| over an x grid at axial station t.
    pub fn remainder_maxnorm(&self, t: f64, nx: usize) -> f64 {
        let a = self.modes[0].a;
        (0..nx)
            .map(|i| {
                let x = a * (i as f64 + 0.5) / nx as f64;
                self.remainder(x, t).norm()
            })
            .fold(0.0, f64::max)
    }
}
