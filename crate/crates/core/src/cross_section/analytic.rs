//! Closed-form Helmholtz eigenpairs on rectangles and discs.

use std::f64::consts::PI;

use super::{BoundaryCondition, FieldSample};
use crate::numerics::bessel::{bessel_j, bessel_j_prime, bessel_j_second, jn_zeros, jnp_zeros};

/// Separable rectangle mode on `(0,a) x (0,b)`:
/// Dirichlet `sin(m pi x / a) sin(n pi y / b)` (m, n >= 1),
/// Neumann `cos(m pi x / a) cos(n pi y / b)` (m, n >= 0), L2-normalised.
#[derive(Debug, Clone, Copy)]
pub struct RectMode {
    pub a: f64,
    pub b: f64,
    pub m: u32,
    pub n: u32,
    pub bc: BoundaryCondition,
}

impl RectMode {
    pub fn mu(&self) -> f64 {
        let km = self.m as f64 * PI / self.a;
        let kn = self.n as f64 * PI / self.b;
        km * km + kn * kn
    }

    fn axis_factor(len: f64, idx: u32, bc: BoundaryCondition, t: f64) -> (f64, f64, f64) {
        // returns (value, d/dt, d2/dt2) of the normalised 1D factor
        let k = idx as f64 * PI / len;
        match bc {
            BoundaryCondition::Dirichlet => {
                let c = (2.0 / len).sqrt();
                let (s, co) = (k * t).sin_cos();
                (c * s, c * k * co, -c * k * k * s)
            }
            BoundaryCondition::Neumann => {
                let c = if idx == 0 { (1.0 / len).sqrt() } else { (2.0 / len).sqrt() };
                let (s, co) = (k * t).sin_cos();
                (c * co, -c * k * s, -c * k * k * co)
            }
        }
    }

    pub fn sample(&self, p: [f64; 2]) -> FieldSample {
        let (fx, dfx, d2fx) = Self::axis_factor(self.a, self.m, self.bc, p[0]);
        let (fy, dfy, d2fy) = Self::axis_factor(self.b, self.n, self.bc, p[1]);
        FieldSample {
            value: fx * fy,
            grad: [dfx * fy, fx * dfy],
            hessian: [d2fx * fy, dfx * dfy, fx * d2fy],
        }
    }
}

/// Angular parity of a disc mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Cos,
    Sin,
}

/// Disc mode `norm * J_n(alpha r) * {cos, sin}(n theta)` on the disc of the
/// given radius; `alpha = z / radius` with `z` a zero of `J_n` (Dirichlet)
/// or of `J_n'` (Neumann).
#[derive(Debug, Clone, Copy)]
pub struct DiscMode {
    pub radius: f64,
    pub n: u32,
    pub parity: Parity,
    pub alpha: f64,
    pub norm: f64,
    pub bc: BoundaryCondition,
}

impl DiscMode {
    pub fn new(radius: f64, n: u32, parity: Parity, zero: f64, bc: BoundaryCondition) -> Self {
        let alpha = zero / radius;
        // radial L2 weights: int_0^R J_n(alpha r)^2 r dr
        let radial = match bc {
            BoundaryCondition::Dirichlet => {
                0.5 * radius * radius * bessel_j_prime(n, zero).powi(2)
            }
            BoundaryCondition::Neumann => {
                let nf = n as f64;
                0.5 * radius * radius * (1.0 - nf * nf / (zero * zero))
                    * bessel_j(n, zero).powi(2)
            }
        };
        let angular = if n == 0 { 2.0 * PI } else { PI };
        DiscMode { radius, n, parity, alpha, norm: 1.0 / (radial * angular).sqrt(), bc }
    }

    pub fn mu(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn sample(&self, p: [f64; 2]) -> FieldSample {
        let (x, y) = (p[0], p[1]);
        let r = x.hypot(y);
        if r < 1e-10 * self.radius.max(1.0) {
            return self.sample_at_centre();
        }
        let theta = y.atan2(x);
        let nf = self.n as f64;
        let z = self.alpha * r;
        let (jr, djr, d2jr) = (
            bessel_j(self.n, z),
            self.alpha * bessel_j_prime(self.n, z),
            self.alpha * self.alpha * bessel_j_second(self.n, z),
        );
        let (tv, dtv, d2tv) = match self.parity {
            Parity::Cos => {
                let (s, c) = (nf * theta).sin_cos();
                (c, -nf * s, -nf * nf * c)
            }
            Parity::Sin => {
                let (s, c) = (nf * theta).sin_cos();
                (s, nf * c, -nf * nf * s)
            }
        };
        let c = self.norm;
        let (u_r, u_rr) = (c * djr * tv, c * d2jr * tv);
        let u_t = c * jr * dtv;
        let u_tt = c * jr * d2tv;
        let u_rt = c * djr * dtv;

        // polar -> cartesian chain rule
        let (rx, ry) = (x / r, y / r);
        let (tx, ty) = (-y / (r * r), x / (r * r));
        let rxx = y * y / (r * r * r);
        let rxy = -x * y / (r * r * r);
        let ryy = x * x / (r * r * r);
        let r4 = r * r * r * r;
        let txx = 2.0 * x * y / r4;
        let txy = (y * y - x * x) / r4;
        let tyy = -2.0 * x * y / r4;

        let gx = u_r * rx + u_t * tx;
        let gy = u_r * ry + u_t * ty;
        let hxx = u_rr * rx * rx + 2.0 * u_rt * rx * tx + u_tt * tx * tx + u_r * rxx + u_t * txx;
        let hxy = u_rr * rx * ry
            + u_rt * (rx * ty + ry * tx)
            + u_tt * tx * ty
            + u_r * rxy
            + u_t * txy;
        let hyy = u_rr * ry * ry + 2.0 * u_rt * ry * ty + u_tt * ty * ty + u_r * ryy + u_t * tyy;

        FieldSample { value: c * jr * tv, grad: [gx, gy], hessian: [hxx, hxy, hyy] }
    }

    /// Limit values at r = 0 from the leading Taylor term of `J_n`.
    fn sample_at_centre(&self) -> FieldSample {
        let c = self.norm;
        let al = self.alpha;
        match (self.n, self.parity) {
            (0, _) => FieldSample {
                value: c,
                grad: [0.0, 0.0],
                hessian: [-0.5 * c * al * al, 0.0, -0.5 * c * al * al],
            },
            (1, Parity::Cos) => {
                FieldSample { value: 0.0, grad: [0.5 * c * al, 0.0], hessian: [0.0; 3] }
            }
            (1, Parity::Sin) => {
                FieldSample { value: 0.0, grad: [0.0, 0.5 * c * al], hessian: [0.0; 3] }
            }
            (2, Parity::Cos) => FieldSample {
                value: 0.0,
                grad: [0.0, 0.0],
                hessian: [0.25 * c * al * al, 0.0, -0.25 * c * al * al],
            },
            (2, Parity::Sin) => FieldSample {
                value: 0.0,
                grad: [0.0, 0.0],
                hessian: [0.0, 0.25 * c * al * al, 0.0],
            },
            _ => FieldSample { value: 0.0, grad: [0.0, 0.0], hessian: [0.0; 3] },
        }
    }
}

/// All rectangle eigenvalues `mu <= cutoff`, as (mu, m, n), deterministic order.
pub fn rect_spectrum(a: f64, b: f64, bc: BoundaryCondition, cutoff: f64) -> Vec<(f64, u32, u32)> {
    let mut out = Vec::new();
    let start = match bc {
        BoundaryCondition::Dirichlet => 1u32,
        BoundaryCondition::Neumann => 0u32,
    };
    let m_max = (cutoff.sqrt() * a / PI).floor() as u32 + 1;
    let n_max = (cutoff.sqrt() * b / PI).floor() as u32 + 1;
    for m in start..=m_max {
        for n in start..=n_max {
            if bc == BoundaryCondition::Neumann && m == 0 && n == 0 {
                continue; // the exact constant mode is added separately
            }
            let mu = (m as f64 * PI / a).powi(2) + (n as f64 * PI / b).powi(2);
            if mu <= cutoff {
                out.push((mu, m, n));
            }
        }
    }
    out.sort_by(|x, y| (x.0, x.1, x.2).partial_cmp(&(y.0, y.1, y.2)).unwrap());
    out
}

/// All disc eigenvalues `mu <= cutoff`, as (mu, n, parity, zero).
pub fn disc_spectrum(
    radius: f64,
    bc: BoundaryCondition,
    cutoff: f64,
) -> Vec<(f64, u32, Parity, f64)> {
    let zmax = cutoff.sqrt() * radius;
    let per_order = (zmax / PI) as usize + 3;
    let mut out = Vec::new();
    let mut n = 0u32;
    loop {
        let zeros = match bc {
            BoundaryCondition::Dirichlet => jn_zeros(n, per_order),
            BoundaryCondition::Neumann => jnp_zeros(n, per_order),
        };
        let below: Vec<f64> = zeros.into_iter().filter(|&z| z <= zmax).collect();
        if below.is_empty() {
            // first zeros grow with n, so no higher order contributes
            if n > 0 {
                break;
            }
            n += 1;
            continue;
        }
        for z in below {
            let mu = (z / radius) * (z / radius);
            out.push((mu, n, Parity::Cos, z));
            if n > 0 {
                out.push((mu, n, Parity::Sin, z));
            }
        }
        n += 1;
    }
    out.sort_by(|x, y| {
        (x.0, x.1, x.2).partial_cmp(&(y.0, y.1, y.2)).unwrap()
    });
    out
}
