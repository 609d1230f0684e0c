//! All generalized eigenvalues of `K x = mu M x` below a cutoff.
//!
//! `K` (stiffness) is symmetric positive semidefinite, `M` (mass) symmetric
//! positive definite. The number of eigenvalues below the cutoff is
//! certified first by the inertia of `K - cutoff M`, then a blocked
//! shift-invert subspace iteration on `(K + c M)^{-1} M` converges exactly
//! that many pairs plus guard vectors.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::{eigenvalue_count_below, BandedCholesky, Csr};
use crate::error::Error;

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    /// Rayleigh-quotient residual target.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { tol: crate::tol::EIG_RESIDUAL, max_iter: 800, seed: 0x00c1_75ec }
    }
}

/// Eigenpairs with `mu <= cutoff`, ascending, vectors M-orthonormal.
pub fn lowest_generalized(
    k: &Csr,
    m: &Csr,
    cutoff: f64,
    opts: &EigOptions,
) -> Result<Vec<(f64, Vec<f64>)>, Error> {
    let n = k.n;
    // perturb the count shift off a possible eigenvalue
    let sigma = cutoff * (1.0 + 1e-9) + 1e-12;
    let count = eigenvalue_count_below(k, m, sigma);
    if count == 0 {
        return Ok(Vec::new());
    }
    let guard = (count / 2).clamp(4, 12);
    let p = (count + guard).min(n);

    // shift keeps K + cM SPD also for the Neumann kernel
    let shift = 1.0;
    let a = k.add_scaled(m, shift);
    let chol = BandedCholesky::factor(&a)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::<f64>::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));

    let mut mu = vec![0.0; p];
    let mut converged = false;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        // Y = A^{-1} M X
        let mut y = DMatrix::<f64>::zeros(n, p);
        for j in 0..p {
            let xj: Vec<f64> = x.column(j).iter().copied().collect();
            let mut w = m.matvec_alloc(&xj);
            chol.solve_in_place(&mut w);
            y.column_mut(j).copy_from_slice(&w);
        }
        // M-orthonormalise Y via the Gram Cholesky
        let my = apply_csr(m, &y);
        let gram = y.transpose() * &my;
        let gram_chol = match nalgebra::Cholesky::new(gram) {
            Some(c) => c,
            None => {
                // near-rank-deficient block: re-randomise the offending part
                for j in 0..p {
                    for i in 0..n {
                        y[(i, j)] += 1e-12 * rng.gen_range(-1.0..1.0);
                    }
                }
                let my = apply_csr(m, &y);
                let gram = y.transpose() * &my;
                nalgebra::Cholesky::new(gram).ok_or(Error::EigensolverConvergence {
                    cutoff,
                    achieved: 0,
                })?
            }
        };
        let linv_t = gram_chol.l().transpose().try_inverse().ok_or(
            Error::EigensolverConvergence { cutoff, achieved: 0 },
        )?;
        let q = y * linv_t;

        // Rayleigh-Ritz on the M-orthonormal basis
        let kq = apply_csr(k, &q);
        let kr = q.transpose() * &kq;
        let kr = 0.5 * (&kr + kr.transpose());
        let se = nalgebra::SymmetricEigen::new(kr);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
        let mut xs = DMatrix::<f64>::zeros(n, p);
        for (slot, &src) in order.iter().enumerate() {
            let v = &q * se.eigenvectors.column(src);
            xs.column_mut(slot).copy_from(&v);
            mu[slot] = se.eigenvalues[src];
        }
        x = xs;

        // convergence of the wanted pairs
        converged = true;
        for j in 0..count {
            let xj: Vec<f64> = x.column(j).iter().copied().collect();
            let kx = k.matvec_alloc(&xj);
            let mx = m.matvec_alloc(&xj);
            let mut num = 0.0;
            let mut nk = 0.0;
            let mut nm = 0.0;
            for i in 0..n {
                let r = kx[i] - mu[j] * mx[i];
                num += r * r;
                nk += kx[i] * kx[i];
                nm += mx[i] * mx[i];
            }
            // the (1 + |mu|) ||Mx|| term keeps the scale meaningful for the
            // Neumann kernel, where Kx vanishes along with mu
            let scale = nk.sqrt() + (1.0 + mu[j].abs()) * nm.sqrt();
            if num.sqrt() > opts.tol * scale.max(1e-300) {
                converged = false;
                break;
            }
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::EigensolverConvergence { cutoff, achieved: 0 });
    }

    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let xj: Vec<f64> = x.column(j).iter().copied().collect();
        out.push((mu[j].max(0.0), xj));
    }
    Ok(out)
}

fn apply_csr(a: &Csr, x: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p) = (x.nrows(), x.ncols());
    let mut y = DMatrix::<f64>::zeros(n, p);
    for j in 0..p {
        let xj: Vec<f64> = x.column(j).iter().copied().collect();
        let yj = a.matvec_alloc(&xj);
        y.column_mut(j).copy_from_slice(&yj);
    }
    y
}
