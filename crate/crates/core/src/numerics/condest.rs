//! Hager's 1-norm condition estimator for dense complex LU factors.

use nalgebra::{DMatrix, DVector, Dyn};
use num_complex::Complex64;

type C = Complex64;

pub struct LuCondest {
    lu: nalgebra::LU<C, Dyn, Dyn>,
    l: DMatrix<C>,
    u: DMatrix<C>,
    a_norm1: f64,
    n: usize,
}

impl LuCondest {
    /// Factor `a` once; keeps the pieces needed for transpose solves.
    pub fn new(a: DMatrix<C>) -> Option<Self> {
        let n = a.nrows();
        let a_norm1 = (0..n)
            .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let lu = a.lu();
        if (0..n).any(|i| lu.u()[(i, i)].norm() == 0.0) {
            return None;
        }
        let l = lu.l();
        let u = lu.u();
        Some(LuCondest { lu, l, u, a_norm1, n })
    }

    pub fn solve(&self, b: &DVector<C>) -> DVector<C> {
        self.lu.solve(b).expect("nonsingular by construction")
    }

    /// Solve `A^H z = b` using the stored factors:
    /// with `P A = L U`, `A^H = U^H L^H P`, so
    /// `U^H y = b`, `L^H w = y`, `z = P^T w`.
    fn solve_adjoint(&self, b: &DVector<C>) -> DVector<C> {
        let uh = self.u.adjoint();
        let y = uh.solve_lower_triangular(b).expect("U nonsingular");
        let lh = self.l.adjoint();
        let mut w = lh.solve_upper_triangular(&y).expect("L unit diagonal");
        self.lu.p().inv_permute_rows(&mut w);
        w
    }

    /// `||A||_1 * est(||A^{-1}||_1)`.
    pub fn condition_1norm(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = DVector::<C>::from_element(n, C::from(1.0 / n as f64));
        let mut gamma = 0.0f64;
        let mut prev_j = usize::MAX;
        for it in 0..6 {
            let y = self.solve(&x);
            let g: f64 = y.iter().map(|v| v.norm()).sum();
            if g > gamma {
                gamma = g;
            } else if it > 0 {
                break;
            }
            let xi = DVector::<C>::from_iterator(
                n,
                y.iter().map(|v| if v.norm() == 0.0 { C::ONE } else { v / v.norm() }),
            );
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let zx: C = z.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
            if zmax <= zx.re.abs() * (1.0 + 1e-12) || j == prev_j {
                break;
            }
            prev_j = j;
            x = DVector::zeros(n);
            x[j] = C::ONE;
        }
        self.a_norm1 * gamma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_of_diagonal_matrix() {
        let n = 6;
        let a = DMatrix::<C>::from_fn(n, n, |i, j| {
            if i == j { C::from((i + 1) as f64) } else { C::ZERO }
        });
        let est = LuCondest::new(a).unwrap();
        let cond = est.condition_1norm();
        // exact 1-norm condition is 6 * 1 = 6
        assert!((cond - 6.0).abs() < 1e-10, "cond = {cond}");
    }

    #[test]
    fn estimate_close_to_true_condition() {
        let mut rng_state = 123456789u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let n = 24;
        let a = DMatrix::<C>::from_fn(n, n, |i, j| {
            let diag = if i == j { 3.0 } else { 0.0 };
            C::new(diag + next(), next())
        });
        let norm1 = |m: &DMatrix<C>| {
            (0..n)
                .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
                .fold(0.0f64, f64::max)
        };
        let exact = norm1(&a) * norm1(&a.clone().try_inverse().unwrap());
        let est = LuCondest::new(a).unwrap().condition_1norm();
        // Hager's estimate is a lower bound, usually within a small factor
        assert!(est <= exact * (1.0 + 1e-9), "estimate {est} above exact {exact}");
        assert!(est >= exact / 10.0, "estimate {est} far below exact {exact}");
    }
}
