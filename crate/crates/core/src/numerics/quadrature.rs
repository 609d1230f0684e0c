//! Gauss-Legendre and triangle quadrature rules.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (c + h * xi, h * wi))
        .collect()
}

/// Quadrature rule on the reference triangle, given as barycentric points
/// with weights that sum to 1 (multiply by the triangle area).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriRule {
    /// Centroid rule, degree 1.
    Centroid,
    /// Edge-midpoint rule, degree 2. Integrates P1 mass matrices exactly.
    Midpoint3,
    /// Seven-point rule, degree 5.
    Gauss7,
}

impl TriRule {
    pub fn points(self) -> Vec<([f64; 3], f64)> {
        match self {
            TriRule::Centroid => vec![([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1.0)],
            TriRule::Midpoint3 => vec![
                ([0.5, 0.5, 0.0], 1.0 / 3.0),
                ([0.0, 0.5, 0.5], 1.0 / 3.0),
                ([0.5, 0.0, 0.5], 1.0 / 3.0),
            ],
            TriRule::Gauss7 => {
                let a = 0.059715871789770;
                let b = 0.470142064105115;
                let c = 0.797426985353087;
                let d = 0.101286507323456;
                let w1 = 0.225;
                let w2 = 0.132394152788506;
                let w3 = 0.125939180544827;
                vec![
                    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], w1),
                    ([a, b, b], w2),
                    ([b, a, b], w2),
                    ([b, b, a], w2),
                    ([c, d, d], w3),
                    ([d, c, d], w3),
                    ([d, d, c], w3),
                ]
            }
        }
    }
}
