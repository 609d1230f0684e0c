//! Bessel functions of the first kind, their derivatives, and their zeros.
//!
//! Circular cross-sections need `J_n` to near machine precision: the modal
//! normalisation constants feed the eigenfunction Gram matrix, which is
//! checked at 1e-10. The power series is used for small arguments, the
//! Hankel asymptotic expansion for large ones, and Miller's downward
//! recurrence bridges the large-order regime.

use std::f64::consts::PI;

/// `J_n(x)` for integer order `n >= 0` and `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_LIMIT {
        if x < 0.75 * n as f64 {
            // deep in the turning-point region the series still converges,
            // but downward recurrence is cheaper and avoids underflow
            jn_miller(n, x)
        } else {
            jn_series(n, x)
        }
    } else if (n as f64) < x {
        // forward recurrence is stable while the order stays below x
        let j0 = j_asymptotic(0, x);
        if n == 0 {
            return j0;
        }
        let j1 = j_asymptotic(1, x);
        let mut prev = j0;
        let mut cur = j1;
        for k in 1..n {
            let next = (2.0 * k as f64 / x) * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        jn_miller(n, x)
    }
}

/// `J_n'(x)`; uses `J_0' = -J_1` and `2 J_n' = J_{n-1} - J_{n+1}`.
pub fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else if x == 0.0 {
        if n == 1 {
            0.5
        } else {
            0.0
        }
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

/// Second derivative from the Bessel ODE: `J_n'' = -J_n'/x - (1 - n^2/x^2) J_n`.
pub fn bessel_j_second(n: u32, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let nf = n as f64;
    -bessel_j_prime(n, x) / x - (1.0 - nf * nf / (x * x)) * bessel_j(n, x)
}

const SERIES_LIMIT: f64 = 13.0;

fn jn_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // leading term (x/2)^n / n!
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= -(half * half) / (m * (m + n as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) {
            break;
        }
        m += 1.0;
        if m > 400.0 {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion, adequate for `x >= SERIES_LIMIT` and small order.
fn j_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    let mut p = 1.0;
    let mut q = (mu - 1.0) / (8.0 * x);
    // P and Q series in 1/(8x)^2; truncate when terms stop decreasing
    let mut term_p = 1.0;
    let mut term_q = q;
    let mut k = 1u32;
    loop {
        let a = mu - ((4 * k - 3) as f64) * ((4 * k - 3) as f64);
        let b = mu - ((4 * k - 1) as f64) * ((4 * k - 1) as f64);
        term_p *= -a * b / ((2 * k - 1) as f64 * (2 * k) as f64 * 64.0 * x * x);
        let c = mu - ((4 * k - 1) as f64) * ((4 * k - 1) as f64);
        let d = mu - ((4 * k + 1) as f64) * ((4 * k + 1) as f64);
        term_q *= -c * d / ((2 * k) as f64 * (2 * k + 1) as f64 * 64.0 * x * x);
        if term_p.abs() < 1e-17 && term_q.abs() < 1e-17 {
            break;
        }
        if k > 20 {
            break;
        }
        p += term_p;
        q += term_q;
        k += 1;
    }
    (2.0 / (PI * x)).sqrt() * (p * (chi).cos() - q * (chi).sin())
}

/// Miller's downward recurrence with the normalisation
/// `J_0 + 2 J_2 + 2 J_4 + ... = 1`.
fn jn_miller(n: u32, x: f64) -> f64 {
    let start = (n as usize + 16 + (40.0 * x.max(1.0)).sqrt() as usize) & !1usize;
    let mut jp = 0.0_f64;
    let mut j = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut result = 0.0_f64;
    for k in (0..=start).rev() {
        let jm = (2.0 * (k + 1) as f64 / x) * j - jp;
        jp = j;
        j = jm;
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * j;
        }
        if k == n as usize {
            result = j;
        }
        // rescale to avoid overflow
        if j.abs() > 1e100 {
            jp /= 1e100;
            j /= 1e100;
            norm /= 1e100;
            result /= 1e100;
        }
    }
    norm += j; // k = 0 term
    if n == 0 {
        result = j;
    }
    result / norm
}

/// First `count` positive zeros of `J_n`.
pub fn jn_zeros(n: u32, count: usize) -> Vec<f64> {
    positive_zeros(count, |x| bessel_j(n, x), n as f64)
}

/// First `count` positive zeros of `J_n'`.
pub fn jnp_zeros(n: u32, count: usize) -> Vec<f64> {
    // J_0'(x) = -J_1(x): its positive zeros are the zeros of J_1
    if n == 0 {
        return jn_zeros(1, count);
    }
    positive_zeros(count, |x| bessel_j_prime(n, x), n as f64)
}

/// Scan for sign changes starting just above `floor`, refine by bisection.
fn positive_zeros(count: usize, f: impl Fn(f64) -> f64, floor: f64) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(count);
    let step = 0.2;
    let mut x = floor.max(0.0) + 1e-9;
    let mut fx = f(x);
    while zeros.len() < count {
        let x1 = x + step;
        let f1 = f(x1);
        if fx == 0.0 {
            zeros.push(x);
        } else if fx * f1 < 0.0 {
            zeros.push(bisect(&f, x, x1));
        }
        x = x1;
        fx = f1;
        if x > floor + 60.0 + count as f64 * PI * 2.0 {
            break;
        }
    }
    zeros.truncate(count);
    zeros
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < 1e-15 * mid.max(1.0) {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}
