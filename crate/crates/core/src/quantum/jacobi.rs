//! Jacobi polynomials P_n^{(a,b)}(t) for real, possibly negative, parameters.

/// Generalized binomial coefficient C(x, k) = x(x−1)…(x−k+1)/k!.
pub(crate) fn binom(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// Explicit finite sum
/// P_n = Σ_k C(n+a, n−k) C(n+b, k) ((t−1)/2)^k ((t+1)/2)^(n−k).
pub fn jacobi_sum(n: u32, a: f64, b: f64, t: f64) -> f64 {
    let nf = n as f64;
    let (lo, hi) = (0.5 * (t - 1.0), 0.5 * (t + 1.0));
    (0..=n)
        .map(|k| {
            binom(nf + a, n - k) * binom(nf + b, k) * lo.powi(k as i32) * hi.powi((n - k) as i32)
        })
        .sum()
}

/// Coefficients of the polynomial (1−u)^n P_n((1+u)/(1−u)) in powers of u.
///
/// This is the form the radial functions take under u = λr²/(1+λr²).
pub(crate) fn mapped_coefficients(n: u32, a: f64, b: f64) -> Vec<f64> {
    let nf = n as f64;
    (0..=n).map(|k| binom(nf + a, n - k) * binom(nf + b, k)).collect()
}

/// P_n^{(a,b)}(t) by the three-term recurrence, switching to the explicit sum
/// when a recurrence denominator factor 2k+a+b or k+a+b+1 comes within
/// `NEAR_DEGENERATE` of zero.
const NEAR_DEGENERATE: f64 = 0.5;

pub fn jacobi_eval(n: u32, a: f64, b: f64, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let p1 = (a + 1.0) + (a + b + 2.0) * 0.5 * (t - 1.0);
    if n == 1 {
        return p1;
    }
    let ab = a + b;
    let (mut prev, mut cur) = (1.0, p1);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        if s.abs() < NEAR_DEGENERATE || (kf + ab + 1.0).abs() < NEAR_DEGENERATE {
            return jacobi_sum(n, a, b, t);
        }
        let lead = 2.0 * (kf + 1.0) * (kf + ab + 1.0) * s;
        let c1 = (s + 1.0) * ((s + 2.0) * s * t + a * a - b * b);
        let c2 = 2.0 * (kf + a) * (kf + b) * (s + 2.0);
        let next = (c1 * cur - c2 * prev) / lead;
        prev = cur;
        cur = next;
    }
    cur
}

/// dP_n^{(a,b)}/dt = ((n+a+b+1)/2) P_{n−1}^{(a+1,b+1)}.
pub fn jacobi_derivative(n: u32, a: f64, b: f64, t: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + a + b + 1.0) * jacobi_eval(n - 1, a + 1.0, b + 1.0, t)
}

pub fn jacobi_second_derivative(n: u32, a: f64, b: f64, t: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    0.5 * (n as f64 + a + b + 1.0) * jacobi_derivative(n - 1, a + 1.0, b + 1.0, t)
}
