//! Bound states of the quantum oscillator with coupling α² = β(β+λ) (ħ = 1):
//!
//! ```text
//! E_n = (n+1)(β − λn/2),   n = 2n_r + |m|
//! R(r) ∝ (1+λr²)^(−β/(2λ)) r^|m| P_{n_r}^{(|m|, −β/λ−½)}(1+2λr²)
//! Ψ(r, ϕ) = R(r) e^{imϕ} / √(2π)
//! ```
//!
//! For λ > 0 only finitely many levels are normalizable, n ≤ n_max with
//! β/λ − 3/2 ≤ n_max < β/λ − ½. Inner products use the measure
//! (1+λr²)^(−1/2) r dr.

mod jacobi;
mod quadrature;

pub use jacobi::{jacobi_derivative, jacobi_eval, jacobi_second_derivative, jacobi_sum};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const QUAD_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    lambda: f64,
    beta: f64,
}

impl QuantumParams {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lambda must be finite and nonzero, got {lambda}"
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { lambda, beta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// α² = β(β+λ).
    pub fn alpha_squared(&self) -> f64 {
        self.beta * (self.beta + self.lambda)
    }

    /// Highest normalizable n for λ > 0 (−1 when there is none); `None` for λ < 0.
    pub fn n_max(&self) -> Option<i64> {
        (self.lambda > 0.0).then(|| (self.beta / self.lambda - 1.5).ceil() as i64)
    }

    pub fn is_admissible(&self, n: u32) -> bool {
        self.n_max().map_or(true, |nm| (n as i64) <= nm)
    }

    /// Right end of the radial domain.
    pub fn radial_upper(&self) -> f64 {
        if self.lambda < 0.0 {
            1.0 / (-self.lambda).sqrt()
        } else {
            f64::INFINITY
        }
    }
}

pub fn n_max(qp: &QuantumParams) -> Option<i64> {
    qp.n_max()
}

/// E_n = (n+1)(−λn/2 + β).
pub fn energy(qp: &QuantumParams, n: u32) -> f64 {
    let nf = n as f64;
    (nf + 1.0) * (-0.5 * qp.lambda * nf + qp.beta)
}

/// The eigenvalue written in terms of (n_r, |m|) before collecting into n.
pub fn energy_from_quantum_numbers(qp: &QuantumParams, n_r: u32, m: i32) -> f64 {
    let (l, b) = (qp.lambda, qp.beta);
    let nr = n_r as f64;
    let am = m.unsigned_abs() as f64;
    -nr * (2.0 * l * (nr + 1.0) + (2.0 * am - 1.0) * l - 2.0 * b) + (am + 1.0) * (b - 0.5 * l * am)
}

pub fn degeneracy(n: u32) -> u32 {
    n + 1
}

/// All (n_r, m) with 2n_r + |m| = n, ordered by m.
pub fn partitions(n: u32) -> Vec<(u32, i32)> {
    let n = n as i32;
    (-n..=n)
        .filter(|m| (n - m.abs()) % 2 == 0)
        .map(|m| (((n - m.abs()) / 2) as u32, m))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: u32,
    pub energy: f64,
    pub degeneracy: u32,
}

/// Levels in increasing n. For λ < 0 the ladder is infinite and `cutoff`
/// (a count of levels) is required; for λ > 0 the list stops at n_max or at
/// `cutoff`, whichever comes first.
pub fn energy_levels(qp: &QuantumParams, cutoff: Option<u32>) -> Result<Vec<EnergyLevel>> {
    let count = match (qp.n_max(), cutoff) {
        (None, None) => {
            return Err(Error::Precondition(
                "the spectrum is infinite for lambda < 0; supply a cutoff".into(),
            ))
        }
        (None, Some(c)) => c as i64,
        (Some(nm), None) => nm + 1,
        (Some(nm), Some(c)) => (nm + 1).min(c as i64),
    };
    Ok((0..count.max(0) as u32)
        .map(|n| EnergyLevel {
            n,
            energy: energy(qp, n),
            degeneracy: degeneracy(n),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialEigenstate {
    pub qp: QuantumParams,
    pub n_r: u32,
    pub m: i32,
    /// Jacobi parameter |m|.
    pub a: f64,
    /// Jacobi parameter −β/λ − ½.
    pub b: f64,
    pub n: u32,
    pub energy: f64,
    /// Factor making ∫ R² (1+λr²)^(−1/2) r dr = 1.
    pub norm: f64,
}

/// Normalized radial eigenstate; fails with a truncation error above n_max.
pub fn radial_wavefunction(qp: &QuantumParams, n_r: u32, m: i32) -> Result<RadialEigenstate> {
    let n = 2 * n_r + m.unsigned_abs();
    if !qp.is_admissible(n) {
        return Err(Error::Truncation {
            n_r,
            m,
            n_max: qp.n_max(),
        });
    }
    let mut state = RadialEigenstate {
        qp: *qp,
        n_r,
        m,
        a: m.unsigned_abs() as f64,
        b: -qp.beta / qp.lambda - 0.5,
        n,
        energy: energy(qp, n),
        norm: 1.0,
    };
    let self_overlap = overlap(&state, &state)?;
    state.norm = 1.0 / self_overlap.sqrt();
    Ok(state)
}

impl RadialEigenstate {
    fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// R(r), normalized.
    pub fn radial(&self, r: f64) -> f64 {
        let l = self.qp.lambda;
        let w = 1.0 + l * r * r;
        let p = jacobi_eval(self.n_r, self.a, self.b, 1.0 + 2.0 * l * r * r);
        self.norm * w.powf(-0.5 * self.qp.beta / l) * r.powi(self.abs_m() as i32) * p
    }

    /// (R, R′, R″) by the chain rule on the closed form.
    pub fn radial_derivatives(&self, r: f64) -> (f64, f64, f64) {
        let (l, beta) = (self.qp.lambda, self.qp.beta);
        let am = self.abs_m() as f64;
        let w = 1.0 + l * r * r;
        let t = 1.0 + 2.0 * l * r * r;
        let gh = self.norm * w.powf(-0.5 * beta / l) * r.powi(self.abs_m() as i32);
        // logarithmic derivative of the prefactor and its derivative
        let l1 = -beta * r / w + am / r;
        let l1p = -beta * (1.0 - l * r * r) / (w * w) - am / (r * r);
        let p = jacobi_eval(self.n_r, self.a, self.b, t);
        let dp = jacobi_derivative(self.n_r, self.a, self.b, t);
        let d2p = jacobi_second_derivative(self.n_r, self.a, self.b, t);
        let tr = 4.0 * l * r;
        let p1 = dp * tr;
        let p2 = d2p * tr * tr + dp * 4.0 * l;
        (
            gh * p,
            gh * (l1 * p + p1),
            gh * ((l1 * l1 + l1p) * p + 2.0 * l1 * p1 + p2),
        )
    }

    /// Ψ(r, ϕ) = R(r) e^{imϕ}/√(2π).
    pub fn full(&self, r: f64, phi: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.m as f64 * phi) * (self.radial(r) / (2.0 * PI).sqrt())
    }

    /// Number of sign changes of R on `samples` equally spaced interior points.
    pub fn count_nodes(&self, r_end: f64, samples: usize) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for i in 1..samples {
            let v = self.radial(r_end * i as f64 / samples as f64);
            if v != 0.0 {
                if last != 0.0 && v.signum() != last.signum() {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }
}

pub fn full_wavefunction(state: &RadialEigenstate) -> impl Fn(f64, f64) -> Complex64 + '_ {
    move |r, phi| state.full(r, phi)
}

/// Scaled residual of
/// r²(1+λr²)R″ + r(1+2λr²)R′ + (−β(β+λ)r⁴/(1+λr²) + 2Er² − m²)R,
/// divided by max(1, |R|r²).
pub fn ode_residual(qp: &QuantumParams, state: &RadialEigenstate, r: f64) -> f64 {
    let l = qp.lambda;
    let (rr, d1, d2) = state.radial_derivatives(r);
    let r2 = r * r;
    let w = 1.0 + l * r2;
    let m2 = (state.m as f64).powi(2);
    let res = r2 * w * d2 + r * (1.0 + 2.0 * l * r2) * d1
        + (-qp.alpha_squared() * r2 * r2 / w + 2.0 * state.energy * r2 - m2) * rr;
    res / (rr.abs() * r2).max(1.0)
}

/// ∫ R₁R₂ (1+λr²)^(−1/2) r dr with both states carrying their current `norm`.
///
/// With u = λr²/(1+λr²) (λ > 0) or u = |λ|r² (λ < 0) the integrand becomes
/// (1−u)^γ u^|m| × polynomial on (0, 1); the endpoint power is then removed
/// with 1 − u = s^q.
fn overlap(s1: &RadialEigenstate, s2: &RadialEigenstate) -> Result<f64> {
    let qp = s1.qp;
    let (l, beta) = (qp.lambda, qp.beta);
    let am = s1.abs_m();
    let ll = l.abs();
    let gamma = if l > 0.0 {
        beta / l - am as f64 - (s1.n_r + s2.n_r) as f64 - 1.5
    } else {
        beta / ll - 0.5
    };
    if gamma <= -1.0 {
        return Err(Error::Truncation {
            n_r: s1.n_r.max(s2.n_r),
            m: s1.m,
            n_max: qp.n_max(),
        });
    }
    let q = (3.0 / (gamma + 1.0)).ceil().max(1.0);
    let c1 = jacobi::mapped_coefficients(s1.n_r, s1.a, s1.b);
    let c2 = jacobi::mapped_coefficients(s2.n_r, s2.a, s2.b);
    let horner = |c: &[f64], u: f64| c.iter().rev().fold(0.0, |acc, x| acc * u + x);
    let prefactor = s1.norm * s2.norm * q / (2.0 * ll * ll.powi(am as i32));
    let integrand = |s: f64| {
        let u = 1.0 - s.powf(q);
        let (p1, p2) = if l > 0.0 {
            (horner(&c1, u), horner(&c2, u))
        } else {
            let t = 1.0 - 2.0 * u;
            (jacobi_eval(s1.n_r, s1.a, s1.b, t), jacobi_eval(s2.n_r, s2.a, s2.b, t))
        };
        prefactor * s.powf(q * (gamma + 1.0) - 1.0) * u.powi(am as i32) * p1 * p2
    };
    let res = quadrature::integrate(integrand, 0.0, 1.0, QUAD_REL_TOL, 1e-15)?;
    Ok(res.value)
}

/// ⟨R₁|R₂⟩ under the measure (1+λr²)^(−1/2) r dr.
pub fn inner_product(
    qp: &QuantumParams,
    s1: &RadialEigenstate,
    s2: &RadialEigenstate,
) -> Result<f64> {
    if s1.m != s2.m {
        return Err(Error::Precondition(format!(
            "radial inner product needs equal m, got {} and {}",
            s1.m, s2.m
        )));
    }
    if s1.qp != *qp || s2.qp != *qp {
        return Err(Error::Precondition("states belong to different parameters".into()));
    }
    overlap(s1, s2)
}

/// ∫_{r0}^{r1} R² (1+λr²)^(−1/2) r dr for the unnormalized radial factor of
/// (n_r, m), admissible or not. Used to exhibit the divergence above n_max.
pub fn radial_tail_integral(qp: &QuantumParams, n_r: u32, m: i32, r0: f64, r1: f64) -> Result<f64> {
    let am = m.unsigned_abs();
    let state = RadialEigenstate {
        qp: *qp,
        n_r,
        m,
        a: am as f64,
        b: -qp.beta / qp.lambda - 0.5,
        n: 2 * n_r + am,
        energy: 0.0,
        norm: 1.0,
    };
    let l = qp.lambda;
    // integrate in x = ln r
    let f = |x: f64| {
        let r = x.exp();
        let rr = state.radial(r);
        rr * rr * (1.0 + l * r * r).powf(-0.5) * r * r
    };
    Ok(quadrature::integrate(f, r0.ln(), r1.ln(), 1e-12, 0.0)?.value)
}
