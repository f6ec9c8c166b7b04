//! Cartesian solution families and their mapping onto polar trajectory
//! parameters.
//!
//! The cartesian solutions are
//!
//! ```text
//! trig:   x = A1 sin(ω̄t + φ1),   y = A2 sin(ω̄t + φ2)
//! hyper:  x = A1 sinh(ω̄t + φ1),  y = A2 sinh(ω̄t + φ2)
//! linear: x = A1 t + B1,         y = A2 t + B2
//! ```
//!
//! and they map onto the bounded, unbounded and limiting polar families
//! respectively. Phases are always recovered from two components with `atan2`
//! (or the logarithmic form for the hyperbolic case); the branch of K is fixed
//! by matching the azimuth of the cartesian point at t = 0.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::closed_form::{ClosedFormTrajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Below this |sin φ12| (or |sinh φ12|) the cartesian orbit is treated as a
/// line through the origin.
pub const LINE_THRESHOLD: f64 = 1e-14;

const CONSTRAINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum CartesianAmplitudes {
    Trig {
        a1: f64,
        a2: f64,
        phi1: f64,
        phi2: f64,
        lambda: f64,
    },
    Hyper {
        a1: f64,
        a2: f64,
        phi1: f64,
        phi2: f64,
        lambda: f64,
    },
    Linear {
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
        lambda: f64,
    },
}

/// Quantities fixed by the cartesian constraint relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianInvariants {
    /// ω̄ = α/√M; absent for the linear family.
    pub omega_bar: Option<f64>,
    /// M = 1 + λP_e (trig) or λP_h − 1 (hyper); absent for the linear family.
    pub mass: Option<f64>,
    /// P_e, P_h or P_L.
    pub p: f64,
    pub j: f64,
    pub e: f64,
    /// φ1 − φ2; absent for the linear family.
    pub phi12: Option<f64>,
}

impl CartesianAmplitudes {
    pub fn lambda(&self) -> f64 {
        match *self {
            Self::Trig { lambda, .. } | Self::Hyper { lambda, .. } | Self::Linear { lambda, .. } => {
                lambda
            }
        }
    }

    /// Oscillator strength implied by a linear orbit, √(λP_L).
    pub fn linear_alpha(&self) -> Option<f64> {
        match *self {
            Self::Linear {
                a1,
                a2,
                b1,
                b2,
                lambda,
            } if lambda > 0.0 => {
                let jj = a2 * b1 - a1 * b2;
                Some((lambda * (a1 * a1 + a2 * a2 + lambda * jj * jj)).sqrt())
            }
            _ => None,
        }
    }

    /// Cartesian point at time `t`. `omega_bar` is ignored for the linear family.
    pub fn position(&self, omega_bar: f64, t: f64) -> (f64, f64) {
        match *self {
            Self::Trig {
                a1, a2, phi1, phi2, ..
            } => (
                a1 * (omega_bar * t + phi1).sin(),
                a2 * (omega_bar * t + phi2).sin(),
            ),
            Self::Hyper {
                a1, a2, phi1, phi2, ..
            } => (
                a1 * (omega_bar * t + phi1).sinh(),
                a2 * (omega_bar * t + phi2).sinh(),
            ),
            Self::Linear { a1, a2, b1, b2, .. } => (a1 * t + b1, a2 * t + b2),
        }
    }
}

pub fn cartesian_invariants(amps: &CartesianAmplitudes, alpha: f64) -> Result<CartesianInvariants> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    let lambda = amps.lambda();
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParams(format!(
            "lambda must be finite and nonzero, got {lambda}"
        )));
    }
    match *amps {
        CartesianAmplitudes::Trig {
            a1, a2, phi1, phi2, ..
        } => {
            let phi12 = phi1 - phi2;
            let s = phi12.sin();
            let p = a1 * a1 + a2 * a2 + lambda * (a1 * a2 * s).powi(2);
            let mass = 1.0 + lambda * p;
            if mass <= 0.0 {
                return Err(Error::InconsistentParameters(format!(
                    "1 + lambda*P_e = {mass} must be positive"
                )));
            }
            let omega_bar = alpha / mass.sqrt();
            Ok(CartesianInvariants {
                omega_bar: Some(omega_bar),
                mass: Some(mass),
                p,
                j: omega_bar * a1 * a2 * s,
                e: 0.5 * alpha * alpha * p / mass,
                phi12: Some(phi12),
            })
        }
        CartesianAmplitudes::Hyper {
            a1, a2, phi1, phi2, ..
        } => {
            let phi12 = phi1 - phi2;
            let s = phi12.sinh();
            let p = a1 * a1 + a2 * a2 + lambda * (a1 * a2 * s).powi(2);
            let mass = lambda * p - 1.0;
            if mass <= 0.0 {
                return Err(Error::InconsistentParameters(format!(
                    "lambda*P_h - 1 = {mass} must be positive"
                )));
            }
            let omega_bar = alpha / mass.sqrt();
            Ok(CartesianInvariants {
                omega_bar: Some(omega_bar),
                mass: Some(mass),
                p,
                j: omega_bar * a1 * a2 * s,
                e: 0.5 * alpha * alpha * p / mass,
                phi12: Some(phi12),
            })
        }
        CartesianAmplitudes::Linear { a1, a2, b1, b2, .. } => {
            let j = a2 * b1 - a1 * b2;
            let p = a1 * a1 + a2 * a2 + lambda * j * j;
            let a2_expected = lambda * p;
            if (alpha * alpha - a2_expected).abs() > CONSTRAINT_TOLERANCE * alpha * alpha {
                return Err(Error::InconsistentParameters(format!(
                    "linear orbit requires alpha^2 = lambda*P_L = {a2_expected}, got {}",
                    alpha * alpha
                )));
            }
            Ok(CartesianInvariants {
                omega_bar: None,
                mass: None,
                p,
                j,
                e: alpha * alpha / (2.0 * lambda),
                phi12: None,
            })
        }
    }
}

/// Wraps an angle difference into (−π, π].
pub(crate) fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Shifts K by π when needed so that the polar azimuth at t = 0 matches the
/// cartesian point.
fn fix_k_branch(traj: &mut ClosedFormTrajectory, target: f64) {
    let predicted = traj.state(0.0).phi;
    if wrap_angle(target - predicted).abs() > 0.5 * PI {
        traj.k += PI;
    }
    traj.k = wrap_angle(traj.k);
}

/// K for a J = 0 line orbit: the direction of the cartesian point at an
/// instant where the polar signed radius is `s_ref > 0`.
fn line_k(amps: &CartesianAmplitudes, omega_bar: f64, t_ref: f64, s_ref: f64) -> f64 {
    let (x, y) = amps.position(omega_bar, t_ref);
    (y / s_ref).atan2(x / s_ref)
}

fn model(amps: &CartesianAmplitudes, alpha: f64) -> Result<ModelParams> {
    ModelParams::new(amps.lambda(), alpha)
}

/// Polar form of a trigonometric cartesian orbit.
pub fn bridge_bounded(amps: &CartesianAmplitudes, alpha: f64) -> Result<ClosedFormTrajectory> {
    let CartesianAmplitudes::Trig {
        a1, a2, phi1, phi2, ..
    } = *amps
    else {
        return Err(Error::Precondition(
            "bounded bridge needs trigonometric amplitudes".into(),
        ));
    };
    let inv = cartesian_invariants(amps, alpha)?;
    let omega = inv.omega_bar.unwrap_or_default();
    let params = model(amps, alpha)?;
    let (q1, q2) = (a1 * a1, a2 * a2);
    let b = 0.5 * (q1 + q2);
    let a_cos = 0.5 * (q1 * (2.0 * phi1).sin() + q2 * (2.0 * phi2).sin());
    let a_sin = -0.5 * (q1 * (2.0 * phi1).cos() + q2 * (2.0 * phi2).cos());
    let is_line = (phi1 - phi2).sin().abs() < LINE_THRESHOLD || a1 == 0.0 || a2 == 0.0;
    let a = if is_line { b } else { a_cos.hypot(a_sin) };
    let phase = if a == 0.0 {
        0.0
    } else {
        a_sin.atan2(a_cos).rem_euclid(TAU)
    };
    let mut traj = ClosedFormTrajectory {
        kind: TrajectoryKind::Bounded,
        params,
        j: if is_line { 0.0 } else { inv.j },
        energy: inv.e,
        a,
        b,
        omega,
        phase,
        k: 0.0,
    };
    if is_line {
        // signed radius √(2A) sin(ωt + φ/2 + π/4) peaks here
        let t_ref = (FRAC_PI_4 - 0.5 * phase) / omega;
        traj.k = line_k(amps, omega, t_ref, (2.0 * a).sqrt());
        return Ok(traj);
    }
    let (sh, ch) = (0.5 * phase).sin_cos();
    let q = omega / inv.j * (b * sh + a * ch);
    let (x0, y0) = (a1 * phi1.sin(), a2 * phi2.sin());
    let num = y0 * ch - q * x0;
    let den = x0 * ch + q * y0;
    traj.k = num.atan2(den);
    fix_k_branch(&mut traj, y0.atan2(x0));
    Ok(traj)
}

/// Polar form of a hyperbolic-sine cartesian orbit.
pub fn bridge_unbounded(amps: &CartesianAmplitudes, alpha: f64) -> Result<ClosedFormTrajectory> {
    let CartesianAmplitudes::Hyper {
        a1, a2, phi1, phi2, ..
    } = *amps
    else {
        return Err(Error::Precondition(
            "unbounded bridge needs hyperbolic amplitudes".into(),
        ));
    };
    let inv = cartesian_invariants(amps, alpha)?;
    let omega = inv.omega_bar.unwrap_or_default();
    let params = model(amps, alpha)?;
    let (q1, q2) = (a1 * a1, a2 * a2);
    let b = -0.5 * (q1 + q2);
    // A cosh φ ± A sinh φ = A e^{±φ}
    let plus = 0.5 * (q1 * (2.0 * phi1).exp() + q2 * (2.0 * phi2).exp());
    let minus = 0.5 * (q1 * (-2.0 * phi1).exp() + q2 * (-2.0 * phi2).exp());
    let is_line = (phi1 - phi2).sinh().abs() < LINE_THRESHOLD || a1 == 0.0 || a2 == 0.0;
    let a = if is_line { -b } else { (plus * minus).sqrt() };
    let phase = 0.5 * (plus / minus).ln();
    let mut traj = ClosedFormTrajectory {
        kind: TrajectoryKind::Unbounded,
        params,
        j: if is_line { 0.0 } else { inv.j },
        energy: inv.e,
        a,
        b,
        omega,
        phase,
        k: 0.0,
    };
    if is_line {
        // signed radius √(2A) sinh(ωt + φ/2) equals √(2A) sinh 1 here
        let t_ref = (1.0 - 0.5 * phase) / omega;
        traj.k = line_k(amps, omega, t_ref, (2.0 * a).sqrt() * 1f64.sinh());
        return Ok(traj);
    }
    let q = omega / inv.j * (a - b) * (0.5 * phase).tanh();
    let (x0, y0) = (a1 * phi1.sinh(), a2 * phi2.sinh());
    traj.k = (y0 - q * x0).atan2(x0 + q * y0);
    fix_k_branch(&mut traj, y0.atan2(x0));
    Ok(traj)
}

/// Polar form of a straight-line cartesian orbit at the threshold energy.
pub fn bridge_limiting(amps: &CartesianAmplitudes) -> Result<ClosedFormTrajectory> {
    let CartesianAmplitudes::Linear {
        a1,
        a2,
        b1,
        b2,
        lambda,
    } = *amps
    else {
        return Err(Error::Precondition(
            "limiting bridge needs linear amplitudes".into(),
        ));
    };
    if a1 == 0.0 && a2 == 0.0 {
        return Err(Error::Degenerate("A1 = A2 = 0 describes a point at rest".into()));
    }
    if lambda <= 0.0 {
        return Err(Error::InconsistentParameters(
            "linear orbits need lambda > 0".into(),
        ));
    }
    let alpha = amps.linear_alpha().unwrap_or_default();
    let inv = cartesian_invariants(amps, alpha)?;
    let params = model(amps, alpha)?;
    let norm2 = a1 * a1 + a2 * a2;
    let a = norm2.sqrt();
    let cross = a1 * b2 - a2 * b1;
    let mut traj = ClosedFormTrajectory {
        kind: TrajectoryKind::Limiting,
        params,
        j: inv.j,
        energy: inv.e,
        a,
        b: cross * cross / norm2,
        omega: 0.0,
        phase: (a1 * b1 + a2 * b2) / a,
        k: 0.0,
    };
    if inv.j == 0.0 {
        traj.k = a2.atan2(a1);
        return Ok(traj);
    }
    traj.k = (-a1).atan2(a2);
    fix_k_branch(&mut traj, b2.atan2(b1));
    Ok(traj)
}

/// Dispatches on the cartesian family.
pub fn bridge(amps: &CartesianAmplitudes, alpha: f64) -> Result<ClosedFormTrajectory> {
    match amps {
        CartesianAmplitudes::Trig { .. } => bridge_bounded(amps, alpha),
        CartesianAmplitudes::Hyper { .. } => bridge_unbounded(amps, alpha),
        CartesianAmplitudes::Linear { .. } => {
            cartesian_invariants(amps, alpha)?;
            bridge_limiting(amps)
        }
    }
}

/// Residuals of the coefficients of 1, tan ωt and tan² ωt in the identity
/// obtained by inserting the trig cartesian orbit into the bounded azimuth
/// relation, evaluated at the bridged K. Each is scaled by the size of its
/// largest term.
pub fn tan_k_coefficient_residuals(amps: &CartesianAmplitudes, alpha: f64) -> Result<[f64; 3]> {
    let CartesianAmplitudes::Trig {
        a1, a2, phi1, phi2, ..
    } = *amps
    else {
        return Err(Error::Precondition("needs trigonometric amplitudes".into()));
    };
    let traj = bridge_bounded(amps, alpha)?;
    if traj.j == 0.0 {
        return Err(Error::Precondition("line orbit has no azimuth relation".into()));
    }
    let (a, b, q) = (traj.a, traj.b, traj.omega / traj.j);
    let (sk, ck) = traj.k.sin_cos();
    let (sh, ch) = (0.5 * traj.phase).sin_cos();
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    // everything multiplied through by cos K and cos(φ/2)
    let l0 = a2 * s2 * ck - a1 * s1 * sk;
    let l1 = a2 * c2 * ck - a1 * c1 * sk;
    let (m0, m1) = (ch, -sh);
    let r0 = a1 * s1 * ck + a2 * s2 * sk;
    let r1 = a1 * c1 * ck + a2 * c2 * sk;
    let g0 = b * sh + a * ch;
    let g1 = b * ch - a * sh;
    let terms = [
        [l0 * m0, -q * r0 * g0, 0.0, 0.0],
        [l0 * m1, l1 * m0, -q * r0 * g1, -q * r1 * g0],
        [l1 * m1, -q * r1 * g1, 0.0, 0.0],
    ];
    let scale = (a1.abs() + a2.abs()) * (1.0 + q.abs() * (a + b));
    Ok(terms.map(|t| t.iter().sum::<f64>().abs() / scale))
}

/// Largest disagreement between a cartesian orbit and its bridged polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    /// max |r²_cart − r²_polar| / max(1, r²_polar).
    pub max_r2_dev: f64,
    /// max wrapped |atan2(y, x) − ϕ_polar|, skipping samples within 1e-7 of the origin.
    pub max_angle_dev: f64,
    /// |ω − ω̄| / ω̄ between the polar frequency for the induced (J, E) and ω̄;
    /// zero for the linear family.
    pub omega_rel_dev: f64,
}

pub fn verify_bridge(
    amps: &CartesianAmplitudes,
    alpha: f64,
    n_samples: usize,
    t_span: (f64, f64),
) -> Result<BridgeReport> {
    let traj = bridge(amps, alpha)?;
    let inv = cartesian_invariants(amps, alpha)?;
    let omega_bar = inv.omega_bar.unwrap_or(0.0);
    let omega_rel_dev = match inv.omega_bar {
        Some(wb) => {
            let mc = crate::model::motion_constants(&traj.params, inv.j, inv.e);
            (mc.omega - wb).abs() / wb
        }
        None => 0.0,
    };
    let n = n_samples.max(2);
    let scale = traj.r2_range().1.min(traj.b.abs().max(1.0)).sqrt();
    let mut report = BridgeReport {
        max_r2_dev: 0.0,
        max_angle_dev: 0.0,
        omega_rel_dev,
    };
    for i in 0..n {
        let t = t_span.0 + (t_span.1 - t_span.0) * i as f64 / (n - 1) as f64;
        let (x, y) = amps.position(omega_bar, t);
        let polar = traj.state(t);
        let r2_polar = traj.r2(t);
        let dev = (x * x + y * y - r2_polar).abs() / r2_polar.max(1.0);
        report.max_r2_dev = report.max_r2_dev.max(dev);
        if x.hypot(y) > 1e-7 * scale {
            let d = wrap_angle(y.atan2(x) - polar.phi).abs();
            report.max_angle_dev = report.max_angle_dev.max(d);
        }
    }
    Ok(report)
}
