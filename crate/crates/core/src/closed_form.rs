//! Exact trajectories r²(t), φ(t) for the three classical regimes.
//!
//! * bounded:   r² = A sin(2ωt + φ) + B,    tan(ϕ − K) = (ω/J)[B tan(ωt + φ/2) + A]
//! * unbounded: r² = A cosh(2ωt + φ) + B,   tan(ϕ − K) = (ω/J)(A − B) tanh(ωt + φ/2)
//! * limiting:  r² = (At + φ)² + B,         tan(ϕ − K) = (A/J)(At + φ)
//!
//! Here φ is the phase of r² and ϕ the azimuth. The tangent relations are
//! inverted on a continuous branch so the returned azimuth is unwrapped.
//!
//! In the limiting family A is a rate (length/time) and φ a length, unlike the
//! other two where A is an area and φ an angle.
//!
//! For J = 0 the motion is a straight line through the origin. It is tracked
//! with a signed radial coordinate s(t), r = |s|, and the azimuth is K on the
//! half-line s ≥ 0 and K + π on the other half.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{motion_constants, ClassicalState, ModelParams, Regime};

/// Relative slack when snapping slightly negative radicands or out-of-range
/// initial radii onto their admissible boundary.
const RADICAND_TOLERANCE: f64 = 1e-9;
const RANGE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryKind {
    Bounded,
    Unbounded,
    Limiting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormTrajectory {
    pub kind: TrajectoryKind,
    pub params: ModelParams,
    pub j: f64,
    pub energy: f64,
    pub a: f64,
    pub b: f64,
    /// Zero for the limiting family.
    pub omega: f64,
    pub phase: f64,
    pub k: f64,
}

fn require_regime(params: &ModelParams, j: f64, e: f64, want: Regime) -> Result<f64> {
    let mc = motion_constants(params, j, e);
    if mc.regime != want {
        return Err(Error::Precondition(format!(
            "(lambda={}, alpha={}, J={j}, E={e}) is {} motion, expected {want}",
            params.lambda(),
            params.alpha(),
            mc.regime
        )));
    }
    Ok(mc.omega)
}

fn checked_sqrt(radicand: f64, scale: f64, what: &str) -> Result<f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_TOLERANCE * scale {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!(
            "negative radicand {radicand} in {what}"
        )))
    }
}

/// Bounded (oscillating) trajectory; `phase` is reduced to [0, 2π).
pub fn bounded_trajectory(
    params: &ModelParams,
    j: f64,
    e: f64,
    phase: f64,
    k: f64,
) -> Result<ClosedFormTrajectory> {
    let omega = require_regime(params, j, e, Regime::Bounded)?;
    let (lambda, alpha) = (params.lambda(), params.alpha());
    let w2 = omega * omega;
    let lj = lambda * j;
    let f1 = (alpha - lj).powi(2) - w2;
    let f2 = (alpha + lj).powi(2) - w2;
    let scale = (alpha * alpha + lj * lj + w2).powi(2);
    let b = (alpha * alpha - lj * lj - w2) / (2.0 * lambda * w2);
    let a = if j == 0.0 {
        b
    } else {
        checked_sqrt(f1 * f2, scale, "bounded amplitude")? / (2.0 * lambda.abs() * w2)
    };
    let phase = if a == 0.0 { 0.0 } else { phase.rem_euclid(TAU) };
    Ok(ClosedFormTrajectory {
        kind: TrajectoryKind::Bounded,
        params: *params,
        j,
        energy: e,
        a,
        b,
        omega,
        phase,
        k,
    })
}

/// Unbounded trajectory on the hyperbolic plane, E > α²/(2λ).
pub fn unbounded_trajectory(
    params: &ModelParams,
    j: f64,
    e: f64,
    phase: f64,
    k: f64,
) -> Result<ClosedFormTrajectory> {
    if params.lambda() <= 0.0 {
        return Err(Error::Precondition(
            "unbounded motion exists only for lambda > 0".into(),
        ));
    }
    let omega = require_regime(params, j, e, Regime::Unbounded)?;
    let (lambda, alpha) = (params.lambda(), params.alpha());
    let w2 = omega * omega;
    let lj = lambda * j;
    let b = -(alpha * alpha - lj * lj + w2) / (2.0 * lambda * w2);
    let a = if j == 0.0 {
        -b
    } else {
        let f1 = (alpha - lj).powi(2) + w2;
        let f2 = (alpha + lj).powi(2) + w2;
        (f1 * f2).sqrt() / (2.0 * lambda * w2)
    };
    Ok(ClosedFormTrajectory {
        kind: TrajectoryKind::Unbounded,
        params: *params,
        j,
        energy: e,
        a,
        b,
        omega,
        phase,
        k,
    })
}

/// Limiting trajectory at the threshold energy E = α²/(2λ).
pub fn limiting_trajectory(
    params: &ModelParams,
    j: f64,
    phase: f64,
    k: f64,
) -> Result<ClosedFormTrajectory> {
    let (lambda, alpha) = (params.lambda(), params.alpha());
    if lambda <= 0.0 {
        return Err(Error::Precondition(
            "limiting motion exists only for lambda > 0".into(),
        ));
    }
    let gap = alpha * alpha - lambda * lambda * j * j;
    if gap <= 0.0 {
        return Err(Error::Precondition(format!(
            "|J|={} reaches the cutoff alpha/lambda={}",
            j.abs(),
            alpha / lambda
        )));
    }
    Ok(ClosedFormTrajectory {
        kind: TrajectoryKind::Limiting,
        params: *params,
        j,
        energy: params.threshold_energy(),
        a: (gap / lambda).sqrt(),
        b: lambda * j * j / gap,
        omega: 0.0,
        phase,
        k,
    })
}

/// Dispatches on the regime of (J, E).
pub fn trajectory_for(
    params: &ModelParams,
    j: f64,
    e: f64,
    phase: f64,
    k: f64,
) -> Result<ClosedFormTrajectory> {
    match motion_constants(params, j, e).regime {
        Regime::Bounded => bounded_trajectory(params, j, e, phase, k),
        Regime::Unbounded => unbounded_trajectory(params, j, e, phase, k),
        Regime::Limiting => limiting_trajectory(params, j, phase, k),
        Regime::Forbidden => Err(Error::Precondition(format!(
            "no real motion for J={j}, E={e}"
        ))),
    }
}

pub fn eval_r2(traj: &ClosedFormTrajectory, t: f64) -> f64 {
    traj.r2(t)
}

pub fn eval_state(traj: &ClosedFormTrajectory, t: f64) -> ClassicalState {
    traj.state(t)
}

impl ClosedFormTrajectory {
    /// r²(t).
    pub fn r2(&self, t: f64) -> f64 {
        match self.kind {
            TrajectoryKind::Bounded => {
                self.a * (2.0 * self.omega * t + self.phase).sin() + self.b
            }
            TrajectoryKind::Unbounded => {
                self.a * (2.0 * self.omega * t + self.phase).cosh() + self.b
            }
            TrajectoryKind::Limiting => {
                let v = self.a * t + self.phase;
                v * v + self.b
            }
        }
    }

    /// Admissible range of r²; the upper end is infinite for open orbits.
    pub fn r2_range(&self) -> (f64, f64) {
        match self.kind {
            // B² − A² = J²/ω² (bounded) and A² − B² = J²/ω² (unbounded) give the
            // inner turning point without cancellation
            TrajectoryKind::Bounded => {
                let hi = self.b + self.a;
                let lo = if self.j == 0.0 {
                    0.0
                } else {
                    (self.j / self.omega).powi(2) / hi
                };
                (lo, hi)
            }
            TrajectoryKind::Unbounded => {
                let lo = if self.j == 0.0 {
                    0.0
                } else {
                    (self.j / self.omega).powi(2) / (self.a - self.b)
                };
                (lo, f64::INFINITY)
            }
            TrajectoryKind::Limiting => (self.b, f64::INFINITY),
        }
    }

    /// Energy rebuilt from ω alone: (α² ∓ ω²)/(2λ), or α²/(2λ) at the threshold.
    pub fn energy_from_omega(&self) -> f64 {
        let (lambda, alpha) = (self.params.lambda(), self.params.alpha());
        let w2 = self.omega * self.omega;
        match self.kind {
            TrajectoryKind::Bounded => (alpha * alpha - w2) / (2.0 * lambda),
            TrajectoryKind::Unbounded => (alpha * alpha + w2) / (2.0 * lambda),
            TrajectoryKind::Limiting => alpha * alpha / (2.0 * lambda),
        }
    }

    /// Radial period π/ω of a bounded orbit.
    pub fn radial_period(&self) -> Option<f64> {
        match self.kind {
            TrajectoryKind::Bounded if self.a > 0.0 => Some(PI / self.omega),
            _ => None,
        }
    }

    /// Signed radial coordinate and its derivative for a J = 0 line orbit.
    fn signed_radius(&self, t: f64) -> (f64, f64) {
        let theta = self.omega * t + 0.5 * self.phase;
        match self.kind {
            TrajectoryKind::Bounded => {
                let amp = (2.0 * self.a).sqrt();
                let (s, c) = (theta + FRAC_PI_4).sin_cos();
                (amp * s, amp * self.omega * c)
            }
            TrajectoryKind::Unbounded => {
                let amp = (2.0 * self.a).sqrt();
                (amp * theta.sinh(), amp * self.omega * theta.cosh())
            }
            TrajectoryKind::Limiting => (self.a * t + self.phase, self.a),
        }
    }

    /// Azimuth ϕ(t) − K on the continuous branch.
    fn azimuth_offset(&self, t: f64) -> f64 {
        let j = self.j;
        let theta = self.omega * t + 0.5 * self.phase;
        match self.kind {
            TrajectoryKind::Bounded => {
                if self.a == 0.0 {
                    return j / self.b * t;
                }
                // θ − nπ ∈ [−π/2, π/2); every crossing of π/2 adds sgn(J)·π
                let n = ((theta + FRAC_PI_2) / PI).floor();
                let reduced = theta - n * PI;
                let (s, c) = reduced.sin_cos();
                let sg = j.signum();
                (sg * self.omega * (self.b * s + self.a * c)).atan2(j.abs() * c) + sg * n * PI
            }
            TrajectoryKind::Unbounded => {
                (self.omega * (self.a - self.b) * theta.tanh() / j).atan()
            }
            TrajectoryKind::Limiting => (self.a * (self.a * t + self.phase) / j).atan(),
        }
    }

    /// Full polar state at time `t`.
    pub fn state(&self, t: f64) -> ClassicalState {
        if self.j == 0.0 {
            let (s, s_dot) = self.signed_radius(t);
            let (r, r_dot, phi) = if s >= 0.0 {
                (s, s_dot, self.k)
            } else {
                (-s, -s_dot, self.k + PI)
            };
            return ClassicalState::new(r, r_dot, phi, 0.0);
        }
        let u = self.r2(t);
        let u_dot = match self.kind {
            TrajectoryKind::Bounded => {
                2.0 * self.omega * self.a * (2.0 * self.omega * t + self.phase).cos()
            }
            TrajectoryKind::Unbounded => {
                2.0 * self.omega * self.a * (2.0 * self.omega * t + self.phase).sinh()
            }
            TrajectoryKind::Limiting => 2.0 * self.a * (self.a * t + self.phase),
        };
        let r = u.sqrt();
        ClassicalState::new(r, 0.5 * u_dot / r, self.k + self.azimuth_offset(t), self.j)
    }

    /// Cartesian position at time `t`.
    pub fn position(&self, t: f64) -> (f64, f64) {
        self.state(t).cartesian()
    }
}

/// Phase φ and constant K reproducing the initial data (r0, sign ṙ0, ϕ0) at t = 0.
///
/// Only the sign of `r_dot0` is used; zero counts as outward. A circular orbit
/// reports φ = 0.
pub fn phase_from_initial(
    params: &ModelParams,
    j: f64,
    e: f64,
    r0: f64,
    r_dot0: f64,
    phi0: f64,
) -> Result<(f64, f64)> {
    let template = trajectory_for(params, j, e, 0.0, 0.0)?;
    let u0 = r0 * r0;
    let (lo, hi) = template.r2_range();
    let scale = if hi.is_finite() { hi.abs() } else { lo.abs() };
    let slack = RANGE_TOLERANCE * scale.max(1.0);
    if !(u0 >= lo - slack && u0 <= hi + slack) {
        return Err(Error::OutOfRange(format!(
            "r0^2={u0} outside [{lo}, {hi}] for this orbit"
        )));
    }
    let outward = r_dot0 >= 0.0;
    let (a, b) = (template.a, template.b);
    let phase = match template.kind {
        TrajectoryKind::Bounded => {
            if a == 0.0 {
                0.0
            } else {
                let s = ((u0 - b) / a).clamp(-1.0, 1.0);
                let c = (1.0 - s * s).sqrt();
                s.atan2(if outward { c } else { -c }).rem_euclid(TAU)
            }
        }
        TrajectoryKind::Unbounded => {
            let ch = ((u0 - b) / a).max(1.0);
            let x = ch.acosh();
            if outward {
                x
            } else {
                -x
            }
        }
        TrajectoryKind::Limiting => {
            let x = (u0 - b).max(0.0).sqrt();
            if outward {
                x
            } else {
                -x
            }
        }
    };
    let placed = ClosedFormTrajectory {
        phase,
        k: 0.0,
        ..template
    };
    let k = phi0 - placed.state(0.0).phi;
    Ok((phase, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{energy_of_state, v_eff, v_eff_extremum};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(lambda: f64, alpha: f64) -> ModelParams {
        ModelParams::new(lambda, alpha).unwrap()
    }

    /// Roots u = r² of V_eff(r) = E, i.e. of α²u² + J²(1+λu) = 2E u(1+λu).
    fn turning_points(m: &ModelParams, j: f64, e: f64) -> (f64, f64) {
        let (l, a) = (m.lambda(), m.alpha());
        let qa = a * a - 2.0 * e * l;
        let qb = j * j * l - 2.0 * e;
        let qc = j * j;
        let d = (qb * qb - 4.0 * qa * qc).sqrt();
        let (x1, x2) = ((-qb - d) / (2.0 * qa), (-qb + d) / (2.0 * qa));
        (x1.min(x2), x1.max(x2))
    }

    #[test]
    fn bounded_hyperbolic_example() {
        let m = p(1.0, 3.0);
        let tr = bounded_trajectory(&m, 1.0, 3.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(tr.omega, 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(tr.a, 13f64.sqrt() / 6.0, max_relative = 1e-14);
        assert_relative_eq!(tr.b, 5.0 / 6.0, max_relative = 1e-14);
        // 3u² − 5u + 1 = 0
        let d = 13f64.sqrt();
        let (u1, u2) = ((5.0 - d) / 6.0, (5.0 + d) / 6.0);
        assert_relative_eq!(tr.b - tr.a, u1, max_relative = 1e-13);
        assert_relative_eq!(tr.b + tr.a, u2, max_relative = 1e-13);
        let (t1, t2) = turning_points(&m, 1.0, 3.0);
        assert_relative_eq!(t1, u1, max_relative = 1e-13);
        assert_relative_eq!(t2, u2, max_relative = 1e-13);
    }

    #[test]
    fn bounded_sphere_example() {
        let m = p(-1.0, 2.0);
        let tr = bounded_trajectory(&m, 1.0, 3.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(tr.omega, 10f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(tr.a, 0.15, max_relative = 1e-13);
        assert_relative_eq!(tr.b, 0.35, max_relative = 1e-13);
        assert!(tr.b - tr.a > 0.0 && tr.b + tr.a < 1.0);
    }

    #[test]
    fn circular_orbit() {
        let m = p(1.0, 3.0);
        let tr = bounded_trajectory(&m, 1.5, 3.375, 1.3, 0.2).unwrap();
        assert_eq!(tr.a, 0.0);
        assert_relative_eq!(tr.b, 1.0, max_relative = 1e-15);
        assert_eq!(tr.phase, 0.0);
        let r_min = v_eff_extremum(&m, 1.5).unwrap().r_min.unwrap();
        assert!((tr.b.sqrt() - r_min).abs() < 1e-12);
        for i in 0..50 {
            let t = 0.37 * i as f64;
            assert_eq!(tr.r2(t), tr.b);
            let s = tr.state(t);
            assert!((s.phi - (0.2 + 1.5 * t)).abs() < 1e-12);
        }
        assert_eq!(tr.radial_period(), None);
    }

    #[test]
    fn zero_angular_momentum_relations() {
        let m = p(1.0, 3.0);
        let b = bounded_trajectory(&m, 0.0, 2.0, 0.4, 0.0).unwrap();
        assert_eq!(b.a, b.b);
        let s = bounded_trajectory(&p(-1.5, 2.0), 0.0, 7.0, 0.4, 0.0).unwrap();
        assert_eq!(s.a, s.b);
        let u = unbounded_trajectory(&m, 0.0, 7.0, 0.4, 0.0).unwrap();
        assert_eq!(u.a, -u.b);
        let l = limiting_trajectory(&m, 0.0, 0.4, 0.0).unwrap();
        assert_eq!(l.b, 0.0);
    }

    #[test]
    fn unbounded_example() {
        let m = p(1.0, 3.0);
        let tr = unbounded_trajectory(&m, 1.0, 6.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(tr.omega, 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(tr.a, 133f64.sqrt() / 6.0, max_relative = 1e-14);
        assert_relative_eq!(tr.b, -11.0 / 6.0, max_relative = 1e-14);
        assert!(tr.a + tr.b > 0.088 && tr.a + tr.b < 0.089);
        let pericenter = (tr.a + tr.b).sqrt();
        assert_relative_eq!(v_eff(&m, 1.0, pericenter).unwrap(), 6.0, max_relative = 1e-10);
    }

    #[test]
    fn unbounded_rejected_on_sphere() {
        assert!(matches!(
            unbounded_trajectory(&p(-1.0, 2.0), 1.0, 100.0, 0.0, 0.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            unbounded_trajectory(&p(1.0, 3.0), 1.0, 3.0, 0.0, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn limiting_example() {
        let m = p(1.0, 3.0);
        let tr = limiting_trajectory(&m, 1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(tr.a, 8f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(tr.b, 0.125, max_relative = 1e-15);
        assert_eq!(tr.r2(0.0), 0.125);
        assert!(limiting_trajectory(&m, 3.0, 0.0, 0.0).is_err());
        assert!(limiting_trajectory(&p(-1.0, 3.0), 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn eval_r2_examples() {
        let m = p(1.0, 3.0);
        let tr = bounded_trajectory(&m, 1.0, 3.0, 0.0, 0.0).unwrap();
        let t = FRAC_PI_2 / (2.0 * tr.omega);
        assert_relative_eq!(eval_r2(&tr, t), 5.0 / 6.0 + 13f64.sqrt() / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn bounded_azimuth_at_origin_of_time() {
        let m = p(1.0, 3.0);
        let tr = bounded_trajectory(&m, 1.0, 3.0, 0.0, 0.0).unwrap();
        let phi = tr.state(0.0).phi;
        assert_relative_eq!(phi.tan(), 3f64.sqrt() * 13f64.sqrt() / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn line_orbits_keep_azimuth_on_the_line() {
        let m = p(1.0, 3.0);
        for tr in [
            bounded_trajectory(&m, 0.0, 2.0, 0.3, 0.7).unwrap(),
            unbounded_trajectory(&m, 0.0, 6.0, -1.0, 0.7).unwrap(),
            limiting_trajectory(&m, 0.0, -0.5, 0.7).unwrap(),
        ] {
            let mut saw_flip = false;
            for i in 0..400 {
                let t = 0.01 * i as f64;
                let s = tr.state(t);
                let d = (s.phi - 0.7).rem_euclid(PI);
                assert!(d.abs() < 1e-14 || (PI - d).abs() < 1e-14);
                saw_flip |= s.phi != 0.7;
                if s.r > 1e-6 {
                    let e = energy_of_state(&m, &s).unwrap();
                    assert_relative_eq!(e, tr.energy, max_relative = 1e-10);
                }
            }
            assert!(saw_flip);
            let s0 = tr.state(0.0);
            if tr.signed_radius(0.0).0 >= 0.0 {
                assert_eq!(s0.phi, 0.7);
            }
        }
    }

    #[test]
    fn phase_from_initial_examples() {
        let m = p(1.0, 3.0);
        let tr = bounded_trajectory(&m, 1.0, 3.0, 0.0, 0.0).unwrap();
        // squaring √(B+A) perturbs sin φ = 1 by an ulp, i.e. φ by ~√ε
        for sign in [-1.0, 1.0] {
            let r0 = (tr.b + tr.a).sqrt();
            let (phase, k) = phase_from_initial(&m, 1.0, 3.0, r0, sign, 0.0).unwrap();
            assert!((phase - FRAC_PI_2).abs() < 1e-7);
            let back = bounded_trajectory(&m, 1.0, 3.0, phase, k).unwrap().state(0.0);
            assert!((back.r - r0).abs() < 1e-10);
        }
        let (phase, _) = phase_from_initial(&m, 1.0, 3.0, tr.b.sqrt(), 1.0, 0.0).unwrap();
        assert!(phase.min(TAU - phase) < 1e-15);
        assert!(matches!(
            phase_from_initial(&m, 1.0, 3.0, (tr.b + tr.a + 0.1).sqrt(), 1.0, 0.0),
            Err(Error::OutOfRange(_))
        ));
        let (phase, _) = phase_from_initial(&m, 1.5, 3.375, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(phase, 0.0);
    }

    fn reproduces_initial(m: ModelParams, j: f64, e: f64, r0: f64, rd: f64, phi0: f64) {
        let (phase, k) = phase_from_initial(&m, j, e, r0, rd, phi0).unwrap();
        let tr = trajectory_for(&m, j, e, phase, k).unwrap();
        let s = tr.state(0.0);
        assert!((s.r - r0).abs() < 1e-10, "r {} vs {}", s.r, r0);
        assert!((s.phi - phi0).abs() < 1e-10);
        if s.r_dot.abs() > 1e-6 {
            assert_eq!(s.r_dot > 0.0, rd >= 0.0);
        }
    }

    #[test]
    fn phase_from_initial_round_trips() {
        let m = p(1.0, 3.0);
        for &rd in &[1.0, -1.0] {
            reproduces_initial(m, 1.0, 3.0, 0.7, rd, 0.3);
            reproduces_initial(m, -1.0, 3.0, 0.7, rd, -2.0);
            reproduces_initial(m, 1.0, 6.0, 1.3, rd, 1.0);
            reproduces_initial(m, 1.0, 4.5, 1.3, rd, 1.0);
            reproduces_initial(m, 0.0, 3.0, 0.6, rd, 0.5);
            reproduces_initial(m, 0.0, 6.0, 0.6, rd, 0.5);
            reproduces_initial(m, 0.0, 4.5, 0.6, rd, 0.5);
            reproduces_initial(p(-1.0, 2.0), 1.0, 3.0, 0.5, rd, 4.0);
        }
    }

    fn bounded_case() -> impl Strategy<Value = (ModelParams, f64, f64, f64)> {
        (0.1f64..2.0, 0.5f64..4.0, -0.9f64..0.9, 0.02f64..0.98, 0.0f64..TAU, any::<bool>())
            .prop_map(|(l, a, jf, ef, ph, sphere)| {
                let lambda = if sphere { -l } else { l };
                let m = p(lambda, a);
                let j = if sphere { 3.0 * jf } else { jf * a / lambda };
                let vmin = v_eff_extremum(&m, j).unwrap().v_min;
                let top = if sphere { vmin + 20.0 } else { m.threshold_energy() };
                (m, j, vmin + ef * (top - vmin), ph)
            })
    }

    proptest! {
        #[test]
        fn bounded_invariants((m, j, e, ph) in bounded_case(), t in -20.0f64..20.0) {
            let tr = bounded_trajectory(&m, j, e, ph, 0.0).unwrap();
            let period = PI / tr.omega;
            prop_assert!((tr.r2(t + period) - tr.r2(t)).abs() < 1e-12 * tr.b.max(1.0));
            prop_assert!((tr.energy_from_omega() - e).abs() <= 1e-12 * e.abs().max(1.0));
            let (lo, hi) = tr.r2_range();
            prop_assert!(lo >= -1e-15 && hi < m.radial_domain().upper.powi(2));
            if j != 0.0 {
                prop_assert!(lo > 0.0);
                let v_lo = v_eff(&m, j, lo.sqrt()).unwrap();
                let v_hi = v_eff(&m, j, hi.sqrt()).unwrap();
                prop_assert!((v_lo - e).abs() <= 1e-10 * e);
                prop_assert!((v_hi - e).abs() <= 1e-10 * e);
                let s = tr.state(t);
                let en = energy_of_state(&m, &s).unwrap();
                prop_assert!((en - e).abs() <= 1e-10 * e);
            }
        }

        #[test]
        fn azimuth_derivative_matches_angular_momentum((m, j, e, ph) in bounded_case(), t in -10.0f64..10.0) {
            prop_assume!(j.abs() > 1e-3);
            let tr = bounded_trajectory(&m, j, e, ph, 0.4).unwrap();
            let h = 1e-5;
            let d = (tr.state(t + h).phi - tr.state(t - h).phi) / (2.0 * h);
            let exact = j / tr.r2(t);
            prop_assert!((d - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{d} vs {exact}");
        }

        #[test]
        fn unwrapped_azimuth_is_monotone((m, j, e, ph) in bounded_case()) {
            prop_assume!(j.abs() > 1e-3);
            let tr = bounded_trajectory(&m, j.abs(), e, ph, 0.0).unwrap();
            let mut prev = tr.state(-5.0).phi;
            for i in 1..2000 {
                let t = -5.0 + 0.005 * i as f64;
                let phi = tr.state(t).phi;
                prop_assert!(phi > prev);
                prev = phi;
            }
        }

        #[test]
        fn unbounded_invariants(a in 0.5f64..4.0, l in 0.1f64..2.0, jf in -2.0f64..2.0, extra in 0.01f64..20.0, t in -3.0f64..3.0) {
            let m = p(l, a);
            let e = m.threshold_energy() + extra;
            let tr = unbounded_trajectory(&m, jf, e, 0.3, 0.0).unwrap();
            prop_assert!((tr.energy_from_omega() - e).abs() <= 1e-12 * e);
            if jf != 0.0 {
                let (peri, _) = tr.r2_range();
                prop_assert!(peri > 0.0);
                prop_assert!((peri - (tr.a + tr.b)).abs() <= 1e-14 * tr.a);
                let v = v_eff(&m, jf, peri.sqrt()).unwrap();
                prop_assert!((v - e).abs() <= 1e-10 * e);
                let s = tr.state(t);
                prop_assert!((energy_of_state(&m, &s).unwrap() - e).abs() <= 1e-10 * e);
                let h = 1e-5;
                let d = (tr.state(t + h).phi - tr.state(t - h).phi) / (2.0 * h);
                prop_assert!((d - jf / tr.r2(t)).abs() <= 1e-6 * (jf / tr.r2(t)).abs().max(1.0));
            }
        }
    }
}
