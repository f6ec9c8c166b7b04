//! Direct numerical integration of the polar equations of motion
//!
//! ```text
//! r̈ = λrṙ²/(1+λr²) − α²r/(1+λr²) + J²(1+λr²)/r³,   ϕ̇ = J/r²
//! ```
//!
//! used as an independent oracle for the closed forms. Orbits with J = 0 are
//! integrated along their line through the origin with a signed coordinate,
//! so the passage through r = 0 is regular.

mod dopri5;

use serde::{Deserialize, Serialize};

use crate::bridge::wrap_angle;
use crate::closed_form::ClosedFormTrajectory;
use crate::error::{Error, Result};
use crate::model::{energy_of_state, ClassicalState, ModelParams};

use dopri5::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub t_span: (f64, f64),
    /// Number of equally spaced output times, endpoints included.
    pub samples: usize,
}

impl IntegrationConfig {
    /// Equal relative and absolute tolerance, unrestricted step.
    pub fn new(tol: f64, t_span: (f64, f64), samples: usize) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol,
            max_step: f64::INFINITY,
            t_span,
            samples,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok_tol = |x: f64| x > 0.0 && x <= 1e-2;
        if !ok_tol(self.rel_tol) || !ok_tol(self.abs_tol) {
            return Err(Error::InvalidParams(format!(
                "tolerances must lie in (0, 1e-2], got rel={} abs={}",
                self.rel_tol, self.abs_tol
            )));
        }
        let (t0, t1) = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidParams(format!("need t1 > t0, got ({t0}, {t1})")));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParams("max_step must be positive".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidParams("need at least 2 samples".into()));
        }
        Ok(())
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let (t0, t1) = self.t_span;
        let n = self.samples - 1;
        (0..=n)
            .map(|i| if i == n { t1 } else { t0 + (t1 - t0) * i as f64 / n as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTrajectory {
    pub params: ModelParams,
    pub j: f64,
    /// Energy of the initial state.
    pub energy: f64,
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
    /// |E(t) − E(0)| / |E(0)| at each sample.
    pub energy_rel: Vec<f64>,
    /// Largest entry of `energy_rel`.
    pub energy_drift: f64,
}

/// Right-hand side (ṙ, r̈) of the radial equation.
pub fn polar_rhs(params: &ModelParams, j: f64, r: f64, r_dot: f64) -> Result<(f64, f64)> {
    params.radial_domain().check(r)?;
    Ok((r_dot, radial_accel(params, j, r, r_dot)))
}

fn radial_accel(params: &ModelParams, j: f64, r: f64, r_dot: f64) -> f64 {
    let lambda = params.lambda();
    let a2 = params.alpha() * params.alpha();
    let w = params.metric_factor(r);
    (lambda * r * r_dot * r_dot - a2 * r) / w + j * j * w / (r * r * r)
}

pub fn integrate(
    params: &ModelParams,
    j: f64,
    state0: &ClassicalState,
    config: &IntegrationConfig,
) -> Result<SampledTrajectory> {
    config.validate()?;
    let domain = params.radial_domain();
    domain.check(state0.r)?;
    let energy = energy_of_state(params, state0)?;
    if !energy.is_finite() {
        return Err(Error::InvalidParams("initial energy is not finite".into()));
    }
    let tol = Tolerances {
        rtol: config.rel_tol,
        atol: config.abs_tol,
        max_step: config.max_step,
    };
    let times = config.sample_times();
    let t0 = config.t_span.0;

    let states: Vec<ClassicalState> = if j == 0.0 {
        let rhs = |_t: f64, y: &[f64; 2]| {
            let s = y[0];
            (s.abs() < domain.upper).then(|| [y[1], radial_accel(params, 0.0, s, y[1])])
        };
        let (ys, _) = dopri5::integrate(rhs, t0, [state0.r, state0.r_dot], &times, &tol)?;
        ys.iter()
            .map(|y| {
                if y[0] >= 0.0 {
                    ClassicalState::new(y[0], y[1], state0.phi, 0.0)
                } else {
                    ClassicalState::new(-y[0], -y[1], state0.phi + std::f64::consts::PI, 0.0)
                }
            })
            .collect()
    } else {
        let rhs = |_t: f64, y: &[f64; 3]| {
            let r = y[0];
            domain
                .contains(r)
                .then(|| [y[1], radial_accel(params, j, r, y[1]), j / (r * r)])
        };
        let (ys, _) = dopri5::integrate(
            rhs,
            t0,
            [state0.r, state0.r_dot, state0.phi],
            &times,
            &tol,
        )?;
        ys.iter()
            .map(|y| ClassicalState::new(y[0], y[1], y[2], j))
            .collect()
    };

    let mut energy_rel = Vec::with_capacity(states.len());
    for s in &states {
        let e = energy_of_state(params, s)?;
        energy_rel.push((e - energy).abs() / energy.abs());
    }
    let energy_drift = energy_rel.iter().copied().fold(0.0, f64::max);
    Ok(SampledTrajectory {
        params: *params,
        j,
        energy,
        times,
        states,
        energy_rel,
        energy_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// max |r²_num − r²_closed| / max(1, r²_closed).
    pub max_r2_err: f64,
    /// max wrapped azimuth difference.
    pub max_phi_err: f64,
}

pub fn compare_with_closed_form(
    traj: &ClosedFormTrajectory,
    sampled: &SampledTrajectory,
) -> Result<ComparisonReport> {
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    if !same(traj.params.lambda(), sampled.params.lambda())
        || !same(traj.params.alpha(), sampled.params.alpha())
    {
        return Err(Error::Contract("model parameters differ".into()));
    }
    if !same(traj.j, sampled.j) {
        return Err(Error::Contract(format!(
            "angular momentum differs: {} vs {}",
            traj.j, sampled.j
        )));
    }
    if (traj.energy - sampled.energy).abs() > 1e-9 * traj.energy.abs().max(1.0) {
        return Err(Error::Contract(format!(
            "energy differs: {} vs {}",
            traj.energy, sampled.energy
        )));
    }
    let mut rep = ComparisonReport {
        max_r2_err: 0.0,
        max_phi_err: 0.0,
    };
    for (t, s) in sampled.times.iter().zip(&sampled.states) {
        let closed = traj.state(*t);
        let u = traj.r2(*t);
        rep.max_r2_err = rep.max_r2_err.max((s.r * s.r - u).abs() / u.max(1.0));
        rep.max_phi_err = rep.max_phi_err.max(wrap_angle(s.phi - closed.phi).abs());
    }
    Ok(rep)
}

/// Radial period from upward mid-level crossings of r²(t), each refined on
/// the cubic Hermite interpolant built from r² and d(r²)/dt = 2rṙ.
pub fn measure_period(sampled: &SampledTrajectory) -> Result<f64> {
    let u: Vec<f64> = sampled.states.iter().map(|s| s.r * s.r).collect();
    let du: Vec<f64> = sampled.states.iter().map(|s| 2.0 * s.r * s.r_dot).collect();
    let (lo, hi) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !(hi - lo > 1e-9 * hi.abs().max(1.0)) {
        return Err(Error::DetectionFailure("r^2(t) is flat".into()));
    }
    let level = 0.5 * (lo + hi);
    let mut crossings = Vec::new();
    for i in 0..u.len().saturating_sub(1) {
        if u[i] < level && u[i + 1] >= level {
            let (t0, t1) = (sampled.times[i], sampled.times[i + 1]);
            let dt = t1 - t0;
            let hermite = |x: f64| {
                let x2 = x * x;
                let x3 = x2 * x;
                (2.0 * x3 - 3.0 * x2 + 1.0) * u[i]
                    + (x3 - 2.0 * x2 + x) * dt * du[i]
                    + (-2.0 * x3 + 3.0 * x2) * u[i + 1]
                    + (x3 - x2) * dt * du[i + 1]
                    - level
            };
            let (mut a, mut b) = (0.0, 1.0);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if hermite(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            crossings.push(t0 + 0.5 * (a + b) * dt);
        }
    }
    if crossings.len() < 2 {
        return Err(Error::DetectionFailure(format!(
            "found {} upward crossing(s), need at least 2",
            crossings.len()
        )));
    }
    Ok((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}
