//! Self-checks run by `curvosc verify`.
//!
//! Each check exercises one module against the examples and properties it
//! must satisfy. Random draws come from a ChaCha stream seeded by the caller.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bridge::{cartesian_invariants, verify_bridge, CartesianAmplitudes};
use crate::closed_form::{phase_from_initial, trajectory_for};
use crate::error::Result;
use crate::model::{classify, motion_constants, v_eff_extremum, ClassicalState, ModelParams, Regime};
use crate::ode::{compare_with_closed_form, integrate, measure_period, IntegrationConfig};
use crate::quantum::{
    energy, energy_from_quantum_numbers, energy_levels, inner_product, ode_residual, partitions,
    radial_wavefunction, QuantumParams,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn run(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Minimizes V_eff by bisection on dV/dr = α²r/(1+λr²)² − J²/r³ over the
/// bracket where it changes sign.
fn numeric_minimum(params: &ModelParams, j: f64) -> (f64, f64) {
    let (l, a) = (params.lambda(), params.alpha());
    let dv = |r: f64| a * a * r / (1.0 + l * r * r).powi(2) - j * j / r.powi(3);
    let hi_end = if l < 0.0 { 1.0 / (-l).sqrt() } else { 1e3 };
    let (mut lo, mut hi) = (1e-6 * hi_end, (1.0 - 1e-9) * hi_end);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if dv(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let r = 0.5 * (lo + hi);
    let v = a * a * r * r / (2.0 * (1.0 + l * r * r)) + j * j / (2.0 * r * r);
    (r, v)
}

fn check_extremum() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (lambda, alpha, j) in [(1.0, 3.0, 1.0), (-1.0, 2.0, 1.0)] {
        let p = ModelParams::new(lambda, alpha)?;
        let ext = v_eff_extremum(&p, j).expect("minimum exists");
        let (r, v) = numeric_minimum(&p, j);
        worst = worst.max((ext.r_min.unwrap_or(f64::NAN) - r).abs());
        worst = worst.max((ext.v_min - v).abs());
        worst = worst.max((ext.v_min - 2.5).abs());
    }
    Ok((worst <= 1e-9, format!("max deviation {worst:.3e}")))
}

fn check_cutoff() -> Result<(bool, String)> {
    let p = ModelParams::new(1.0, 3.0)?;
    let energies: Vec<f64> = (0..=400).map(|i| 0.025 * i as f64).collect();
    let high_j_bounded = [3.0, 3.5, 5.0, -3.0]
        .iter()
        .any(|&j| energies.iter().any(|&e| classify(&p, j, e) == Regime::Bounded));
    let band: Vec<f64> = energies
        .iter()
        .copied()
        .filter(|&e| classify(&p, 1.0, e) == Regime::Bounded)
        .collect();
    let ok_band = band.first().is_some_and(|&e| e > 2.5 - 0.03)
        && band.last().is_some_and(|&e| e < 4.5)
        && classify(&p, 1.0, 2.6) == Regime::Bounded
        && classify(&p, 1.0, 4.4) == Regime::Bounded
        && classify(&p, 1.0, 4.6) != Regime::Bounded;
    Ok((
        !high_j_bounded && ok_band,
        format!("bounded band for J=1 spans {} grid energies", band.len()),
    ))
}

fn placed_run(
    lambda: f64,
    alpha: f64,
    j: f64,
    e: f64,
    t1: f64,
) -> Result<(crate::ClosedFormTrajectory, crate::ode::SampledTrajectory)> {
    let p = ModelParams::new(lambda, alpha)?;
    let tmpl = trajectory_for(&p, j, e, 0.0, 0.0)?;
    let (lo, hi) = tmpl.r2_range();
    let r0 = if hi.is_finite() { hi.sqrt() } else { lo.sqrt() };
    let (phase, k) = phase_from_initial(&p, j, e, r0, 0.0, 0.0)?;
    let traj = trajectory_for(&p, j, e, phase, k)?;
    let s0 = traj.state(0.0);
    let run = integrate(&p, j, &s0, &IntegrationConfig::new(1e-10, (0.0, t1), 2001))?;
    Ok((traj, run))
}

fn check_integrator() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (lambda, alpha, j, e, t1) in [
        (1.0, 3.0, 1.0, 3.0, 10.0),
        (-1.0, 2.0, 1.0, 3.0, 10.0),
        (1.0, 3.0, 1.0, 6.0, 3.0),
    ] {
        let (traj, run) = placed_run(lambda, alpha, j, e, t1)?;
        let rep = compare_with_closed_form(&traj, &run)?;
        ok &= rep.max_r2_err <= 1e-6 && run.energy_drift <= 1e-8;
        parts.push(format!("r2 {:.1e} drift {:.1e}", rep.max_r2_err, run.energy_drift));
    }
    Ok((ok, parts.join("; ")))
}

fn check_period() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (lambda, alpha) in [(1.0, 3.0), (-1.0, 2.0)] {
        let (traj, run) = placed_run(lambda, alpha, 1.0, 3.0, 10.0)?;
        let expected = PI / traj.omega;
        worst = worst.max((measure_period(&run)? - expected).abs() / expected);
    }
    Ok((worst <= 1e-4, format!("max relative deviation {worst:.3e}")))
}

fn check_circular() -> Result<(bool, String)> {
    let amps = CartesianAmplitudes::Trig {
        a1: 1.0,
        a2: 1.0,
        phi1: FRAC_PI_2,
        phi2: 0.0,
        lambda: 1.0,
    };
    let tr = crate::bridge::bridge_bounded(&amps, 3.0)?;
    let p = ModelParams::new(1.0, 3.0)?;
    let run = integrate(
        &p,
        1.5,
        &ClassicalState::new(1.0, 0.0, 0.0, 1.5),
        &IntegrationConfig::new(1e-12, (0.0, 20.0), 2001),
    )?;
    let dev = run.states.iter().map(|s| (s.r - 1.0).abs()).fold(0.0, f64::max);
    let ok = tr.a.abs() <= 1e-12 && (tr.b - 1.0).abs() <= 1e-12 && dev <= 1e-10;
    Ok((ok, format!("A={:.1e} B-1={:.1e} |r-1|={dev:.1e}", tr.a, tr.b - 1.0)))
}

/// A random valid cartesian orbit of the given family with its α.
pub fn random_amplitudes(rng: &mut impl Rng, family: usize) -> (CartesianAmplitudes, f64) {
    loop {
        let a1 = rng.gen_range(0.2..2.0);
        let a2 = rng.gen_range(0.2..2.0);
        let alpha = rng.gen_range(0.5..3.0);
        let amps = match family % 3 {
            0 => {
                let mag = rng.gen_range(0.1..2.0);
                CartesianAmplitudes::Trig {
                    a1,
                    a2,
                    phi1: rng.gen_range(0.0..TAU),
                    phi2: rng.gen_range(0.0..TAU),
                    lambda: if rng.gen_bool(0.5) { mag } else { -mag },
                }
            }
            1 => CartesianAmplitudes::Hyper {
                a1,
                a2,
                phi1: rng.gen_range(-1.5..1.5),
                phi2: rng.gen_range(-1.5..1.5),
                lambda: rng.gen_range(0.1..2.0),
            },
            _ => {
                let amps = CartesianAmplitudes::Linear {
                    a1: a1 - 1.1,
                    a2: a2 - 1.1,
                    b1: rng.gen_range(-2.0..2.0),
                    b2: rng.gen_range(-2.0..2.0),
                    lambda: rng.gen_range(0.1..2.0),
                };
                let Some(alpha) = amps.linear_alpha() else {
                    continue;
                };
                return (amps, alpha);
            }
        };
        if cartesian_invariants(&amps, alpha).is_ok() {
            return (amps, alpha);
        }
    }
}

/// Sample window per family: several periods for trig orbits, a stretch
/// around the pericenter otherwise.
pub fn bridge_window(amps: &CartesianAmplitudes) -> (f64, f64) {
    match amps {
        CartesianAmplitudes::Trig { .. } => (0.0, 20.0),
        CartesianAmplitudes::Hyper { .. } => (-2.0, 2.0),
        CartesianAmplitudes::Linear { .. } => (-10.0, 10.0),
    }
}

fn check_bridge(seed: u64) -> Result<(bool, String)> {
    let worked = CartesianAmplitudes::Trig {
        a1: 2.0,
        a2: 1.0,
        phi1: FRAC_PI_2,
        phi2: 0.0,
        lambda: 1.0,
    };
    let mut cases = vec![(worked, 10f64.sqrt())];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cases.extend((0..100).map(|i| random_amplitudes(&mut rng, i)));
    let (mut r2, mut ang, mut om) = (0.0f64, 0.0f64, 0.0f64);
    for (amps, alpha) in &cases {
        let rep = verify_bridge(amps, *alpha, 1000, bridge_window(amps))?;
        r2 = r2.max(rep.max_r2_dev);
        ang = ang.max(rep.max_angle_dev);
        om = om.max(rep.omega_rel_dev);
    }
    Ok((
        r2 <= 1e-8 && ang <= 1e-8 && om <= 1e-12,
        format!("{} orbits: r2 {r2:.1e} angle {ang:.1e} omega {om:.1e}", cases.len()),
    ))
}

fn admissible(qp: &QuantumParams, n_top: u32) -> Vec<(u32, i32)> {
    (0..=n_top)
        .filter(|&n| qp.is_admissible(n))
        .flat_map(partitions)
        .collect()
}

fn check_residuals() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (lambda, beta) in [(-1.0, 1.0), (1.0, 5.2)] {
        let qp = QuantumParams::new(lambda, beta)?;
        let (lo, hi) = if lambda < 0.0 {
            (1e-3 * qp.radial_upper(), 0.999 * qp.radial_upper())
        } else {
            (1e-3, 1e2)
        };
        for (n_r, m) in admissible(&qp, 6) {
            let s = radial_wavefunction(&qp, n_r, m)?;
            count += 1;
            for i in 0..200 {
                let r = lo * (hi / lo).powf(i as f64 / 199.0);
                worst = worst.max(ode_residual(&qp, &s, r).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("{count} states, max residual {worst:.3e}")))
}

fn check_spectrum() -> Result<(bool, String)> {
    let mut ok = true;
    for (lambda, beta) in [(-1.0, 1.0), (1.0, 5.2), (0.5, 9.0)] {
        let qp = QuantumParams::new(lambda, beta)?;
        for n in 0..=6 {
            let parts = partitions(n);
            ok &= parts.len() as u32 == n + 1;
            ok &= parts.iter().all(|&(n_r, m)| {
                let e = energy_from_quantum_numbers(&qp, n_r, m);
                (e - energy(&qp, n)).abs() <= 1e-12 * e.abs().max(1.0)
            });
        }
        if lambda < 0.0 || qp.n_max().unwrap_or(0) >= 0 {
            for (n_r, m) in admissible(&qp, 6) {
                let s = radial_wavefunction(&qp, n_r, m)?;
                let r_end = if lambda < 0.0 { qp.radial_upper() } else { 50.0 };
                ok &= s.count_nodes(r_end, 10_000) == n_r as usize;
            }
        }
    }
    let hyp = QuantumParams::new(1.0, 5.2)?;
    ok &= hyp.n_max() == Some(4) && energy_levels(&hyp, None)?.len() == 5;
    Ok((ok, format!("n_max(1, 5.2) = {:?}", hyp.n_max())))
}

fn check_gram() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (lambda, beta) in [(-1.0, 1.0), (1.0, 12.3)] {
        let qp = QuantumParams::new(lambda, beta)?;
        for m in [0, 1] {
            let states = (0..5)
                .map(|n_r| radial_wavefunction(&qp, n_r, m))
                .collect::<Result<Vec<_>>>()?;
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((inner_product(&qp, a, b)? - target).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-8, format!("max |G - I| {worst:.3e}")))
}

fn check_flat_limit() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for lambda in [1e-6, -1e-6] {
        let qp = QuantumParams::new(lambda, 2.0)?;
        for n in 0..=6 {
            worst = worst.max((energy(&qp, n) - 2.0 * (n as f64 + 1.0)).abs());
        }
    }
    Ok((worst <= 1e-4, format!("max deviation {worst:.3e}")))
}

fn check_regimes() -> Result<(bool, String)> {
    let p = ModelParams::new(1.0, 3.0)?;
    let mc = motion_constants(&p, 1.0, 3.0);
    let ok = mc.regime == Regime::Bounded
        && (mc.omega - 3f64.sqrt()).abs() < 1e-14
        && classify(&p, 1.0, 6.0) == Regime::Unbounded
        && classify(&p, 1.0, 4.5) == Regime::Limiting
        && classify(&p, 1.0, 2.0) == Regime::Forbidden;
    Ok((ok, format!("omega(1,3,1,3) = {:.15}", mc.omega)))
}

/// All checks; `seed` drives the random bridge draws.
pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        run("v_eff minima", check_extremum),
        run("regime classification", check_regimes),
        run("bounded cutoff", check_cutoff),
        run("closed form vs integrator", check_integrator),
        run("radial period", check_period),
        run("circular orbit", check_circular),
        run("cartesian bridge", || check_bridge(seed)),
        run("radial ODE residuals", check_residuals),
        run("spectrum structure", check_spectrum),
        run("orthonormality", check_gram),
        run("flat limit", check_flat_limit),
    ]
}
