use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use curvosc_core::bridge::{bridge, verify_bridge, CartesianAmplitudes};
use curvosc_core::closed_form::{phase_from_initial, trajectory_for};
use curvosc_core::model::{energy_of_state, motion_constants, v_eff};
use curvosc_core::ode::{integrate, IntegrationConfig};
use curvosc_core::quantum::{
    energy_levels, ode_residual, partitions, radial_wavefunction, QuantumParams,
};
use curvosc_core::{verify, ClassicalState, ModelParams};

const TRAJECTORY_SCHEMA: &str = "# curvosc trajectory v1";
const POTENTIAL_SCHEMA: &str = "# curvosc potential v1";
const SPECTRUM_SCHEMA: &str = "# curvosc spectrum v1";
const WAVEFUNCTION_SCHEMA: &str = "# curvosc wavefunction v1";

/// Harmonic oscillator on the sphere (lambda < 0) and the hyperbolic plane (lambda > 0).
#[derive(Parser, Debug)]
#[command(name = "curvosc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Motion constants and regime for (lambda, alpha, J, E).
    #[command(allow_negative_numbers = true)]
    Classify(ClassicalArgs),
    /// Sample a trajectory started at a turning point.
    #[command(allow_negative_numbers = true)]
    Trajectory(TrajectoryArgs),
    /// Map a cartesian orbit to polar parameters and check the agreement.
    #[command(allow_negative_numbers = true)]
    Bridge(BridgeArgs),
    /// Bound-state energy levels.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Tabulate a normalized radial eigenfunction.
    #[command(allow_negative_numbers = true)]
    Wavefunction(WavefunctionArgs),
    /// Run the self-check suite.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Tabulate the effective potential for J = 0 and the given J.
    #[command(allow_negative_numbers = true)]
    Potential(PotentialArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(io::BufWriter::new(
                File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }
}

#[derive(Args, Debug)]
struct ClassicalArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long = "J")]
    j: f64,
    #[arg(long = "E")]
    e: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    #[command(flatten)]
    classical: ClassicalArgs,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 10.0)]
    t1: f64,
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    /// Integrator tolerance (relative and absolute).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Evaluate the closed form instead of integrating.
    #[arg(long)]
    closed_form: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Trig,
    Hyper,
    Linear,
}

#[derive(Args, Debug)]
struct BridgeArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    lambda: f64,
    /// Required for trig and hyper; implied by the amplitudes for linear.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    a1: f64,
    #[arg(long)]
    a2: f64,
    #[arg(long, default_value_t = 0.0)]
    phi1: f64,
    #[arg(long, default_value_t = 0.0)]
    phi2: f64,
    #[arg(long, default_value_t = 0.0)]
    b1: f64,
    #[arg(long, default_value_t = 0.0)]
    b2: f64,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 10.0)]
    t1: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    beta: f64,
    /// Number of levels; required when lambda < 0.
    #[arg(long)]
    levels: Option<u32>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct WavefunctionArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long = "n-r", default_value_t = 0)]
    n_r: u32,
    #[arg(long, default_value_t = 0)]
    m: i32,
    /// Largest radius tabulated when lambda > 0.
    #[arg(long, default_value_t = 10.0)]
    r_max: f64,
    #[arg(long, default_value_t = 501)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PotentialArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long = "J")]
    j: f64,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(out: &Output, schema: &str) -> Result<csv::Writer<Box<dyn Write>>> {
    let mut w = out.writer()?;
    writeln!(w, "{schema}")?;
    Ok(csv::Writer::from_writer(w))
}

fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        bail!("--samples must be at least 2");
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn classify(args: &ClassicalArgs) -> Result<()> {
    let p = ModelParams::new(args.lambda, args.alpha)?;
    let mc = motion_constants(&p, args.j, args.e);
    let mut w = args.output.writer()?;
    if args.output.format == Some(Format::Json) {
        writeln!(w, "{}", serde_json::to_string_pretty(&mc)?)?;
    } else {
        writeln!(w, "regime={}", mc.regime)?;
        for (k, v) in [
            ("C", mc.c),
            ("qa", mc.qa),
            ("qb", mc.qb),
            ("qc", mc.qc),
            ("delta", mc.delta),
            ("omega", mc.omega),
        ] {
            writeln!(w, "{k}={}", fmt(v))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct TrajectoryRow {
    t: f64,
    r: f64,
    r_dot: f64,
    phi: f64,
    x: f64,
    y: f64,
    energy_rel_drift: f64,
}

fn trajectory(args: &TrajectoryArgs) -> Result<()> {
    let c = &args.classical;
    check_samples(args.samples)?;
    let p = ModelParams::new(c.lambda, c.alpha)?;
    let template = trajectory_for(&p, c.j, c.e, 0.0, 0.0)?;
    let (lo, hi) = template.r2_range();
    let r0 = if hi.is_finite() { hi.sqrt() } else { lo.sqrt() };
    let (phase, k) = phase_from_initial(&p, c.j, c.e, r0, 0.0, 0.0)?;
    let closed = trajectory_for(&p, c.j, c.e, phase, k)?;
    // shift so the turning point sits at t0
    let at = |t: f64| closed.state(t - args.t0);

    let rows: Vec<(f64, ClassicalState, f64)> = if args.closed_form {
        let e0 = c.e;
        grid(args.t0, args.t1, args.samples)
            .into_iter()
            .map(|t| {
                let s = at(t);
                let e = energy_of_state(&p, &s).unwrap_or(f64::NAN);
                (t, s, (e - e0).abs() / e0.abs())
            })
            .collect()
    } else {
        let cfg = IntegrationConfig::new(args.tol, (args.t0, args.t1), args.samples);
        let run = integrate(&p, c.j, &at(args.t0), &cfg)?;
        run.times
            .iter()
            .zip(&run.states)
            .zip(&run.energy_rel)
            .map(|((t, s), d)| (*t, *s, *d))
            .collect()
    };

    let table: Vec<TrajectoryRow> = rows
        .iter()
        .map(|(t, s, d)| {
            let (x, y) = s.cartesian();
            TrajectoryRow {
                t: *t,
                r: s.r,
                r_dot: s.r_dot,
                phi: s.phi,
                x,
                y,
                energy_rel_drift: *d,
            }
        })
        .collect();
    if c.output.format == Some(Format::Json) {
        let mut w = c.output.writer()?;
        writeln!(w, "{}", serde_json::to_string(&table)?)?;
        return Ok(());
    }
    let mut w = csv_writer(&c.output, TRAJECTORY_SCHEMA)?;
    w.write_record(["t", "r", "r_dot", "phi", "x", "y", "energy_rel_drift"])?;
    for row in &table {
        w.write_record(
            [row.t, row.r, row.r_dot, row.phi, row.x, row.y, row.energy_rel_drift].map(fmt),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BridgeOutput {
    kind: String,
    alpha: f64,
    j: f64,
    energy: f64,
    a: f64,
    b: f64,
    omega: f64,
    phase: f64,
    k: f64,
    max_r2_dev: f64,
    max_angle_dev: f64,
    omega_rel_dev: f64,
    passed: bool,
}

const BRIDGE_TOLERANCE: f64 = 1e-8;

fn bridge_cmd(args: &BridgeArgs) -> Result<bool> {
    check_samples(args.samples)?;
    let amps = match args.family {
        Family::Trig => CartesianAmplitudes::Trig {
            a1: args.a1,
            a2: args.a2,
            phi1: args.phi1,
            phi2: args.phi2,
            lambda: args.lambda,
        },
        Family::Hyper => CartesianAmplitudes::Hyper {
            a1: args.a1,
            a2: args.a2,
            phi1: args.phi1,
            phi2: args.phi2,
            lambda: args.lambda,
        },
        Family::Linear => CartesianAmplitudes::Linear {
            a1: args.a1,
            a2: args.a2,
            b1: args.b1,
            b2: args.b2,
            lambda: args.lambda,
        },
    };
    let alpha = match (args.family, args.alpha) {
        (_, Some(a)) => a,
        (Family::Linear, None) => amps
            .linear_alpha()
            .context("linear orbits need lambda > 0")?,
        (_, None) => bail!("--alpha is required for the {:?} family", args.family),
    };
    let traj = bridge(&amps, alpha)?;
    let rep = verify_bridge(&amps, alpha, args.samples, (args.t0, args.t1))?;
    let passed = rep.max_r2_dev <= BRIDGE_TOLERANCE
        && rep.max_angle_dev <= BRIDGE_TOLERANCE
        && rep.omega_rel_dev <= 1e-12;
    let out = BridgeOutput {
        kind: format!("{:?}", traj.kind),
        alpha,
        j: traj.j,
        energy: traj.energy,
        a: traj.a,
        b: traj.b,
        omega: traj.omega,
        phase: traj.phase,
        k: traj.k,
        max_r2_dev: rep.max_r2_dev,
        max_angle_dev: rep.max_angle_dev,
        omega_rel_dev: rep.omega_rel_dev,
        passed,
    };
    let mut w = args.output.writer()?;
    if args.output.format == Some(Format::Json) {
        writeln!(w, "{}", serde_json::to_string_pretty(&out)?)?;
    } else {
        writeln!(w, "kind={}", out.kind)?;
        for (k, v) in [
            ("alpha", out.alpha),
            ("J", out.j),
            ("E", out.energy),
            ("A", out.a),
            ("B", out.b),
            ("omega", out.omega),
            ("phase", out.phase),
            ("K", out.k),
            ("max_r2_dev", out.max_r2_dev),
            ("max_angle_dev", out.max_angle_dev),
            ("omega_rel_dev", out.omega_rel_dev),
        ] {
            writeln!(w, "{k}={}", fmt(v))?;
        }
        writeln!(w, "passed={passed}")?;
    }
    Ok(passed)
}

#[derive(Serialize)]
struct StateLabel {
    n_r: u32,
    m: i32,
}

#[derive(Serialize)]
struct LevelOut {
    n: u32,
    #[serde(rename = "E")]
    e: f64,
    degeneracy: u32,
    states: Vec<StateLabel>,
}

fn spectrum(args: &SpectrumArgs) -> Result<()> {
    let qp = QuantumParams::new(args.lambda, args.beta)?;
    let levels = energy_levels(&qp, args.levels)?;
    if args.output.format == Some(Format::Csv) {
        let mut w = csv_writer(&args.output, SPECTRUM_SCHEMA)?;
        w.write_record(["n", "E", "degeneracy"])?;
        for l in &levels {
            w.write_record([l.n.to_string(), fmt(l.energy), l.degeneracy.to_string()])?;
        }
        w.flush()?;
        return Ok(());
    }
    let out: Vec<LevelOut> = levels
        .iter()
        .map(|l| LevelOut {
            n: l.n,
            e: l.energy,
            degeneracy: l.degeneracy,
            states: partitions(l.n)
                .into_iter()
                .map(|(n_r, m)| StateLabel { n_r, m })
                .collect(),
        })
        .collect();
    let mut w = args.output.writer()?;
    writeln!(w, "{}", serde_json::to_string_pretty(&out)?)?;
    Ok(())
}

fn wavefunction(args: &WavefunctionArgs) -> Result<()> {
    check_samples(args.samples)?;
    let qp = QuantumParams::new(args.lambda, args.beta)?;
    let state = radial_wavefunction(&qp, args.n_r, args.m)?;
    let r_end = if args.lambda < 0.0 {
        qp.radial_upper()
    } else {
        args.r_max
    };
    if !(r_end > 0.0) {
        bail!("--r-max must be positive");
    }
    // interior points only
    let n = args.samples;
    let mut w = csv_writer(&args.output, WAVEFUNCTION_SCHEMA)?;
    w.write_record(["r", "R", "residual"])?;
    for i in 1..=n {
        let r = r_end * i as f64 / (n + 1) as f64;
        w.write_record([r, state.radial(r), ode_residual(&qp, &state, r)].map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

fn verify_cmd(args: &VerifyArgs) -> Result<bool> {
    let checks = verify::run_all(args.seed);
    let mut w = args.output.writer()?;
    if args.output.format == Some(Format::Json) {
        writeln!(w, "{}", serde_json::to_string_pretty(&checks)?)?;
    } else {
        for c in &checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(w, "{tag} {}: {}", c.name, c.detail)?;
        }
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn potential(args: &PotentialArgs) -> Result<()> {
    check_samples(args.samples)?;
    let p = ModelParams::new(args.lambda, args.alpha)?;
    let upper = p.radial_domain().upper;
    let lo = args.r_min.unwrap_or(if upper.is_finite() { 0.01 * upper } else { 0.05 });
    let hi = args.r_max.unwrap_or(if upper.is_finite() { 0.99 * upper } else { 3.0 });
    if !(lo < hi) {
        bail!("need r_min < r_max");
    }
    let rows = grid(lo, hi, args.samples)
        .into_iter()
        .map(|r| Ok([r, v_eff(&p, 0.0, r)?, v_eff(&p, args.j, r)?]))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv_writer(&args.output, POTENTIAL_SCHEMA)?;
    w.write_record(["r", "v_eff_J0", "v_eff_J"])?;
    for row in rows {
        w.write_record(row.map(fmt))?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Classify(a) => classify(a).map(|_| true),
        Command::Trajectory(a) => trajectory(a).map(|_| true),
        Command::Bridge(a) => bridge_cmd(a),
        Command::Spectrum(a) => spectrum(a).map(|_| true),
        Command::Wavefunction(a) => wavefunction(a).map(|_| true),
        Command::Verify(a) => verify_cmd(a),
        Command::Potential(a) => potential(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
