//! Dormand–Prince 5(4) with the standard 4th-order continuous extension.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub wall_rejections: usize,
}

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn rms<const N: usize>(v: impl Iterator<Item = f64>) -> f64 {
    let s: f64 = v.map(|x| x * x).sum();
    (s / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, t0: f64, y0: &[f64; N], f0: &[f64; N], tol: &Tolerances) -> f64
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
{
    let sc: Vec<f64> = y0.iter().map(|y| tol.atol + tol.rtol * y.abs()).collect();
    let d0 = rms::<N>(y0.iter().zip(&sc).map(|(y, s)| y / s));
    let d1 = rms::<N>(f0.iter().zip(&sc).map(|(y, s)| y / s));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(tol.max_step);
    let y1 = lin(y0, h0, &[(1.0, f0)]);
    let Some(f1) = f(t0 + h0, &y1) else {
        return h0 * 0.1;
    };
    let d2 = rms::<N>(f1.iter().zip(f0).zip(&sc).map(|((a, b), s)| (a - b) / s)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(tol.max_step)
}

/// Integrates `y' = f(t, y)` from `t0` to the last entry of `samples` (which
/// must be sorted, ≥ t0) and returns the dense-output state at every sample
/// time. `f` returns `None` when evaluated outside its domain; such steps are
/// rejected and retried with half the step.
pub(crate) fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    samples: &[f64],
    tol: &Tolerances,
) -> Result<(Vec<[f64; N]>, Stats)>
where
    F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
{
    let mut out = Vec::with_capacity(samples.len());
    let mut stats = Stats::default();
    let Some(&t_end) = samples.last() else {
        return Ok((out, stats));
    };
    let mut next = 0;
    while next < samples.len() && samples[next] <= t0 {
        out.push(y0);
        next += 1;
    }
    let mut k1 = f(t0, &y0).ok_or_else(|| {
        Error::Precondition("initial state outside the right-hand side domain".into())
    })?;
    let mut t = t0;
    let mut y = y0;
    let mut h = initial_step(&mut f, t0, &y0, &k1, tol);
    let mut last_rejected = false;

    while next < samples.len() {
        let h_min = 1e-14 * t.abs().max(1.0);
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t });
        }
        let h_try = h.min(t_end - t).min(tol.max_step);

        let stages = (|| {
            let k2 = f(t + C2 * h_try, &lin(&y, h_try, &[(A21, &k1)]))?;
            let k3 = f(t + C3 * h_try, &lin(&y, h_try, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = f(
                t + C4 * h_try,
                &lin(&y, h_try, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            )?;
            let k5 = f(
                t + C5 * h_try,
                &lin(&y, h_try, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            )?;
            let k6 = f(
                t + h_try,
                &lin(
                    &y,
                    h_try,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            )?;
            let y_new = lin(
                &y,
                h_try,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h_try, &y_new)?;
            Some((k2, k3, k4, k5, k6, k7, y_new))
        })();

        let Some((_k2, k3, k4, k5, k6, k7, y_new)) = stages else {
            stats.wall_rejections += 1;
            h = 0.5 * h_try;
            last_rejected = true;
            continue;
        };

        let err_vec = lin(
            &[0.0; N],
            h_try,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = (0..N)
            .map(|i| {
                let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                (err_vec[i] / sc).abs()
            })
            .fold(0.0, f64::max);

        let fac = if err == 0.0 {
            FAC_MAX
        } else {
            (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
        };

        if err <= 1.0 {
            stats.accepted += 1;
            let t_new = if h_try == t_end - t { t_end } else { t + h_try };
            if next < samples.len() && samples[next] <= t_new {
                let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: [f64; N] = std::array::from_fn(|i| h_try * k1[i] - ydiff[i]);
                let r4: [f64; N] = std::array::from_fn(|i| ydiff[i] - h_try * k7[i] - bspl[i]);
                let r5 = lin(
                    &[0.0; N],
                    h_try,
                    &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)],
                );
                while next < samples.len() && samples[next] <= t_new {
                    let th = (samples[next] - t) / h_try;
                    let th1 = 1.0 - th;
                    let yi: [f64; N] = std::array::from_fn(|i| {
                        y[i] + th * (ydiff[i] + th1 * (bspl[i] + th * (r4[i] + th1 * r5[i])))
                    });
                    out.push(if samples[next] == t_new { y_new } else { yi });
                    next += 1;
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            h = if last_rejected { h_try * fac.min(1.0) } else { h_try * fac };
            h = h.min(tol.max_step);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h = h_try * fac.min(1.0);
            last_rejected = true;
        }
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(x: f64) -> Tolerances {
        Tolerances {
            rtol: x,
            atol: x,
            max_step: f64::INFINITY,
        }
    }

    #[test]
    fn exponential_growth() {
        let samples: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let (ys, _) = integrate(|_, y: &[f64; 1]| Some([y[0]]), 0.0, [1.0], &samples, &tol(1e-12)).unwrap();
        for (t, y) in samples.iter().zip(&ys) {
            assert!((y[0] - t.exp()).abs() < 1e-10 * t.exp(), "t={t}");
        }
    }

    #[test]
    fn dense_output_between_steps() {
        // loose tolerance forces long steps; samples fall inside them
        let samples: Vec<f64> = (0..=400).map(|i| i as f64 * 0.025).collect();
        let (ys, stats) = integrate(
            |_, y: &[f64; 2]| Some([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            &samples,
            &tol(1e-8),
        )
        .unwrap();
        assert!(stats.accepted < samples.len() / 2);
        let worst = samples
            .iter()
            .zip(&ys)
            .map(|(t, y)| (y[0] - t.sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn wall_rejection_and_underflow() {
        // y' = 1/(1 − y) blows up at y = 1 when started below it
        let samples = [0.0, 0.4, 0.6];
        let res = integrate(
            |_, y: &[f64; 1]| (y[0] < 1.0).then(|| [1.0 / (1.0 - y[0])]),
            0.0,
            [0.0],
            &samples,
            &tol(1e-10),
        );
        // exact solution 1 − √(1 − 2t) leaves the domain at t = 0.5
        assert!(matches!(res, Err(Error::StepSizeUnderflow { t }) if (t - 0.5).abs() < 1e-3));
    }
}
