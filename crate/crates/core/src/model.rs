//! Model parameters, effective potential and regime classification.
//!
//! The model is the two-dimensional oscillator with position-dependent mass
//! whose polar Lagrangian is
//!
//! ```text
//! L = ½ (ṙ²/(1+λr²) + J²/r²) − ½ α² r²/(1+λr²)
//! ```
//!
//! λ < 0 is the sphere (radius confined to (0, 1/√|λ|)), λ > 0 the hyperbolic
//! plane (radius in (0, ∞)). The library is unit-agnostic: read λ as 1/length²,
//! α as 1/time, J as length²/time and E as length²/time².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative width of the band around E = α²/(2λ) classified as limiting motion.
pub const LIMITING_TOLERANCE: f64 = 1e-12;

/// Curvature parameter λ and oscillator strength α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    lambda: f64,
    alpha: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda == 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be finite and nonzero, got {lambda}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha must be finite and positive, got {alpha}"
            )));
        }
        Ok(Self { lambda, alpha })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `1 + λr²`, the position-dependent mass denominator.
    #[inline]
    pub fn metric_factor(&self, r: f64) -> f64 {
        1.0 + self.lambda * r * r
    }

    /// Threshold energy α²/(2λ) separating bounded from unbounded motion (λ > 0).
    pub fn threshold_energy(&self) -> f64 {
        self.alpha * self.alpha / (2.0 * self.lambda)
    }

    /// Largest |J| admitting bounded motion on the hyperbolic plane, α/λ.
    /// Infinite on the sphere.
    pub fn angular_momentum_cutoff(&self) -> f64 {
        if self.lambda > 0.0 {
            self.alpha / self.lambda
        } else {
            f64::INFINITY
        }
    }

    pub fn radial_domain(&self) -> RadialDomain {
        radial_domain(self)
    }
}

/// Open radial interval (0, upper). `upper` is infinite for λ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDomain {
    pub upper: f64,
}

impl RadialDomain {
    pub fn contains(&self, r: f64) -> bool {
        r > 0.0 && r < self.upper
    }

    pub fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::Domain {
                r,
                upper: self.upper,
            })
        }
    }
}

pub fn radial_domain(params: &ModelParams) -> RadialDomain {
    let upper = if params.lambda > 0.0 {
        f64::INFINITY
    } else {
        1.0 / params.lambda.abs().sqrt()
    };
    RadialDomain { upper }
}

/// Polar phase-space point together with its (conserved) angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub r: f64,
    pub r_dot: f64,
    pub phi: f64,
    pub j: f64,
}

impl ClassicalState {
    pub fn new(r: f64, r_dot: f64, phi: f64, j: f64) -> Self {
        Self { r, r_dot, phi, j }
    }

    /// Azimuthal velocity J/r².
    pub fn phi_dot(&self) -> f64 {
        self.j / (self.r * self.r)
    }

    pub fn cartesian(&self) -> (f64, f64) {
        let (s, c) = self.phi.sin_cos();
        (self.r * c, self.r * s)
    }
}

/// V_eff(r) = α²r²/[2(1+λr²)] + J²/(2r²).
pub fn v_eff(params: &ModelParams, j: f64, r: f64) -> Result<f64> {
    params.radial_domain().check(r)?;
    Ok(v_eff_unchecked(params, j, r))
}

#[inline]
pub(crate) fn v_eff_unchecked(params: &ModelParams, j: f64, r: f64) -> f64 {
    let r2 = r * r;
    let a2 = params.alpha * params.alpha;
    0.5 * a2 * r2 / params.metric_factor(r) + 0.5 * j * j / r2
}

/// Location and depth of the effective-potential minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Absent for J = 0, where the infimum V = 0 sits at the origin.
    pub r_min: Option<f64>,
    pub v_min: f64,
}

/// Minimum of V_eff for fixed J.
///
/// Returns `None` on the hyperbolic plane when |J| ≥ α/λ: V_eff then decreases
/// monotonically towards α²/(2λ) and has no interior minimum.
pub fn v_eff_extremum(params: &ModelParams, j: f64) -> Option<Extremum> {
    let jj = j.abs();
    if jj == 0.0 {
        return Some(Extremum {
            r_min: None,
            v_min: 0.0,
        });
    }
    let (lambda, alpha) = (params.lambda, params.alpha);
    if lambda > 0.0 && jj >= alpha / lambda {
        return None;
    }
    let r_min = (jj / (alpha - lambda * jj)).sqrt();
    let v_min = 0.5 * jj * (2.0 * alpha - lambda * jj);
    Some(Extremum {
        r_min: Some(r_min),
        v_min,
    })
}

/// Total energy E = ½(1+λr²)⁻¹[ṙ² + α²r² + (J²/r²)(1+λr²)].
pub fn energy_of_state(params: &ModelParams, state: &ClassicalState) -> Result<f64> {
    params.radial_domain().check(state.r)?;
    let r2 = state.r * state.r;
    let w = params.metric_factor(state.r);
    let a2 = params.alpha * params.alpha;
    let bracket = state.r_dot * state.r_dot + a2 * r2 + state.j * state.j / r2 * w;
    Ok(0.5 * bracket / w)
}

/// Qualitative class of a classical trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// r² oscillates between two turning points.
    Bounded,
    /// Threshold energy E = α²/(2λ) on the hyperbolic plane; r² grows quadratically.
    Limiting,
    /// E > α²/(2λ) on the hyperbolic plane; r² grows like cosh.
    Unbounded,
    /// No real motion at this (J, E).
    Forbidden,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Bounded => "Bounded",
            Regime::Limiting => "Limiting",
            Regime::Unbounded => "Unbounded",
            Regime::Forbidden => "Forbidden",
        };
        f.write_str(s)
    }
}

/// Invariants of the radial quadrature `2dt = dr²/√(qa + qb r² + qc r⁴)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionConstants {
    /// Integration constant C = 2E − α²/λ.
    pub c: f64,
    pub qa: f64,
    pub qb: f64,
    pub qc: f64,
    /// Discriminant 4·qa·qc − qb².
    pub delta: f64,
    /// √|qc|; zero for limiting motion.
    pub omega: f64,
    pub regime: Regime,
}

pub fn motion_constants(params: &ModelParams, j: f64, e: f64) -> MotionConstants {
    let (lambda, alpha) = (params.lambda, params.alpha);
    let a2_over_l = alpha * alpha / lambda;
    let c = 2.0 * e - a2_over_l;
    let qa = -j * j;
    let qb = c + a2_over_l - lambda * j * j;
    let qc = c * lambda;
    let delta = 4.0 * qa * qc - qb * qb;
    let regime = classify(params, j, e);
    let omega = match regime {
        Regime::Limiting => 0.0,
        _ => qc.abs().sqrt(),
    };
    MotionConstants {
        c,
        qa,
        qb,
        qc,
        delta,
        omega,
        regime,
    }
}

/// Regime of the motion with angular momentum `j` and energy `e`.
///
/// On the hyperbolic plane with |J| ≥ α/λ every E ≤ α²/(2λ) is forbidden and
/// every E above it is unbounded. Energies within `LIMITING_TOLERANCE`
/// (relative) of α²/(2λ) are limiting.
pub fn classify(params: &ModelParams, j: f64, e: f64) -> Regime {
    if !e.is_finite() || !j.is_finite() {
        return Regime::Forbidden;
    }
    let tol = LIMITING_TOLERANCE * e.abs().max(1.0);
    if params.lambda > 0.0 {
        let threshold = params.threshold_energy();
        if (e - threshold).abs() <= tol {
            return if j.abs() < params.angular_momentum_cutoff() {
                Regime::Limiting
            } else {
                Regime::Forbidden
            };
        }
        if e > threshold {
            return Regime::Unbounded;
        }
    }
    match v_eff_extremum(params, j) {
        None => Regime::Forbidden,
        Some(ext) if ext.r_min.is_none() => {
            if e > 0.0 {
                Regime::Bounded
            } else {
                Regime::Forbidden
            }
        }
        Some(ext) => {
            if e >= ext.v_min - tol {
                Regime::Bounded
            } else {
                Regime::Forbidden
            }
        }
    }
}
