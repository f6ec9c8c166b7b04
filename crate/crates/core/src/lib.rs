//! Classical and quantum harmonic oscillator on the sphere (λ < 0) and the
//! hyperbolic plane (λ > 0).
//!
//! * [`model`]: parameters, effective potential, regime classification
//! * [`closed_form`]: exact polar trajectories
//! * [`bridge`]: cartesian solution families mapped onto polar parameters
//! * [`ode`]: adaptive integration of the radial equation of motion
//! * [`quantum`]: bound-state spectrum and Jacobi radial wavefunctions
//! * [`verify`]: aggregated self-checks used by the command-line tool

pub mod bridge;
pub mod closed_form;
pub mod error;
pub mod model;
pub mod ode;
pub mod quantum;
pub mod verify;

pub use closed_form::{ClosedFormTrajectory, TrajectoryKind};
pub use error::{Error, Result};
pub use model::{ClassicalState, ModelParams, MotionConstants, Regime};
