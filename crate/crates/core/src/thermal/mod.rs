//! RC-network thermal models as linear state-space systems.
//!
//! A building is reduced to one measurable zone-air node plus `N` hidden
//! wall/mass nodes. Thermal resistances couple nodes to each other and to
//! ambient; capacitances give each node inertia; HVAC, internal, and solar
//! heat enter through gain fractions. The continuous dynamics assemble into
//! `dx/dt = A x + B u + D w`, are Euler-discretized, and simulated forward.

mod model;
mod sim;
mod topology;

pub use model::{build_state_space, discretize, ContinuousStateSpace, DiscreteStateSpace};
pub use sim::{simulate, step, DisturbanceSample, SimTrace, ThermalState};
pub use topology::{RcParameters, RcPreset, RcTopology};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThermalError {
    #[error("topology invalid: {0}")]
    Topology(String),
    #[error("parameter {name} must be strictly positive, got {value}")]
    NonPositive { name: String, value: f64 },
    #[error("fraction {name} must lie in [0, 1], got {value}")]
    FractionOutOfRange { name: String, value: f64 },
    #[error("parameters do not match topology: {0}")]
    ParameterShape(String),
    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("input sequences differ in length: u has {u_len}, w has {w_len}")]
    LengthMismatch { u_len: usize, w_len: usize },
}
