//! Grey-box building thermal dynamics toolkit.
//!
//! Identifies low-order thermal models of buildings from time-series data and
//! evaluates them in open- and closed-loop simulation:
//!
//! - [`thermal`]: RC-network models as linear state-space systems (build,
//!   discretize, simulate).
//! - [`estimation`]: parameter fitting by nonlinear least squares, batch
//!   estimation, and Kalman-filter maximum likelihood, on top of an in-house
//!   box-constrained quasi-Newton optimizer.
//! - [`regression`]: structured autoregressive models with polynomial
//!   (Almon) lag restrictions, fit by linear least squares.
//! - [`plant`]: synthetic truth plants, weather, and thermostat-driven
//!   dataset generation.
//! - [`eval`]: one-step, free-rollout, and closed-loop simulation regimes
//!   with accuracy metrics.
//! - [`grid`]: mapping of HVAC heat rates to electrical power quantities.
//! - [`io`]: CSV dataset/trace/report persistence and scenario configuration.

pub mod dataset;
pub mod estimation;
pub mod eval;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod plant;
pub mod regression;
pub mod rng;
pub mod thermal;

pub use dataset::Dataset;
pub use thermal::{
    build_state_space, discretize, simulate, step, ContinuousStateSpace, DiscreteStateSpace,
    DisturbanceSample, RcParameters, RcPreset, RcTopology, ThermalState,
};
