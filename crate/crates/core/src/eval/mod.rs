//! Model evaluation under three simulation regimes.
//!
//! - Sim1: one-step prediction from measured data (hidden RC states roll
//!   forward, the measured zone temperature is substituted each step).
//! - Sim2: free rollout driven by the recorded inputs, predictions fed back.
//! - Sim3: closed loop of the learned model under a thermostat policy it was
//!   not trained on; scored by deadband occupancy since no reference output
//!   exists for an error metric.

mod metrics;
mod model;
mod sims;

pub use metrics::average_accuracy;
pub use model::{FittedModel, ModelKind};
pub use sims::{run_sim1, run_sim2, run_sim3, Sim3Trace};

use thiserror::Error;

/// Rollouts abort once the zone temperature leaves this range.
pub const DIVERGENCE_LIMIT_C: f64 = 100.0;

/// Fraction of a closed-loop trace treated as transient and excluded from
/// the occupancy score, expressed in days.
pub const SIM3_TRANSIENT_DAYS: f64 = 1.0;

/// Margin added to the deadband when scoring occupancy, °C.
pub const OCCUPANCY_MARGIN_C: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimType {
    Sim1,
    Sim2,
    Sim3,
}

impl SimType {
    pub fn name(&self) -> &'static str {
        match self {
            SimType::Sim1 => "sim1",
            SimType::Sim2 => "sim2",
            SimType::Sim3 => "sim3",
        }
    }

    pub fn parse(s: &str) -> Option<SimType> {
        match s {
            "sim1" => Some(SimType::Sim1),
            "sim2" => Some(SimType::Sim2),
            "sim3" => Some(SimType::Sim3),
            _ => None,
        }
    }
}

impl std::fmt::Display for SimType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluation cell's outcome. Sim1/Sim2 rows carry an accuracy, Sim3
/// rows an occupancy; a divergent rollout keeps whatever score its surviving
/// prefix earned, flagged.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub method: String,
    pub architecture: String,
    pub sim: SimType,
    pub training_days: u32,
    pub average_accuracy: Option<f64>,
    pub deadband_occupancy: Option<f64>,
    pub divergent: bool,
    pub trace_id: String,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction and reference series must be equal, non-empty lengths (got {y} vs {y_hat})")]
    LengthMismatch { y: usize, y_hat: usize },
    #[error("reference sample {index} is zero; relative error undefined")]
    ZeroReference { index: usize },
    #[error("dataset too short for the model burn-in: need {needed}, have {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error(transparent)]
    Thermal(#[from] crate::thermal::ThermalError),
    #[error(transparent)]
    Regression(#[from] crate::regression::RegressionError),
    #[error(transparent)]
    Plant(#[from] crate::plant::PlantError),
}
