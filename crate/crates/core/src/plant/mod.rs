//! Synthetic truth plants and closed-loop dataset generation.
//!
//! Real weather files and building telemetry are not shipped; instead a
//! versioned truth plant (a fixed RC structure with documented constants) is
//! driven by synthetic weather under a thermostat policy, and the resulting
//! closed-loop traces become the training/testing datasets.

mod generate;
mod thermostat;
mod weather;

pub use generate::{generate_dataset, TruthPlant, DEFAULT_COP};
pub use thermostat::{thermostat_step, HvacMode, ThermostatConfig};
pub use weather::{gen_weather, WeatherConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("weather config invalid: {0}")]
    WeatherConfig(String),
    #[error("thermostat config invalid: {0}")]
    ThermostatConfig(String),
    #[error("truth plant invalid: {0}")]
    Plant(String),
    #[error("plant rollout produced a non-finite state at step {0}")]
    NonFiniteRollout(usize),
    #[error(transparent)]
    Thermal(#[from] crate::thermal::ThermalError),
}
