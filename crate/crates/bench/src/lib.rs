//! Shared fixtures for the benchmark suite.

use thermident_core::dataset::Dataset;
use thermident_core::plant::{
    gen_weather, generate_dataset, HvacMode, ThermostatConfig, TruthPlant, WeatherConfig,
};

/// A week of noiseless residential data from the 4-state truth house.
pub fn house_week() -> Dataset {
    let weather = gen_weather(&WeatherConfig {
        n_days: 7,
        t_s: 600.0,
        ambient_mean: 26.5,
        ambient_amplitude: 7.5,
        solar_peak: 3000.0,
        internal_base: 200.0,
        internal_peak: 900.0,
        noise_std: 0.4,
        rng_seed: 42,
    })
    .expect("weather config");
    let thermo = ThermostatConfig {
        setpoint: 22.0,
        deadband: 1.0,
        cool_capacity: 4500.0,
        heat_capacity: 0.0,
        mode: HvacMode::Off,
    };
    generate_dataset(&TruthPlant::house(), &thermo, &weather, 600.0, 0.0, 42)
        .expect("plant rollout")
}
