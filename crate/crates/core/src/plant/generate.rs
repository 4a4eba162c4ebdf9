//! Truth plants and closed-loop dataset generation.

use super::thermostat::{thermostat_step, ThermostatConfig};
use super::PlantError;
use crate::dataset::Dataset;
use crate::rng::SplitMix64;
use crate::thermal::{
    build_state_space, discretize, step, DisturbanceSample, RcParameters, RcPreset, RcTopology,
    ThermalState,
};

/// Electrical COP used when mapping HVAC heat rates to power draw in shipped
/// scenarios.
pub const DEFAULT_COP: f64 = 3.0;

/// The generating model behind a synthetic dataset: a fixed RC structure,
/// its documented parameter constants, and the heat-to-power COP.
#[derive(Debug, Clone)]
pub struct TruthPlant {
    pub topology: RcTopology,
    pub params: RcParameters,
    pub cop: f64,
}

impl TruthPlant {
    /// Four-state single-family house. Two envelope walls couple zone and
    /// ambient; one interior mass node couples only to the zone. Time
    /// constants: zone about an hour and a half, walls and mass several
    /// hours. Constants sized so a 4.5 kW cooler cycles at a 20-60% duty
    /// under the shipped summer weather.
    pub fn house() -> TruthPlant {
        let topology = RcTopology {
            n_hidden: 3,
            wall_wall_coupled: vec![vec![false; 3]; 3],
            wall_ambient: vec![true, true, false],
            zone_internal_gain: true,
            zone_solar_gain: true,
            gains_on_walls: true,
            preset: RcPreset::Custom,
        };
        let params = RcParameters {
            r_za: 8.0e-3,
            r_zw: vec![4.0e-3, 4.0e-3, 2.5e-3],
            r_w: vec![],
            r_wa: vec![Some(2.0e-2), Some(2.0e-2), None],
            c_z: 6.0e6,
            c_w: vec![8.0e6, 8.0e6, 1.2e7],
            a_z: 0.9,
            b_z: 0.6,
            d_z: 0.2,
            wall_gain: vec![0.1, 0.1, 0.2],
        };
        TruthPlant {
            topology,
            params,
            cop: DEFAULT_COP,
        }
    }

    /// Two-state commercial surrogate: one lumped envelope node, heavier
    /// capacitances, stand-in for an office building simulation.
    pub fn commercial() -> TruthPlant {
        let topology = RcTopology {
            n_hidden: 1,
            wall_wall_coupled: vec![vec![false]],
            wall_ambient: vec![true],
            zone_internal_gain: true,
            zone_solar_gain: true,
            gains_on_walls: false,
            preset: RcPreset::Custom,
        };
        let params = RcParameters {
            r_za: 4.0e-3,
            r_zw: vec![1.5e-3],
            r_w: vec![],
            r_wa: vec![Some(1.0e-2)],
            c_z: 8.0e6,
            c_w: vec![4.0e7],
            a_z: 0.85,
            b_z: 0.5,
            d_z: 0.15,
            wall_gain: vec![],
        };
        TruthPlant {
            topology,
            params,
            cop: DEFAULT_COP,
        }
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        self.params
            .validate(&self.topology)
            .map_err(|e| PlantError::Plant(e.to_string()))?;
        if !(self.cop.is_finite() && self.cop > 0.0) {
            return Err(PlantError::Plant(format!("cop must be positive, got {}", self.cop)));
        }
        Ok(())
    }
}

/// Rolls the truth plant closed-loop under the thermostat policy and records
/// a dataset: `q_hvac` is exactly what the policy commanded, power columns
/// split `|q_hvac| / cop` by mode, and the measured output is the true zone
/// temperature plus seeded Gaussian noise. The policy senses the true zone
/// temperature; noise only corrupts the recorded output.
pub fn generate_dataset(
    plant: &TruthPlant,
    thermo: &ThermostatConfig,
    weather: &[DisturbanceSample],
    t_s: f64,
    meas_noise_std: f64,
    rng_seed: u64,
) -> Result<Dataset, PlantError> {
    plant.validate()?;
    thermo.validate()?;
    if weather.is_empty() {
        return Err(PlantError::WeatherConfig("weather sequence is empty".into()));
    }
    let css = build_state_space(&plant.topology, &plant.params)?;
    let dss = discretize(&css, t_s)?;
    let n = weather.len();
    let mut rng = SplitMix64::derive(rng_seed, "measurement-noise");

    let mut x = ThermalState::uniform(thermo.setpoint, plant.topology.n_hidden);
    let mut mode = thermo.mode;
    let mut t_z = Vec::with_capacity(n);
    let mut q_hvac = Vec::with_capacity(n);
    let mut p_c = Vec::with_capacity(n);
    let mut p_h = Vec::with_capacity(n);
    let mut t_am = Vec::with_capacity(n);
    let mut q_int = Vec::with_capacity(n);
    let mut q_solar = Vec::with_capacity(n);

    for (k, w) in weather.iter().enumerate() {
        let t_true = x.t_z;
        let (next_mode, q) = thermostat_step(t_true, mode, thermo);
        mode = next_mode;
        let noise = if meas_noise_std > 0.0 {
            rng.normal(0.0, meas_noise_std)
        } else {
            0.0
        };
        t_z.push(t_true + noise);
        q_hvac.push(q);
        p_c.push(if q < 0.0 { -q / plant.cop } else { 0.0 });
        p_h.push(if q > 0.0 { q / plant.cop } else { 0.0 });
        t_am.push(w.t_am);
        q_int.push(w.q_int);
        q_solar.push(w.q_solar);
        let (next, _) = step(&dss, &x, q, w)?;
        if !next.is_finite() {
            return Err(PlantError::NonFiniteRollout(k));
        }
        x = next;
    }

    Ok(Dataset {
        t_s,
        t0_s: 0,
        t_z,
        q_hvac,
        p_c,
        p_h,
        t_am,
        q_int,
        q_solar,
        meta: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::weather::{gen_weather, WeatherConfig};
    use crate::plant::HvacMode;

    pub(crate) fn house_weather(n_days: u32, seed: u64) -> WeatherConfig {
        WeatherConfig {
            n_days,
            t_s: 600.0,
            ambient_mean: 26.5,
            ambient_amplitude: 7.5,
            solar_peak: 3000.0,
            internal_base: 200.0,
            internal_peak: 900.0,
            noise_std: 0.4,
            rng_seed: seed,
        }
    }

    fn house_thermostat() -> ThermostatConfig {
        ThermostatConfig {
            setpoint: 22.0,
            deadband: 1.0,
            cool_capacity: 4500.0,
            heat_capacity: 0.0,
            mode: HvacMode::Off,
        }
    }

    #[test]
    fn seven_days_at_600s_gives_1008_samples() {
        let weather = gen_weather(&house_weather(7, 1)).unwrap();
        let ds = generate_dataset(
            &TruthPlant::house(),
            &house_thermostat(),
            &weather,
            600.0,
            0.0,
            1,
        )
        .unwrap();
        assert_eq!(ds.len(), 1008);
        ds.validate().unwrap();
    }

    #[test]
    fn noiseless_output_is_exact_plant_temperature() {
        let weather = gen_weather(&house_weather(2, 5)).unwrap();
        let plant = TruthPlant::house();
        let thermo = house_thermostat();
        let ds = generate_dataset(&plant, &thermo, &weather, 600.0, 0.0, 5).unwrap();
        // replay the plant open-loop with the recorded inputs
        let dss = discretize(&build_state_space(&plant.topology, &plant.params).unwrap(), 600.0)
            .unwrap();
        let trace = crate::thermal::simulate(
            &dss,
            &ThermalState::uniform(thermo.setpoint, 3),
            &ds.q_hvac,
            &weather,
        )
        .unwrap();
        for (a, b) in ds.t_z.iter().zip(&trace.outputs) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn regeneration_is_bit_exact() {
        let weather = gen_weather(&house_weather(3, 9)).unwrap();
        let a = generate_dataset(&TruthPlant::house(), &house_thermostat(), &weather, 600.0, 0.3, 9)
            .unwrap();
        let b = generate_dataset(&TruthPlant::house(), &house_thermostat(), &weather, 600.0, 0.3, 9)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_columns_are_mode_exclusive_and_cop_scaled() {
        let weather = gen_weather(&house_weather(3, 2)).unwrap();
        let plant = TruthPlant::house();
        let ds = generate_dataset(&plant, &house_thermostat(), &weather, 600.0, 0.0, 2).unwrap();
        for k in 0..ds.len() {
            assert_eq!(ds.p_c[k] * ds.p_h[k], 0.0);
            if ds.q_hvac[k] < 0.0 {
                assert_eq!(ds.p_c[k], -ds.q_hvac[k] / plant.cop);
            } else {
                assert_eq!(ds.p_c[k], 0.0);
            }
        }
    }

    #[test]
    fn summer_scenario_tracks_setpoint_after_transient() {
        let weather = gen_weather(&house_weather(7, 3)).unwrap();
        let thermo = house_thermostat();
        let ds = generate_dataset(&TruthPlant::house(), &thermo, &weather, 600.0, 0.0, 3).unwrap();
        let per_day = ds.samples_per_day();
        let tail = &ds.t_z[per_day..];
        let in_band = tail
            .iter()
            .filter(|&&t| (t - thermo.setpoint).abs() <= thermo.deadband + 0.2)
            .count();
        let frac = in_band as f64 / tail.len() as f64;
        assert!(frac >= 0.95, "in-band fraction {frac}");
    }

    #[test]
    fn duty_cycle_is_realistic() {
        let weather = gen_weather(&house_weather(7, 3)).unwrap();
        let ds = generate_dataset(&TruthPlant::house(), &house_thermostat(), &weather, 600.0, 0.0, 3)
            .unwrap();
        let on = ds.q_hvac.iter().filter(|&&q| q != 0.0).count();
        let duty = on as f64 / ds.len() as f64;
        assert!((0.2..=0.6).contains(&duty), "duty cycle {duty}");
    }

    #[test]
    fn commercial_plant_exercises_both_modes() {
        let cfg = WeatherConfig {
            n_days: 5,
            t_s: 300.0,
            ambient_mean: 14.0,
            ambient_amplitude: 9.0,
            solar_peak: 5000.0,
            internal_base: 500.0,
            internal_peak: 3000.0,
            noise_std: 0.4,
            rng_seed: 8,
        };
        let weather = gen_weather(&cfg).unwrap();
        let thermo = ThermostatConfig {
            setpoint: 22.0,
            deadband: 1.0,
            cool_capacity: 12_000.0,
            heat_capacity: 10_000.0,
            mode: HvacMode::Off,
        };
        let ds = generate_dataset(&TruthPlant::commercial(), &thermo, &weather, 300.0, 0.0, 8)
            .unwrap();
        ds.validate().unwrap();
        assert!(ds.p_c.iter().any(|&p| p > 0.0), "cooling never engaged");
        assert!(ds.p_h.iter().any(|&p| p > 0.0), "heating never engaged");
    }
}
