//! Synthetic weather and occupancy disturbances.

use super::PlantError;
use crate::rng::SplitMix64;
use crate::thermal::DisturbanceSample;

/// Shape of the synthetic disturbance traces. Ambient follows a diurnal
/// sinusoid (peak 15:00) with optional Gaussian noise; solar is a
/// half-rectified sinusoid spanning 06:00-18:00; internal gains are a daily
/// occupancy square wave (08:00-20:00 at the peak level).
#[derive(Debug, Clone)]
pub struct WeatherConfig {
    pub n_days: u32,
    /// Sample period, seconds. Shipped scenarios run at 600 s (house) or
    /// 300 s (commercial).
    pub t_s: f64,
    pub ambient_mean: f64,
    pub ambient_amplitude: f64,
    pub solar_peak: f64,
    pub internal_base: f64,
    pub internal_peak: f64,
    /// Standard deviation of ambient noise, °C.
    pub noise_std: f64,
    pub rng_seed: u64,
}

impl WeatherConfig {
    pub fn validate(&self) -> Result<(), PlantError> {
        if self.n_days < 1 {
            return Err(PlantError::WeatherConfig("n_days must be >= 1".into()));
        }
        if self.t_s != 300.0 && self.t_s != 600.0 {
            return Err(PlantError::WeatherConfig(format!(
                "sample period must be 300 or 600 seconds, got {}",
                self.t_s
            )));
        }
        for (name, v) in [
            ("ambient_amplitude", self.ambient_amplitude),
            ("solar_peak", self.solar_peak),
            ("internal_base", self.internal_base),
            ("internal_peak", self.internal_peak),
            ("noise_std", self.noise_std),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PlantError::WeatherConfig(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        if !self.ambient_mean.is_finite() {
            return Err(PlantError::WeatherConfig("ambient_mean must be finite".into()));
        }
        Ok(())
    }

    pub fn samples_per_day(&self) -> usize {
        (86_400.0 / self.t_s).round() as usize
    }

    pub fn n_samples(&self) -> usize {
        self.n_days as usize * self.samples_per_day()
    }
}

/// Deterministic disturbance sequence for the configured span.
pub fn gen_weather(cfg: &WeatherConfig) -> Result<Vec<DisturbanceSample>, PlantError> {
    cfg.validate()?;
    let mut rng = SplitMix64::derive(cfg.rng_seed, "weather-ambient");
    let n = cfg.n_samples();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let hour = (k as f64 * cfg.t_s / 3600.0) % 24.0;
        let diurnal = (std::f64::consts::TAU * (hour - 9.0) / 24.0).sin();
        let noise = if cfg.noise_std > 0.0 {
            rng.normal(0.0, cfg.noise_std)
        } else {
            0.0
        };
        let t_am = cfg.ambient_mean + cfg.ambient_amplitude * diurnal + noise;
        let solar = cfg.solar_peak
            * (std::f64::consts::PI * (hour - 6.0) / 12.0).sin().max(0.0);
        let occupied = (8.0..20.0).contains(&hour);
        let q_int = if occupied { cfg.internal_peak } else { cfg.internal_base };
        out.push(DisturbanceSample::new(t_am, q_int, solar));
    }
    Ok(out)
}
