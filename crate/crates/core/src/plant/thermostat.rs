//! Deadband thermostat with hysteresis.

use super::PlantError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvacMode {
    Off,
    Cooling,
    Heating,
}

impl HvacMode {
    pub fn name(&self) -> &'static str {
        match self {
            HvacMode::Off => "off",
            HvacMode::Cooling => "cooling",
            HvacMode::Heating => "heating",
        }
    }
}

/// Setpoint tracking policy. `mode` is the state the controller starts in;
/// callers thread the returned mode through successive steps.
#[derive(Debug, Clone)]
pub struct ThermostatConfig {
    pub setpoint: f64,
    /// Half-width of the hysteresis band, °C.
    pub deadband: f64,
    /// Heat-removal rate while cooling, W (>= 0; 0 disables cooling).
    pub cool_capacity: f64,
    /// Heat-addition rate while heating, W (>= 0; 0 disables heating).
    pub heat_capacity: f64,
    pub mode: HvacMode,
}

impl ThermostatConfig {
    pub fn validate(&self) -> Result<(), PlantError> {
        if !(self.deadband.is_finite() && self.deadband > 0.0) {
            return Err(PlantError::ThermostatConfig(format!(
                "deadband must be positive, got {}",
                self.deadband
            )));
        }
        if !self.setpoint.is_finite() {
            return Err(PlantError::ThermostatConfig("setpoint must be finite".into()));
        }
        for (name, v) in [("cool_capacity", self.cool_capacity), ("heat_capacity", self.heat_capacity)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PlantError::ThermostatConfig(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One controller decision. Cooling engages above `setpoint + deadband` and
/// holds until the zone drops below `setpoint - deadband`; heating mirrors
/// that on the low side when heating capacity exists. Returns the next mode
/// and the HVAC heat rate: negative while cooling, positive while heating.
pub fn thermostat_step(t_z: f64, mode: HvacMode, cfg: &ThermostatConfig) -> (HvacMode, f64) {
    let upper = cfg.setpoint + cfg.deadband;
    let lower = cfg.setpoint - cfg.deadband;
    let next = match mode {
        HvacMode::Off => {
            if t_z > upper && cfg.cool_capacity > 0.0 {
                HvacMode::Cooling
            } else if t_z < lower && cfg.heat_capacity > 0.0 {
                HvacMode::Heating
            } else {
                HvacMode::Off
            }
        }
        HvacMode::Cooling => {
            if t_z < lower {
                HvacMode::Off
            } else {
                HvacMode::Cooling
            }
        }
        HvacMode::Heating => {
            if t_z > upper {
                HvacMode::Off
            } else {
                HvacMode::Heating
            }
        }
    };
    let q_hvac = match next {
        HvacMode::Cooling => -cfg.cool_capacity,
        HvacMode::Heating => cfg.heat_capacity,
        HvacMode::Off => 0.0,
    };
    (next, q_hvac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ThermostatConfig {
        ThermostatConfig {
            setpoint: 22.0,
            deadband: 1.0,
            cool_capacity: 6000.0,
            heat_capacity: 0.0,
            mode: HvacMode::Off,
        }
    }

    #[test]
    fn cooling_engages_above_band() {
        let (mode, q) = thermostat_step(23.5, HvacMode::Off, &cfg());
        assert_eq!(mode, HvacMode::Cooling);
        assert_eq!(q, -6000.0);
    }

    #[test]
    fn cooling_holds_inside_band() {
        let (mode, q) = thermostat_step(21.5, HvacMode::Cooling, &cfg());
        assert_eq!(mode, HvacMode::Cooling);
        assert_eq!(q, -6000.0);
    }

    #[test]
    fn cooling_releases_below_band() {
        let (mode, q) = thermostat_step(20.9, HvacMode::Cooling, &cfg());
        assert_eq!(mode, HvacMode::Off);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn off_stays_off_inside_band() {
        let (mode, q) = thermostat_step(22.4, HvacMode::Off, &cfg());
        assert_eq!(mode, HvacMode::Off);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn heating_disabled_without_capacity() {
        let (mode, q) = thermostat_step(15.0, HvacMode::Off, &cfg());
        assert_eq!(mode, HvacMode::Off);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn heating_mirrors_cooling_when_enabled() {
        let mut c = cfg();
        c.heat_capacity = 4000.0;
        let (mode, q) = thermostat_step(20.5, HvacMode::Off, &c);
        assert_eq!(mode, HvacMode::Heating);
        assert_eq!(q, 4000.0);
        let (mode, _) = thermostat_step(22.5, HvacMode::Heating, &c);
        assert_eq!(mode, HvacMode::Heating);
        let (mode, q) = thermostat_step(23.1, HvacMode::Heating, &c);
        assert_eq!(mode, HvacMode::Off);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn band_edges_do_not_trigger() {
        // strict inequalities at both edges
        let (mode, _) = thermostat_step(23.0, HvacMode::Off, &cfg());
        assert_eq!(mode, HvacMode::Off);
        let (mode, _) = thermostat_step(21.0, HvacMode::Cooling, &cfg());
        assert_eq!(mode, HvacMode::Cooling);
    }
}
