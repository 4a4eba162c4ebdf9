//! Scenario configuration: building selection, experiment grid, and all
//! tunables, with per-building defaults and a stable fingerprint.

use super::kv::{parse_f64, parse_kv_lines, parse_u32, parse_u64, parse_usize};
use super::IoError;
use crate::estimation::{EstimationMethod, NoiseHyperParams, OptimizerConfig};
use crate::linalg::Mat;
use crate::plant::{HvacMode, ThermostatConfig, TruthPlant, WeatherConfig};
use crate::rng::fnv1a64;
use crate::thermal::{RcTopology, ThermalState};

/// Admissible training-window lengths, days.
pub const ALLOWED_WINDOWS: [u32; 5] = [3, 5, 7, 14, 21];

/// Required testing span, days.
pub const TEST_DAYS: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Building {
    House,
    Commercial,
}

impl Building {
    pub fn name(&self) -> &'static str {
        match self {
            Building::House => "house",
            Building::Commercial => "commercial",
        }
    }

    pub fn parse(s: &str) -> Option<Building> {
        match s {
            "house" => Some(Building::House),
            "commercial" => Some(Building::Commercial),
            _ => None,
        }
    }

    /// Native sample period: 10 minutes residential, 5 minutes commercial.
    pub fn t_s(&self) -> f64 {
        match self {
            Building::House => 600.0,
            Building::Commercial => 300.0,
        }
    }

    pub fn truth_plant(&self) -> TruthPlant {
        match self {
            Building::House => TruthPlant::house(),
            Building::Commercial => TruthPlant::commercial(),
        }
    }

    pub fn rc_architectures(&self) -> &'static [&'static str] {
        match self {
            Building::House => &["R-1", "R-2", "R-4"],
            Building::Commercial => &["C-1", "C-2"],
        }
    }

    pub fn als_architecture(&self) -> &'static str {
        match self {
            Building::House => "R-A",
            Building::Commercial => "C-A",
        }
    }
}

impl std::fmt::Display for Building {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A requested estimation method: one of the RC estimators or the
/// regression fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSel {
    Rc(EstimationMethod),
    Als,
}

impl MethodSel {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSel::Rc(m) => m.name(),
            MethodSel::Als => "ALS",
        }
    }

    pub fn parse(s: &str) -> Option<MethodSel> {
        if s == "ALS" {
            Some(MethodSel::Als)
        } else {
            EstimationMethod::parse(s).map(MethodSel::Rc)
        }
    }
}

impl std::fmt::Display for MethodSel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Complete scenario description. Every field has a per-building default;
/// a config file overrides individual keys.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub building: Building,
    pub seed: u64,
    pub train_days: u32,
    pub test_days: u32,
    pub windows: Vec<u32>,
    pub methods: Vec<MethodSel>,
    pub architectures: Vec<String>,
    pub ambient_mean: f64,
    pub ambient_amplitude: f64,
    pub solar_peak: f64,
    pub internal_base: f64,
    pub internal_peak: f64,
    pub weather_noise_std: f64,
    pub meas_noise_std: f64,
    pub train_setpoint: f64,
    pub sim3_setpoint: f64,
    pub deadband: f64,
    pub cool_capacity: f64,
    pub heat_capacity: f64,
    pub q_proc: f64,
    pub r_meas: f64,
    pub opt_max_iters: usize,
    pub opt_grad_tol: f64,
    pub opt_step_tol: f64,
    pub opt_fd_step: f64,
    pub opt_multistart: usize,
    pub cop: f64,
    pub p_other: f64,
    pub power_factor: f64,
}

impl ScenarioConfig {
    pub fn defaults(building: Building) -> ScenarioConfig {
        match building {
            Building::House => ScenarioConfig {
                building,
                seed: 42,
                train_days: 21,
                test_days: TEST_DAYS,
                windows: vec![7],
                methods: vec![
                    MethodSel::Rc(EstimationMethod::Nls),
                    MethodSel::Rc(EstimationMethod::Be),
                    MethodSel::Rc(EstimationMethod::Mle),
                    MethodSel::Als,
                ],
                architectures: vec!["R-1".into(), "R-2".into(), "R-4".into(), "R-A".into()],
                ambient_mean: 26.5,
                ambient_amplitude: 7.5,
                solar_peak: 3000.0,
                internal_base: 200.0,
                internal_peak: 900.0,
                weather_noise_std: 0.4,
                meas_noise_std: 0.05,
                train_setpoint: 23.0,
                sim3_setpoint: 22.0,
                deadband: 1.0,
                cool_capacity: 4500.0,
                heat_capacity: 0.0,
                q_proc: 1e-4,
                r_meas: 1e-2,
                opt_max_iters: 700,
                opt_grad_tol: 1e-7,
                opt_step_tol: 1e-11,
                opt_fd_step: 1e-6,
                opt_multistart: 4,
                cop: 3.0,
                p_other: 200.0,
                power_factor: 0.9,
            },
            Building::Commercial => ScenarioConfig {
                building,
                seed: 42,
                train_days: 14,
                test_days: TEST_DAYS,
                windows: vec![7],
                methods: vec![
                    MethodSel::Rc(EstimationMethod::Nls),
                    MethodSel::Rc(EstimationMethod::Be),
                    MethodSel::Rc(EstimationMethod::Mle),
                    MethodSel::Als,
                ],
                architectures: vec!["C-1".into(), "C-2".into(), "C-A".into()],
                ambient_mean: 14.0,
                ambient_amplitude: 9.0,
                solar_peak: 5000.0,
                internal_base: 500.0,
                internal_peak: 3000.0,
                weather_noise_std: 0.4,
                meas_noise_std: 0.05,
                train_setpoint: 23.0,
                sim3_setpoint: 22.0,
                deadband: 1.0,
                cool_capacity: 12_000.0,
                heat_capacity: 10_000.0,
                q_proc: 1e-4,
                r_meas: 1e-2,
                opt_max_iters: 700,
                opt_grad_tol: 1e-7,
                opt_step_tol: 1e-11,
                opt_fd_step: 1e-6,
                opt_multistart: 4,
                cop: 3.0,
                p_other: 500.0,
                power_factor: 0.9,
            },
        }
    }

    /// Loads a config file over the building's defaults. Unknown keys are
    /// errors so typos cannot silently fall back to defaults.
    pub fn from_file(path: &std::path::Path) -> Result<ScenarioConfig, IoError> {
        let text = std::fs::read_to_string(path)?;
        let kv = parse_kv_lines(&text)?;
        let building = match kv.get("building") {
            Some(s) => Building::parse(s)
                .ok_or_else(|| IoError::Config(format!("unknown building {s:?}")))?,
            None => Building::House,
        };
        let mut cfg = ScenarioConfig::defaults(building);
        for (key, value) in &kv.entries {
            cfg.apply(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), IoError> {
        match key {
            "building" => {} // consumed before defaults were chosen
            "seed" => self.seed = parse_u64(key, value)?,
            "train.days" => self.train_days = parse_u32(key, value)?,
            "test.days" => self.test_days = parse_u32(key, value)?,
            "windows" => {
                self.windows = value
                    .split(',')
                    .map(|s| parse_u32("windows", s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(|s| {
                        MethodSel::parse(s.trim()).ok_or_else(|| {
                            IoError::Config(format!("unknown method {s:?}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
            }
            "architectures" => {
                self.architectures = value.split(',').map(|s| s.trim().to_string()).collect();
            }
            "weather.ambient_mean" => self.ambient_mean = parse_f64(key, value)?,
            "weather.ambient_amplitude" => self.ambient_amplitude = parse_f64(key, value)?,
            "weather.solar_peak" => self.solar_peak = parse_f64(key, value)?,
            "weather.internal_base" => self.internal_base = parse_f64(key, value)?,
            "weather.internal_peak" => self.internal_peak = parse_f64(key, value)?,
            "weather.noise_std" => self.weather_noise_std = parse_f64(key, value)?,
            "plant.meas_noise_std" => self.meas_noise_std = parse_f64(key, value)?,
            "thermostat.train_setpoint" => self.train_setpoint = parse_f64(key, value)?,
            "thermostat.deadband" => self.deadband = parse_f64(key, value)?,
            "thermostat.cool_capacity" => self.cool_capacity = parse_f64(key, value)?,
            "thermostat.heat_capacity" => self.heat_capacity = parse_f64(key, value)?,
            "sim3.setpoint" => self.sim3_setpoint = parse_f64(key, value)?,
            "noise.q_proc" => self.q_proc = parse_f64(key, value)?,
            "noise.r_meas" => self.r_meas = parse_f64(key, value)?,
            "optimizer.max_iters" => self.opt_max_iters = parse_usize(key, value)?,
            "optimizer.grad_tol" => self.opt_grad_tol = parse_f64(key, value)?,
            "optimizer.step_tol" => self.opt_step_tol = parse_f64(key, value)?,
            "optimizer.fd_step" => self.opt_fd_step = parse_f64(key, value)?,
            "optimizer.multistart" => self.opt_multistart = parse_usize(key, value)?,
            "power.cop" => self.cop = parse_f64(key, value)?,
            "power.p_other" => self.p_other = parse_f64(key, value)?,
            "power.pf" => self.power_factor = parse_f64(key, value)?,
            _ => return Err(IoError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), IoError> {
        if self.test_days != TEST_DAYS {
            return Err(IoError::Config(format!(
                "test window must be {TEST_DAYS} days, got {}",
                self.test_days
            )));
        }
        if self.windows.is_empty() {
            return Err(IoError::Config("windows must not be empty".into()));
        }
        for w in &self.windows {
            if !ALLOWED_WINDOWS.contains(w) {
                return Err(IoError::Config(format!(
                    "training window {w} days not in the supported set {ALLOWED_WINDOWS:?}"
                )));
            }
            if *w > self.train_days {
                return Err(IoError::Config(format!(
                    "training window {w} days exceeds the generated span {} days",
                    self.train_days
                )));
            }
        }
        if self.methods.is_empty() {
            return Err(IoError::Config("methods must not be empty".into()));
        }
        let valid_archs: Vec<&str> = self
            .building
            .rc_architectures()
            .iter()
            .copied()
            .chain(std::iter::once(self.building.als_architecture()))
            .collect();
        for a in &self.architectures {
            if !valid_archs.contains(&a.as_str()) {
                return Err(IoError::Config(format!(
                    "architecture {a:?} not valid for {} (expected one of {valid_archs:?})",
                    self.building
                )));
            }
        }
        if self.architectures.is_empty() {
            return Err(IoError::Config("architectures must not be empty".into()));
        }
        for (name, v) in [
            ("plant.meas_noise_std", self.meas_noise_std),
            ("noise.q_proc", self.q_proc),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(IoError::Config(format!("{name} must be non-negative")));
            }
        }
        if !(self.r_meas > 0.0) {
            return Err(IoError::Config("noise.r_meas must be positive".into()));
        }
        if !(self.cop > 0.0) {
            return Err(IoError::Config("power.cop must be positive".into()));
        }
        if !(self.power_factor > 0.0 && self.power_factor <= 1.0) {
            return Err(IoError::Config("power.pf must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Every effective setting as `key = value` lines, sorted; the hash
    /// input and the documentation of record for artifacts.
    pub fn canonical_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("building = {}", self.building),
            format!("seed = {}", self.seed),
            format!("train.days = {}", self.train_days),
            format!("test.days = {}", self.test_days),
            format!(
                "windows = {}",
                self.windows.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
            ),
            format!(
                "methods = {}",
                self.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
            ),
            format!("architectures = {}", self.architectures.join(",")),
            format!("weather.ambient_mean = {}", self.ambient_mean),
            format!("weather.ambient_amplitude = {}", self.ambient_amplitude),
            format!("weather.solar_peak = {}", self.solar_peak),
            format!("weather.internal_base = {}", self.internal_base),
            format!("weather.internal_peak = {}", self.internal_peak),
            format!("weather.noise_std = {}", self.weather_noise_std),
            format!("plant.meas_noise_std = {}", self.meas_noise_std),
            format!("thermostat.train_setpoint = {}", self.train_setpoint),
            format!("thermostat.deadband = {}", self.deadband),
            format!("thermostat.cool_capacity = {}", self.cool_capacity),
            format!("thermostat.heat_capacity = {}", self.heat_capacity),
            format!("sim3.setpoint = {}", self.sim3_setpoint),
            format!("noise.q_proc = {}", self.q_proc),
            format!("noise.r_meas = {}", self.r_meas),
            format!("optimizer.max_iters = {}", self.opt_max_iters),
            format!("optimizer.grad_tol = {}", self.opt_grad_tol),
            format!("optimizer.step_tol = {}", self.opt_step_tol),
            format!("optimizer.fd_step = {}", self.opt_fd_step),
            format!("optimizer.multistart = {}", self.opt_multistart),
            format!("power.cop = {}", self.cop),
            format!("power.p_other = {}", self.p_other),
            format!("power.pf = {}", self.power_factor),
        ];
        lines.sort();
        lines
    }

    /// 64-bit fingerprint of the effective configuration (seed included).
    pub fn config_hash(&self) -> String {
        format!("{:016x}", fnv1a64(self.canonical_lines().join("\n").as_bytes()))
    }

    pub fn t_s(&self) -> f64 {
        self.building.t_s()
    }

    pub fn weather_config(&self) -> WeatherConfig {
        WeatherConfig {
            n_days: self.train_days + self.test_days,
            t_s: self.t_s(),
            ambient_mean: self.ambient_mean,
            ambient_amplitude: self.ambient_amplitude,
            solar_peak: self.solar_peak,
            internal_base: self.internal_base,
            internal_peak: self.internal_peak,
            noise_std: self.weather_noise_std,
            rng_seed: self.seed,
        }
    }

    pub fn thermostat(&self, setpoint: f64) -> ThermostatConfig {
        ThermostatConfig {
            setpoint,
            deadband: self.deadband,
            cool_capacity: self.cool_capacity,
            heat_capacity: self.heat_capacity,
            mode: HvacMode::Off,
        }
    }

    pub fn optimizer_config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            max_iters: self.opt_max_iters,
            grad_tol: self.opt_grad_tol,
            step_tol: self.opt_step_tol,
            fd_step: self.opt_fd_step,
            multistart_count: self.opt_multistart,
            rng_seed: seed,
        }
    }

    pub fn noise_for(&self, topology: &RcTopology, first_measurement: f64) -> NoiseHyperParams {
        let n = topology.n_states();
        NoiseHyperParams {
            q_proc: Mat::identity(n).scale(self.q_proc),
            r_meas: self.r_meas,
            p0: Mat::identity(n),
            x0_prior: ThermalState::uniform(first_measurement, topology.n_hidden),
        }
    }
}
