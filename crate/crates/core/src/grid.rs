//! Mapping from thermal simulation to building electrical quantities.
//!
//! HVAC heat rate converts to active power through a constant COP (the heat
//! command passes through unchanged as the thermal input), other loads add
//! on top, and reactive power follows from the power factor.

use thiserror::Error;

use crate::thermal::{step, DiscreteStateSpace, DisturbanceSample, ThermalState, ThermalError};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("cop must be positive, got {0}")]
    InvalidCop(f64),
    #[error("power factor must lie in (0, 1], got {0}")]
    InvalidPowerFactor(f64),
    #[error("series profile index {index} out of range (length {len})")]
    ProfileIndex { index: usize, len: usize },
    #[error(transparent)]
    Thermal(#[from] ThermalError),
}

/// A quantity that is either constant or a per-step series.
#[derive(Debug, Clone)]
pub enum Profile {
    Constant(f64),
    Series(Vec<f64>),
}

impl Profile {
    pub fn at(&self, k: usize) -> Result<f64, GridError> {
        match self {
            Profile::Constant(v) => Ok(*v),
            Profile::Series(s) => s.get(k).copied().ok_or(GridError::ProfileIndex {
                index: k,
                len: s.len(),
            }),
        }
    }
}

/// Electrical parameters of a building connection.
#[derive(Debug, Clone)]
pub struct PowerParams {
    pub cop: f64,
    /// Non-HVAC load, W.
    pub p_other: Profile,
    /// Displacement power factor in (0, 1].
    pub power_factor: Profile,
}

impl PowerParams {
    pub fn constant(cop: f64, p_other: f64, pf: f64) -> PowerParams {
        PowerParams {
            cop,
            p_other: Profile::Constant(p_other),
            power_factor: Profile::Constant(pf),
        }
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.cop.is_finite() && self.cop > 0.0) {
            return Err(GridError::InvalidCop(self.cop));
        }
        Ok(())
    }
}

/// One step of electrical quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSample {
    pub p_hvac: f64,
    pub p_total: f64,
    pub q_reactive: f64,
}

/// Active HVAC power from the heat rate: `|q_hvac| / cop`. Heating and
/// cooling draw the same power for the same heat magnitude.
pub fn hvac_power(q_hvac: f64, params: &PowerParams) -> Result<f64, GridError> {
    params.validate()?;
    Ok(q_hvac.abs() / params.cop)
}

/// Total and reactive power for one step: `p_total = p_hvac + p_other` and
/// `q_reactive = p_total * tan(acos(pf))`.
pub fn power_sample(
    q_hvac: f64,
    p_other: f64,
    pf: f64,
    params: &PowerParams,
) -> Result<PowerSample, GridError> {
    if !(pf.is_finite() && pf > 0.0 && pf <= 1.0) {
        return Err(GridError::InvalidPowerFactor(pf));
    }
    let p_hvac = hvac_power(q_hvac, params)?;
    let p_total = p_hvac + p_other;
    let q_reactive = p_total * pf.acos().tan();
    Ok(PowerSample {
        p_hvac,
        p_total,
        q_reactive,
    })
}

/// Composes a thermal step with the power mapping: advances the state under
/// the commanded heat rate and reports the resulting electrical sample for
/// step `k`.
pub fn grid_edge_step(
    x: &ThermalState,
    q_hvac: f64,
    w: &DisturbanceSample,
    dss: &DiscreteStateSpace,
    params: &PowerParams,
    k: usize,
) -> Result<(ThermalState, PowerSample), GridError> {
    let (next, _y) = step(dss, x, q_hvac, w)?;
    let sample = power_sample(
        q_hvac,
        params.p_other.at(k)?,
        params.power_factor.at(k)?,
        params,
    )?;
    Ok((next, sample))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::{build_state_space, discretize, RcParameters, RcPreset, RcTopology};
    use approx::assert_abs_diff_eq;

    fn params() -> PowerParams {
        PowerParams::constant(3.0, 0.0, 1.0)
    }

    #[test]
    fn hvac_power_is_even_in_heat_rate() {
        let p = params();
        assert_eq!(hvac_power(-6000.0, &p).unwrap(), 2000.0);
        assert_eq!(hvac_power(6000.0, &p).unwrap(), 2000.0);
        assert_eq!(hvac_power(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn reactive_power_three_four_five_triangle() {
        let p = params();
        let s = power_sample(300.0, 0.0, 0.8, &p).unwrap();
        assert_eq!(s.p_total, 100.0);
        assert_abs_diff_eq!(s.q_reactive, 75.0, epsilon = 1e-12);
    }

    #[test]
    fn unity_power_factor_has_no_reactive_power() {
        let s = power_sample(3000.0, 500.0, 1.0, &params()).unwrap();
        assert_eq!(s.q_reactive, 0.0);
        assert_eq!(s.p_total, 1500.0);
    }

    #[test]
    fn zero_other_load_makes_total_equal_hvac() {
        let s = power_sample(-4500.0, 0.0, 0.9, &params()).unwrap();
        assert_eq!(s.p_total, s.p_hvac);
    }

    #[test]
    fn out_of_range_power_factor_rejected() {
        assert!(power_sample(100.0, 0.0, 0.0, &params()).is_err());
        assert!(power_sample(100.0, 0.0, 1.2, &params()).is_err());
    }

    #[test]
    fn reactive_power_decreases_in_power_factor() {
        let p = params();
        let mut last = f64::INFINITY;
        for pf in [0.7, 0.8, 0.9, 1.0] {
            let s = power_sample(300.0, 0.0, pf, &p).unwrap();
            assert!(s.q_reactive < last);
            last = s.q_reactive;
        }
    }

    fn toy_dss() -> DiscreteStateSpace {
        let topo = RcTopology::preset(RcPreset::R1);
        let p = RcParameters::single_node(10.0, 1000.0, 1.0, 0.0, 0.0);
        discretize(&build_state_space(&topo, &p).unwrap(), 600.0).unwrap()
    }

    #[test]
    fn all_zero_inputs_give_all_zero_power() {
        let dss = toy_dss();
        let x = ThermalState::uniform(20.0, 0);
        let w = DisturbanceSample::new(20.0, 0.0, 0.0);
        let (_, s) = grid_edge_step(&x, 0.0, &w, &dss, &params(), 0).unwrap();
        assert_eq!(s, PowerSample { p_hvac: 0.0, p_total: 0.0, q_reactive: 0.0 });
    }

    #[test]
    fn composition_matches_manual_sequence() {
        let dss = toy_dss();
        let x = ThermalState::uniform(24.0, 0);
        let w = DisturbanceSample::new(30.0, 0.0, 0.0);
        let p = PowerParams::constant(3.0, 150.0, 0.85);
        let (next, sample) = grid_edge_step(&x, -2400.0, &w, &dss, &p, 0).unwrap();
        let (expect_next, _) = step(&dss, &x, -2400.0, &w).unwrap();
        let expect_sample = power_sample(-2400.0, 150.0, 0.85, &p).unwrap();
        assert_eq!(next, expect_next);
        assert_eq!(sample, expect_sample);
    }

    #[test]
    fn closed_loop_energy_identity() {
        // sum(p_hvac * t_s) == sum(|q_hvac| * t_s) / cop over a day of cycling
        let dss = toy_dss();
        let p = params();
        let mut x = ThermalState::uniform(22.0, 0);
        let w = DisturbanceSample::new(30.0, 0.0, 0.0);
        let mut energy_elec = 0.0;
        let mut energy_heat = 0.0;
        for k in 0..144 {
            let q = if x.t_z > 23.0 { -2000.0 } else { 0.0 };
            let (next, s) = grid_edge_step(&x, q, &w, &dss, &p, k).unwrap();
            energy_elec += s.p_hvac * dss.t_s;
            energy_heat += q.abs() * dss.t_s;
            x = next;
        }
        assert_abs_diff_eq!(energy_elec, energy_heat / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn series_profiles_index_by_step() {
        let p = PowerParams {
            cop: 3.0,
            p_other: Profile::Series(vec![100.0, 200.0]),
            power_factor: Profile::Constant(1.0),
        };
        assert_eq!(p.p_other.at(1).unwrap(), 200.0);
        assert!(p.p_other.at(2).is_err());
    }
}
