//! Forward simulation of a discretized thermal model.

use super::model::DiscreteStateSpace;
use super::ThermalError;

/// Node temperatures in °C, zone first.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    pub t_z: f64,
    pub t_w: Vec<f64>,
}

impl ThermalState {
    pub fn new(t_z: f64, t_w: Vec<f64>) -> Self {
        ThermalState { t_z, t_w }
    }

    /// All nodes at one temperature.
    pub fn uniform(temp: f64, n_hidden: usize) -> Self {
        ThermalState {
            t_z: temp,
            t_w: vec![temp; n_hidden],
        }
    }

    pub fn dim(&self) -> usize {
        1 + self.t_w.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.t_z);
        v.extend_from_slice(&self.t_w);
        v
    }

    pub fn from_vec(v: &[f64]) -> Self {
        ThermalState {
            t_z: v[0],
            t_w: v[1..].to_vec(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t_z.is_finite() && self.t_w.iter().all(|v| v.is_finite())
    }
}

/// One sample of the exogenous disturbances: ambient °C, internal W, solar W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbanceSample {
    pub t_am: f64,
    pub q_int: f64,
    pub q_solar: f64,
}

impl DisturbanceSample {
    pub fn new(t_am: f64, q_int: f64, q_solar: f64) -> Self {
        DisturbanceSample { t_am, q_int, q_solar }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.t_am, self.q_int, self.q_solar]
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        if !(self.t_am.is_finite() && self.q_int.is_finite() && self.q_solar.is_finite()) {
            return Err(ThermalError::NonFinite("disturbance sample".into()));
        }
        if self.q_int < 0.0 || self.q_solar < 0.0 {
            return Err(ThermalError::NonFinite(format!(
                "heat gains must be non-negative: q_int={}, q_solar={}",
                self.q_int, self.q_solar
            )));
        }
        Ok(())
    }
}

/// Advances one step. Returns the next state and the output at the *current*
/// step, `y = t_z` before stepping.
pub fn step(
    dss: &DiscreteStateSpace,
    x: &ThermalState,
    u: f64,
    w: &DisturbanceSample,
) -> Result<(ThermalState, f64), ThermalError> {
    if x.dim() != dss.n_states() {
        return Err(ThermalError::DimensionMismatch(format!(
            "state has {} nodes, model has {}",
            x.dim(),
            dss.n_states()
        )));
    }
    if !x.is_finite() || !u.is_finite() {
        return Err(ThermalError::NonFinite("state or control input".into()));
    }
    if !(w.t_am.is_finite() && w.q_int.is_finite() && w.q_solar.is_finite()) {
        return Err(ThermalError::NonFinite("disturbance sample".into()));
    }
    let xv = x.to_vec();
    let y = xv[0];
    let mut next = dss.ad.mul_vec(&xv);
    let wv = w.as_array();
    let n = dss.n_states();
    for i in 0..n {
        next[i] += dss.bd.get(i, 0) * u;
        for j in 0..3 {
            next[i] += dss.dd.get(i, j) * wv[j];
        }
    }
    Ok((ThermalState::from_vec(&next), y))
}

/// States and per-step outputs of a rollout: `states.len() == outputs.len() + 1`.
#[derive(Debug, Clone)]
pub struct SimTrace {
    pub states: Vec<ThermalState>,
    pub outputs: Vec<f64>,
}

/// Iterates [`step`] over aligned input sequences.
pub fn simulate(
    dss: &DiscreteStateSpace,
    x0: &ThermalState,
    u_seq: &[f64],
    w_seq: &[DisturbanceSample],
) -> Result<SimTrace, ThermalError> {
    if u_seq.len() != w_seq.len() {
        return Err(ThermalError::LengthMismatch {
            u_len: u_seq.len(),
            w_len: w_seq.len(),
        });
    }
    let steps = u_seq.len();
    let mut states = Vec::with_capacity(steps + 1);
    let mut outputs = Vec::with_capacity(steps);
    states.push(x0.clone());
    let mut x = x0.clone();
    for k in 0..steps {
        let (next, y) = step(dss, &x, u_seq[k], &w_seq[k])?;
        outputs.push(y);
        states.push(next.clone());
        x = next;
    }
    Ok(SimTrace { states, outputs })
}
