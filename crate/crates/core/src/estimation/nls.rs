//! Output-error objective under deterministic dynamics (single shooting).

use super::EstimationError;
use crate::dataset::Dataset;
use crate::thermal::{build_state_space, discretize, RcParameters, RcTopology, ThermalState};

/// Sum of squared output errors of the deterministic rollout from `x0`:
/// the hard dynamics constraint is substituted into the objective, leaving
/// `(theta, x0)` free. A rollout that leaves physical range reports `+inf`
/// so optimizers treat the candidate as unusable rather than erroring.
pub fn nls_objective(
    theta: &RcParameters,
    x0: &ThermalState,
    dataset: &Dataset,
    topology: &RcTopology,
) -> Result<f64, EstimationError> {
    if dataset.is_empty() {
        return Err(EstimationError::Dataset("dataset is empty".into()));
    }
    theta.validate(topology)?;
    if x0.dim() != topology.n_states() {
        return Err(EstimationError::InvalidConfig(format!(
            "initial state has {} nodes, topology has {}",
            x0.dim(),
            topology.n_states()
        )));
    }
    let dss = discretize(&build_state_space(topology, theta)?, dataset.t_s)?;
    let n = dss.n_states();
    let mut x = x0.to_vec();
    let mut acc = 0.0;
    for k in 0..dataset.len() {
        let resid = dataset.t_z[k] - x[0];
        acc += resid * resid;
        if !acc.is_finite() || x[0].abs() > 1e6 {
            return Ok(f64::INFINITY);
        }
        // advance in place
        let mut next = dss.ad.mul_vec(&x);
        let w = dataset.disturbance(k);
        let wv = w.as_array();
        for i in 0..n {
            next[i] += dss.bd.get(i, 0) * dataset.q_hvac[k];
            for j in 0..3 {
                next[i] += dss.dd.get(i, j) * wv[j];
            }
        }
        x = next;
    }
    if !acc.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(acc)
}
