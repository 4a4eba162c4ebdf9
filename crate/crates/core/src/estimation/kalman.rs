//! Discrete Kalman filter over the thermal model and the innovation
//! log-likelihood objective.

use super::EstimationError;
use crate::dataset::Dataset;
use crate::linalg::Mat;
use crate::thermal::{
    build_state_space, discretize, DiscreteStateSpace, DisturbanceSample, RcParameters,
    RcTopology, ThermalState,
};

/// Noise model and initial beliefs shared by the batch and filter-based
/// estimators. Treated as hyperparameters, not estimated.
#[derive(Debug, Clone)]
pub struct NoiseHyperParams {
    /// Process-noise covariance, °C² per step.
    pub q_proc: Mat,
    /// Measurement-noise variance, °C².
    pub r_meas: f64,
    /// Initial state-error covariance.
    pub p0: Mat,
    pub x0_prior: ThermalState,
}

impl NoiseHyperParams {
    /// Shipped defaults: small process noise, moderate measurement noise,
    /// unit initial covariance, prior state at the first measurement.
    pub fn defaults(topology: &RcTopology, first_measurement: f64) -> NoiseHyperParams {
        let n = topology.n_states();
        NoiseHyperParams {
            q_proc: Mat::identity(n).scale(1e-4),
            r_meas: 1e-2,
            p0: Mat::identity(n),
            x0_prior: ThermalState::uniform(first_measurement, topology.n_hidden),
        }
    }

    pub fn with_q_scale(mut self, scale: f64) -> NoiseHyperParams {
        let n = self.q_proc.rows();
        self.q_proc = Mat::identity(n).scale(scale);
        self
    }

    pub fn validate(&self, n_states: usize) -> Result<(), EstimationError> {
        if self.q_proc.rows() != n_states
            || self.q_proc.cols() != n_states
            || self.p0.rows() != n_states
            || self.p0.cols() != n_states
            || self.x0_prior.dim() != n_states
        {
            return Err(EstimationError::InvalidConfig(format!(
                "noise hyperparameters sized for {} states, model has {}",
                self.q_proc.rows(),
                n_states
            )));
        }
        if !(self.r_meas.is_finite() && self.r_meas > 0.0) {
            return Err(EstimationError::InvalidConfig(format!(
                "measurement variance must be positive, got {}",
                self.r_meas
            )));
        }
        for (name, m) in [("q_proc", &self.q_proc), ("p0", &self.p0)] {
            let scale = m.max_abs().max(1.0);
            for i in 0..n_states {
                for j in 0..i {
                    if (m.get(i, j) - m.get(j, i)).abs() > 1e-9 * scale {
                        return Err(EstimationError::InvalidConfig(format!(
                            "{name} must be symmetric"
                        )));
                    }
                }
            }
            let min_eig = m.symmetric_eigenvalues()[0];
            if min_eig < -1e-9 * scale {
                return Err(EstimationError::InvalidConfig(format!(
                    "{name} must be positive semidefinite (min eigenvalue {min_eig})"
                )));
            }
        }
        Ok(())
    }
}

/// Filter state between measurements: the one-step prediction and its
/// covariance, plus the innovation and innovation variance of the most
/// recently absorbed measurement.
#[derive(Debug, Clone)]
pub struct KalmanState {
    pub x_pred: ThermalState,
    pub p_pred: Mat,
    pub innovation: f64,
    pub s_var: f64,
}

/// Filter state before any measurement has been absorbed.
pub fn kalman_init(noise: &NoiseHyperParams) -> KalmanState {
    let s0 = noise.p0.get(0, 0) + noise.r_meas;
    KalmanState {
        x_pred: noise.x0_prior.clone(),
        p_pred: noise.p0.clone(),
        innovation: 0.0,
        s_var: s0,
    }
}

/// One predict-update cycle: absorbs the measurement `y`, then propagates
/// through the dynamics under `(u, w)`. The returned state carries this
/// step's innovation and variance alongside the next prediction.
pub fn kalman_step(
    ks: &KalmanState,
    u: f64,
    w: &DisturbanceSample,
    y: f64,
    dss: &DiscreteStateSpace,
    noise: &NoiseHyperParams,
) -> Result<KalmanState, EstimationError> {
    let n = dss.n_states();
    let c = &dss.c;
    let x_pred = ks.x_pred.to_vec();
    let p = &ks.p_pred;

    let s = c.matmul(p).matmul(&c.transpose()).get(0, 0) + noise.r_meas;
    if !(s.is_finite() && s > 0.0) {
        return Err(EstimationError::Internal(format!(
            "innovation variance not positive: {s}"
        )));
    }
    let e = y - c.mul_vec(&x_pred)[0];

    // gain K = P Cᵀ / S
    let pct = p.matmul(&c.transpose());
    let k_gain: Vec<f64> = (0..n).map(|i| pct.get(i, 0) / s).collect();

    let x_filt: Vec<f64> = (0..n).map(|i| x_pred[i] + k_gain[i] * e).collect();
    // P_f = P - K C P
    let cp = c.matmul(p);
    let mut p_filt = p.clone();
    for i in 0..n {
        for j in 0..n {
            p_filt.set(i, j, p.get(i, j) - k_gain[i] * cp.get(0, j));
        }
    }
    let p_filt = p_filt.symmetrized();

    // propagate
    let mut x_next = dss.ad.mul_vec(&x_filt);
    let wv = w.as_array();
    for i in 0..n {
        x_next[i] += dss.bd.get(i, 0) * u;
        for j in 0..3 {
            x_next[i] += dss.dd.get(i, j) * wv[j];
        }
    }
    let p_next = dss
        .ad
        .matmul(&p_filt)
        .matmul(&dss.ad.transpose())
        .add(&noise.q_proc)
        .symmetrized();

    Ok(KalmanState {
        x_pred: ThermalState::from_vec(&x_next),
        p_pred: p_next,
        innovation: e,
        s_var: s,
    })
}

/// Runs the filter over a span of samples, accumulating
/// `sum(e²/S + ln S)`. Returns the accumulated objective and the filter
/// state left after the last sample, so spans concatenate exactly.
fn mle_accumulate(
    start: KalmanState,
    dss: &DiscreteStateSpace,
    u: &[f64],
    w: &[DisturbanceSample],
    y: &[f64],
    noise: &NoiseHyperParams,
) -> Result<(f64, KalmanState), EstimationError> {
    let mut ks = start;
    let mut acc = 0.0;
    for k in 0..y.len() {
        ks = kalman_step(&ks, u[k], &w[k], y[k], dss, noise)?;
        acc += ks.innovation * ks.innovation / ks.s_var + ks.s_var.ln();
        if !acc.is_finite() {
            return Ok((f64::INFINITY, ks));
        }
    }
    Ok((acc, ks))
}

/// Innovation log-likelihood objective of the filter run over the dataset
/// from the configured prior. Non-finite recursions report as `+inf`.
pub fn mle_objective(
    theta: &RcParameters,
    dataset: &Dataset,
    noise: &NoiseHyperParams,
    topology: &RcTopology,
) -> Result<f64, EstimationError> {
    if dataset.is_empty() {
        return Err(EstimationError::Dataset("dataset is empty".into()));
    }
    theta.validate(topology)?;
    noise.validate(topology.n_states())?;
    let dss = discretize(&build_state_space(topology, theta)?, dataset.t_s)?;
    let w = dataset.disturbances();
    match mle_accumulate(kalman_init(noise), &dss, &dataset.q_hvac, &w, &dataset.t_z, noise) {
        Ok((acc, _)) => Ok(acc),
        Err(EstimationError::Internal(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}
