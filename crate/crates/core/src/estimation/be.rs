//! Batch estimation: joint fit of parameters and the full state trajectory
//! with quadratic penalties on process and measurement residuals.
//!
//! For fixed parameters the trajectory subproblem is an unconstrained convex
//! quadratic (the dynamics are linear in the state), so it is eliminated
//! exactly by a block-tridiagonal solve instead of carrying thousands of
//! trajectory variables through the quasi-Newton outer loop. The outer
//! problem over parameters alone then has the same minimizers as the joint
//! formulation.

use super::kalman::NoiseHyperParams;
use super::EstimationError;
use crate::dataset::Dataset;
use crate::linalg::Mat;
use crate::thermal::{
    build_state_space, discretize, DiscreteStateSpace, RcParameters, RcTopology, ThermalState,
};

/// Diagonal jitter added to covariances before inversion.
const COV_JITTER: f64 = 1e-10;

/// A candidate decision of the batch estimator: parameters plus the full
/// state trajectory, one state per dataset sample. Process residuals are the
/// trajectory's deviations from the one-step dynamics; measurement residuals
/// its deviations from the recorded output.
#[derive(Debug, Clone)]
pub struct BeDecision {
    pub theta: RcParameters,
    pub x_traj: Vec<ThermalState>,
}

fn jittered_inverse(m: &Mat, name: &str) -> Result<Mat, EstimationError> {
    let n = m.rows();
    m.add(&Mat::identity(n).scale(COV_JITTER))
        .inverse()
        .map_err(|_| {
            EstimationError::InvalidConfig(format!("{name} is singular even after jitter"))
        })
}

/// Forcing term of one Euler step: `bd u + dd w`.
fn forcing(dss: &DiscreteStateSpace, dataset: &Dataset, k: usize) -> Vec<f64> {
    let n = dss.n_states();
    let wv = dataset.disturbance(k).as_array();
    let mut g = vec![0.0; n];
    for i in 0..n {
        g[i] = dss.bd.get(i, 0) * dataset.q_hvac[k];
        for j in 0..3 {
            g[i] += dss.dd.get(i, j) * wv[j];
        }
    }
    g
}

/// Quadratic batch objective of a decision: initial-state prior term plus
/// measurement and process residual terms. Non-finite residuals report as
/// `+inf`.
pub fn be_objective(
    dec: &BeDecision,
    dataset: &Dataset,
    noise: &NoiseHyperParams,
    topology: &RcTopology,
) -> Result<f64, EstimationError> {
    let s_len = dataset.len();
    if s_len == 0 {
        return Err(EstimationError::Dataset("dataset is empty".into()));
    }
    if dec.x_traj.len() != s_len {
        return Err(EstimationError::InvalidConfig(format!(
            "trajectory has {} states for {} samples",
            dec.x_traj.len(),
            s_len
        )));
    }
    dec.theta.validate(topology)?;
    let n = topology.n_states();
    noise.validate(n)?;
    let dss = discretize(&build_state_space(topology, &dec.theta)?, dataset.t_s)?;
    let q_inv = jittered_inverse(&noise.q_proc, "q_proc")?;
    let p0_inv = jittered_inverse(&noise.p0, "p0")?;

    let mut acc = 0.0;
    // prior on the initial state
    let d0: Vec<f64> = dec.x_traj[0]
        .to_vec()
        .iter()
        .zip(&noise.x0_prior.to_vec())
        .map(|(a, b)| a - b)
        .collect();
    let p0d = p0_inv.mul_vec(&d0);
    acc += crate::linalg::dot(&d0, &p0d);
    // measurement residuals
    for k in 0..s_len {
        let v = dataset.t_z[k] - dec.x_traj[k].t_z;
        acc += v * v / noise.r_meas;
    }
    // process residuals
    for k in 0..s_len - 1 {
        let xk = dec.x_traj[k].to_vec();
        let mut pred = dss.ad.mul_vec(&xk);
        let g = forcing(&dss, dataset, k);
        for i in 0..n {
            pred[i] += g[i];
        }
        let w: Vec<f64> = dec.x_traj[k + 1]
            .to_vec()
            .iter()
            .zip(&pred)
            .map(|(a, b)| a - b)
            .collect();
        let qw = q_inv.mul_vec(&w);
        acc += crate::linalg::dot(&w, &qw);
        if !acc.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    if !acc.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(acc)
}

/// Exact minimizer of [`be_objective`] over the trajectory at fixed
/// parameters: assembles the block tridiagonal normal equations and solves
/// them by block Gaussian elimination.
pub fn be_solve_trajectory(
    theta: &RcParameters,
    dataset: &Dataset,
    noise: &NoiseHyperParams,
    topology: &RcTopology,
) -> Result<BeDecision, EstimationError> {
    let s_len = dataset.len();
    if s_len < 2 {
        return Err(EstimationError::Dataset(
            "batch estimation needs at least 2 samples".into(),
        ));
    }
    theta.validate(topology)?;
    let n = topology.n_states();
    noise.validate(n)?;
    let dss = discretize(&build_state_space(topology, theta)?, dataset.t_s)?;
    let q_inv = jittered_inverse(&noise.q_proc, "q_proc")?;
    let p0_inv = jittered_inverse(&noise.p0, "p0")?;
    let r_inv = 1.0 / noise.r_meas;

    let f = &dss.ad;
    let ft_qi = f.transpose().matmul(&q_inv); // Fᵀ Q⁻¹
    let ft_qi_f = ft_qi.matmul(f); // Fᵀ Q⁻¹ F
    let qi_f = q_inv.matmul(f); // Q⁻¹ F
    // measurement information: r_inv on the zone-zone entry
    let mut meas = Mat::zeros(n, n);
    meas.set(0, 0, r_inv);

    // diagonal blocks and right-hand sides
    let mut diag = Vec::with_capacity(s_len);
    let mut rhs = Vec::with_capacity(s_len);
    for k in 0..s_len {
        let mut d = meas.clone();
        let mut r = vec![0.0; n];
        r[0] += r_inv * dataset.t_z[k];
        if k == 0 {
            d = d.add(&p0_inv);
            let prior = p0_inv.mul_vec(&noise.x0_prior.to_vec());
            for i in 0..n {
                r[i] += prior[i];
            }
        } else {
            d = d.add(&q_inv);
            let g_prev = forcing(&dss, dataset, k - 1);
            let qg = q_inv.mul_vec(&g_prev);
            for i in 0..n {
                r[i] += qg[i];
            }
        }
        if k + 1 < s_len {
            d = d.add(&ft_qi_f);
            let g_k = forcing(&dss, dataset, k);
            let fg = ft_qi.mul_vec(&g_k);
            for i in 0..n {
                r[i] -= fg[i];
            }
        }
        diag.push(d);
        rhs.push(r);
    }

    // off-diagonal blocks: upper U = -Fᵀ Q⁻¹ (couples x_k to x_{k+1}),
    // lower L = Uᵀ = -Q⁻¹ F
    let upper = ft_qi.scale(-1.0);
    let lower = qi_f.scale(-1.0);

    // forward elimination: D'_k = D_k - L D'_{k-1}⁻¹ U
    let mut diag_inv: Vec<Mat> = Vec::with_capacity(s_len);
    let mut rhs_mod = rhs;
    for k in 0..s_len {
        if k > 0 {
            let prev_inv = &diag_inv[k - 1];
            let l_prev_inv = lower.matmul(prev_inv);
            diag[k] = diag[k].sub(&l_prev_inv.matmul(&upper));
            let correction = l_prev_inv.mul_vec(&rhs_mod[k - 1]);
            for i in 0..n {
                rhs_mod[k][i] -= correction[i];
            }
        }
        let inv = diag[k]
            .inverse()
            .map_err(|_| EstimationError::Internal("singular block in trajectory solve".into()))?;
        diag_inv.push(inv);
    }

    // back substitution
    let mut states = vec![vec![0.0; n]; s_len];
    states[s_len - 1] = diag_inv[s_len - 1].mul_vec(&rhs_mod[s_len - 1]);
    for k in (0..s_len - 1).rev() {
        let coupled = upper.mul_vec(&states[k + 1]);
        let adjusted: Vec<f64> = rhs_mod[k]
            .iter()
            .zip(&coupled)
            .map(|(r, c)| r - c)
            .collect();
        states[k] = diag_inv[k].mul_vec(&adjusted);
    }

    let x_traj: Vec<ThermalState> = states.iter().map(|v| ThermalState::from_vec(v)).collect();
    if x_traj.iter().any(|s| !s.is_finite()) {
        return Err(EstimationError::Internal(
            "trajectory solve produced non-finite states".into(),
        ));
    }
    Ok(BeDecision {
        theta: theta.clone(),
        x_traj,
    })
}
