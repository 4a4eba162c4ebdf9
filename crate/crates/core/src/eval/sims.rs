//! The three simulation runners.

use super::metrics::average_accuracy;
use super::model::{FittedModel, ModelKind};
use super::{EvalError, EvalReport, SimType, DIVERGENCE_LIMIT_C, OCCUPANCY_MARGIN_C};
use crate::dataset::Dataset;
use crate::plant::{thermostat_step, ThermostatConfig};
use crate::regression::{degree_days, RegressorName};
use crate::thermal::{
    build_state_space, discretize, DiscreteStateSpace, DisturbanceSample, RcParameters,
    RcTopology, ThermalState,
};

fn rc_discretize(
    topology: &RcTopology,
    params: &RcParameters,
    t_s: f64,
) -> Result<DiscreteStateSpace, EvalError> {
    Ok(discretize(&build_state_space(topology, params)?, t_s)?)
}

fn advance(dss: &DiscreteStateSpace, x: &[f64], u: f64, w: &DisturbanceSample) -> Vec<f64> {
    let n = dss.n_states();
    let mut next = dss.ad.mul_vec(x);
    let wv = w.as_array();
    for i in 0..n {
        next[i] += dss.bd.get(i, 0) * u;
        for j in 0..3 {
            next[i] += dss.dd.get(i, j) * wv[j];
        }
    }
    next
}

fn diverged(t_z: f64) -> bool {
    !t_z.is_finite() || t_z.abs() > DIVERGENCE_LIMIT_C
}

/// One-step prediction over measured data. RC hidden states roll forward
/// while the measured zone temperature replaces the zone state each step;
/// regression models read all lags from the recorded series. Returns the
/// predictions (aligned with the compared reference window) and the report.
pub fn run_sim1(model: &FittedModel, dataset: &Dataset) -> Result<(Vec<f64>, EvalReport), EvalError> {
    let s_len = dataset.len();
    let (preds, refs, divergent): (Vec<f64>, &[f64], bool) = match &model.kind {
        ModelKind::Rc { topology, params } => {
            if s_len < 2 {
                return Err(EvalError::InsufficientData { needed: 2, got: s_len });
            }
            let dss = rc_discretize(topology, params, dataset.t_s)?;
            let mut hidden = vec![dataset.t_z[0]; topology.n_hidden];
            let mut preds = Vec::with_capacity(s_len - 1);
            let mut divergent = false;
            for k in 0..s_len - 1 {
                let mut x = Vec::with_capacity(1 + hidden.len());
                x.push(dataset.t_z[k]);
                x.extend_from_slice(&hidden);
                let next = advance(&dss, &x, dataset.q_hvac[k], &dataset.disturbance(k));
                if diverged(next[0]) {
                    divergent = true;
                    break;
                }
                preds.push(next[0]);
                hidden.copy_from_slice(&next[1..]);
            }
            let n = preds.len();
            (preds, &dataset.t_z[1..1 + n], divergent)
        }
        ModelKind::Almon(almon) => {
            let burn = almon.max_end_lag();
            if s_len < burn + 2 {
                return Err(EvalError::InsufficientData {
                    needed: burn + 2,
                    got: s_len,
                });
            }
            let d_c: Vec<f64> = dataset.t_am.iter().map(|&t| degree_days(t).0).collect();
            let d_h: Vec<f64> = dataset.t_am.iter().map(|&t| degree_days(t).1).collect();
            let mut preds = Vec::with_capacity(s_len - burn - 1);
            let mut divergent = false;
            for k in burn..s_len - 1 {
                let p = almon.predict(k, &|reg, idx| match reg {
                    RegressorName::Tz => dataset.t_z[idx],
                    RegressorName::Pc => dataset.p_c[idx],
                    RegressorName::Ph => dataset.p_h[idx],
                    RegressorName::Dc => d_c[idx],
                    RegressorName::Dh => d_h[idx],
                });
                if diverged(p) {
                    divergent = true;
                    break;
                }
                preds.push(p);
            }
            let n = preds.len();
            (preds, &dataset.t_z[burn + 1..burn + 1 + n], divergent)
        }
    };
    let accuracy = average_accuracy(refs, &preds)?;
    let report = EvalReport {
        method: model.method.clone(),
        architecture: model.architecture.clone(),
        sim: SimType::Sim1,
        training_days: model.training_days,
        average_accuracy: Some(accuracy),
        deadband_occupancy: None,
        divergent,
        trace_id: model.trace_id(SimType::Sim1),
    };
    Ok((preds, report))
}

/// Free rollout on the recorded inputs with prediction feedback. `x0`
/// overrides the default initial state (first measured output on all nodes);
/// regression models always seed their lag window from the measured head of
/// the dataset.
pub fn run_sim2(
    model: &FittedModel,
    dataset: &Dataset,
    x0: Option<&ThermalState>,
) -> Result<(Vec<f64>, EvalReport), EvalError> {
    let s_len = dataset.len();
    let (preds, refs, divergent): (Vec<f64>, &[f64], bool) = match &model.kind {
        ModelKind::Rc { topology, params } => {
            if s_len < 2 {
                return Err(EvalError::InsufficientData { needed: 2, got: s_len });
            }
            let dss = rc_discretize(topology, params, dataset.t_s)?;
            let default_x0 = ThermalState::uniform(dataset.t_z[0], topology.n_hidden);
            let mut x = x0.unwrap_or(&default_x0).to_vec();
            let mut preds = Vec::with_capacity(s_len);
            let mut divergent = false;
            for k in 0..s_len {
                if diverged(x[0]) {
                    divergent = true;
                    break;
                }
                preds.push(x[0]);
                if k + 1 < s_len {
                    x = advance(&dss, &x, dataset.q_hvac[k], &dataset.disturbance(k));
                }
            }
            let n = preds.len();
            (preds, &dataset.t_z[..n], divergent)
        }
        ModelKind::Almon(almon) => {
            let burn = almon.max_end_lag();
            if s_len < burn + 2 {
                return Err(EvalError::InsufficientData {
                    needed: burn + 2,
                    got: s_len,
                });
            }
            let d_c: Vec<f64> = dataset.t_am.iter().map(|&t| degree_days(t).0).collect();
            let d_h: Vec<f64> = dataset.t_am.iter().map(|&t| degree_days(t).1).collect();
            let mut t_z = dataset.t_z[..=burn].to_vec();
            let mut preds = Vec::with_capacity(s_len - burn - 1);
            let mut divergent = false;
            for j in burn + 1..s_len {
                let k = j - 1;
                let p = almon.predict(k, &|reg, idx| match reg {
                    RegressorName::Tz => t_z[idx],
                    RegressorName::Pc => dataset.p_c[idx],
                    RegressorName::Ph => dataset.p_h[idx],
                    RegressorName::Dc => d_c[idx],
                    RegressorName::Dh => d_h[idx],
                });
                if diverged(p) {
                    divergent = true;
                    break;
                }
                t_z.push(p);
                preds.push(p);
            }
            let n = preds.len();
            (preds, &dataset.t_z[burn + 1..burn + 1 + n], divergent)
        }
    };
    let accuracy = average_accuracy(refs, &preds)?;
    let report = EvalReport {
        method: model.method.clone(),
        architecture: model.architecture.clone(),
        sim: SimType::Sim2,
        training_days: model.training_days,
        average_accuracy: Some(accuracy),
        deadband_occupancy: None,
        divergent,
        trace_id: model.trace_id(SimType::Sim2),
    };
    Ok((preds, report))
}

/// Closed-loop trajectory of a Sim3 run, with the thermostat band carried
/// along for plotting.
#[derive(Debug, Clone)]
pub struct Sim3Trace {
    pub t_z: Vec<f64>,
    pub q_hvac: Vec<f64>,
    pub band_low: f64,
    pub band_high: f64,
}

/// Closed loop of the learned model under a thermostat policy. Regression
/// models receive the commanded heat rate as electrical power `|q|/cop`
/// split by mode; their lag windows are seeded with the initial temperature
/// and zero power. Scored by the fraction of post-transient samples within
/// the deadband plus a small margin.
pub fn run_sim3(
    model: &FittedModel,
    weather: &[DisturbanceSample],
    t_s: f64,
    thermo: &ThermostatConfig,
    x0: Option<&ThermalState>,
    cop: f64,
) -> Result<(Sim3Trace, EvalReport), EvalError> {
    thermo.validate()?;
    let l = weather.len();
    let mut t_trace = Vec::with_capacity(l);
    let mut q_trace = Vec::with_capacity(l);
    let mut mode = thermo.mode;
    let mut divergent = false;

    match &model.kind {
        ModelKind::Rc { topology, params } => {
            let dss = rc_discretize(topology, params, t_s)?;
            let default_x0 = ThermalState::uniform(thermo.setpoint, topology.n_hidden);
            let mut x = x0.unwrap_or(&default_x0).to_vec();
            for k in 0..l {
                if diverged(x[0]) {
                    divergent = true;
                    break;
                }
                let (next_mode, q) = thermostat_step(x[0], mode, thermo);
                mode = next_mode;
                t_trace.push(x[0]);
                q_trace.push(q);
                if k + 1 < l {
                    x = advance(&dss, &x, q, &weather[k]);
                }
            }
        }
        ModelKind::Almon(almon) => {
            let pad = almon.max_end_lag();
            let t_init = x0.map(|s| s.t_z).unwrap_or(thermo.setpoint);
            let mut t_z = vec![t_init; pad + 1];
            let mut p_c = vec![0.0; pad + l];
            let mut p_h = vec![0.0; pad + l];
            let mut t_am = vec![weather[0].t_am; pad + l];
            for (k, w) in weather.iter().enumerate() {
                t_am[pad + k] = w.t_am;
            }
            for k in 0..l {
                let cur = t_z[pad + k];
                if diverged(cur) {
                    divergent = true;
                    break;
                }
                let (next_mode, q) = thermostat_step(cur, mode, thermo);
                mode = next_mode;
                p_c[pad + k] = if q < 0.0 { -q / cop } else { 0.0 };
                p_h[pad + k] = if q > 0.0 { q / cop } else { 0.0 };
                t_trace.push(cur);
                q_trace.push(q);
                if k + 1 < l {
                    let p = almon.predict(pad + k, &|reg, idx| match reg {
                        RegressorName::Tz => t_z[idx],
                        RegressorName::Pc => p_c[idx],
                        RegressorName::Ph => p_h[idx],
                        RegressorName::Dc => degree_days(t_am[idx]).0,
                        RegressorName::Dh => degree_days(t_am[idx]).1,
                    });
                    t_z.push(p);
                }
            }
        }
    }

    let occupancy = deadband_occupancy(&t_trace, t_s, thermo);
    let report = EvalReport {
        method: model.method.clone(),
        architecture: model.architecture.clone(),
        sim: SimType::Sim3,
        training_days: model.training_days,
        average_accuracy: None,
        deadband_occupancy: Some(occupancy),
        divergent,
        trace_id: model.trace_id(SimType::Sim3),
    };
    Ok((
        Sim3Trace {
            t_z: t_trace,
            q_hvac: q_trace,
            band_low: thermo.setpoint - thermo.deadband,
            band_high: thermo.setpoint + thermo.deadband,
        },
        report,
    ))
}

/// Fraction of samples within `deadband + margin` of the setpoint, skipping
/// the first day as transient when the trace is long enough.
fn deadband_occupancy(t_z: &[f64], t_s: f64, thermo: &ThermostatConfig) -> f64 {
    if t_z.is_empty() {
        return 0.0;
    }
    let per_day =
        ((super::SIM3_TRANSIENT_DAYS * 86_400.0) / t_s).round() as usize;
    let scored = if t_z.len() > per_day { &t_z[per_day..] } else { t_z };
    let band = thermo.deadband + OCCUPANCY_MARGIN_C;
    let in_band = scored
        .iter()
        .filter(|&&t| (t - thermo.setpoint).abs() <= band)
        .count();
    in_band as f64 / scored.len() as f64
}
