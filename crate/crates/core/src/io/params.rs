//! Fitted-model parameter files in the flat key-value format.

use std::fmt::Write as _;
use std::path::Path;

use super::kv::{parse_bool, parse_f64, parse_kv_lines, parse_u32, parse_usize};
use super::IoError;
use crate::eval::{FittedModel, ModelKind};
use crate::regression::{AlmonModel, AlmonPreset, AlmonSpec, RegressorName};
use crate::thermal::{RcParameters, RcPreset, RcTopology};

/// A fitted model plus the fit diagnostics a report needs.
#[derive(Debug, Clone)]
pub struct StoredModel {
    pub model: FittedModel,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes a fitted model with `#` metadata (config hash, seed).
pub fn write_params(
    stored: &StoredModel,
    path: &Path,
    meta: &[(String, String)],
) -> Result<(), IoError> {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}={v}");
    }
    let m = &stored.model;
    let _ = writeln!(out, "method = {}", m.method);
    let _ = writeln!(out, "architecture = {}", m.architecture);
    let _ = writeln!(out, "training_days = {}", m.training_days);
    let _ = writeln!(out, "converged = {}", stored.converged);
    let _ = writeln!(out, "objective = {}", fmt_f64(stored.objective));
    let _ = writeln!(out, "iterations = {}", stored.iterations);
    match &m.kind {
        ModelKind::Rc { topology, params } => {
            let _ = writeln!(out, "kind = rc");
            let _ = writeln!(out, "param.r_za = {}", fmt_f64(params.r_za));
            for (i, v) in params.r_zw.iter().enumerate() {
                let _ = writeln!(out, "param.r_zw.{i} = {}", fmt_f64(*v));
            }
            for (k, v) in params.r_w.iter().enumerate() {
                let _ = writeln!(out, "param.r_w.{k} = {}", fmt_f64(*v));
            }
            for (i, v) in params.r_wa.iter().enumerate() {
                if let Some(v) = v {
                    let _ = writeln!(out, "param.r_wa.{i} = {}", fmt_f64(*v));
                }
            }
            let _ = writeln!(out, "param.c_z = {}", fmt_f64(params.c_z));
            for (i, v) in params.c_w.iter().enumerate() {
                let _ = writeln!(out, "param.c_w.{i} = {}", fmt_f64(*v));
            }
            let _ = writeln!(out, "param.a_z = {}", fmt_f64(params.a_z));
            if topology.zone_internal_gain {
                let _ = writeln!(out, "param.b_z = {}", fmt_f64(params.b_z));
            }
            if topology.zone_solar_gain {
                let _ = writeln!(out, "param.d_z = {}", fmt_f64(params.d_z));
            }
            for (i, v) in params.wall_gain.iter().enumerate() {
                let _ = writeln!(out, "param.wall_gain.{i} = {}", fmt_f64(*v));
            }
        }
        ModelKind::Almon(almon) => {
            let _ = writeln!(out, "kind = almon");
            let _ = writeln!(out, "alpha0 = {}", fmt_f64(almon.alpha0));
            for (s, spec) in almon.specs.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "spec.{s} = {},{},{},{}",
                    spec.regressor, spec.start_lag, spec.end_lag, spec.poly_order
                );
                for (j, w) in almon.omega[s].iter().enumerate() {
                    let _ = writeln!(out, "omega.{s}.{j} = {}", fmt_f64(*w));
                }
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn parse_regressor(s: &str) -> Result<RegressorName, IoError> {
    match s {
        "T_z" => Ok(RegressorName::Tz),
        "P_c" => Ok(RegressorName::Pc),
        "P_h" => Ok(RegressorName::Ph),
        "D_c" => Ok(RegressorName::Dc),
        "D_h" => Ok(RegressorName::Dh),
        _ => Err(IoError::Config(format!("unknown regressor {s:?}"))),
    }
}

/// Reads a parameter file back into a model. RC architectures must be
/// presets so the topology is recoverable from the architecture label.
pub fn read_params(path: &Path) -> Result<StoredModel, IoError> {
    let text = std::fs::read_to_string(path)?;
    let kv = parse_kv_lines(&text)?;
    let method = kv.require("method")?.to_string();
    let architecture = kv.require("architecture")?.to_string();
    let training_days = parse_u32("training_days", kv.require("training_days")?)?;
    let converged = parse_bool("converged", kv.require("converged")?)?;
    let objective = parse_f64("objective", kv.require("objective")?)?;
    let iterations = parse_usize("iterations", kv.require("iterations")?)?;
    let kind = kv.require("kind")?;

    let model_kind = match kind {
        "rc" => {
            let preset = RcPreset::parse(&architecture).ok_or_else(|| {
                IoError::Config(format!(
                    "architecture {architecture:?} is not a known RC preset"
                ))
            })?;
            let topology = RcTopology::preset(preset);
            let f = |key: String| -> Result<f64, IoError> {
                parse_f64(&key, kv.require(&key)?)
            };
            let n = topology.n_hidden;
            let params = RcParameters {
                r_za: f("param.r_za".into())?,
                r_zw: (0..n)
                    .map(|i| f(format!("param.r_zw.{i}")))
                    .collect::<Result<_, _>>()?,
                r_w: (0..topology.coupled_pairs().len())
                    .map(|k| f(format!("param.r_w.{k}")))
                    .collect::<Result<_, _>>()?,
                r_wa: topology
                    .wall_ambient
                    .iter()
                    .enumerate()
                    .map(|(i, &coupled)| {
                        if coupled {
                            f(format!("param.r_wa.{i}")).map(Some)
                        } else {
                            Ok(None)
                        }
                    })
                    .collect::<Result<_, _>>()?,
                c_z: f("param.c_z".into())?,
                c_w: (0..n)
                    .map(|i| f(format!("param.c_w.{i}")))
                    .collect::<Result<_, _>>()?,
                a_z: f("param.a_z".into())?,
                b_z: if topology.zone_internal_gain {
                    f("param.b_z".into())?
                } else {
                    0.0
                },
                d_z: if topology.zone_solar_gain {
                    f("param.d_z".into())?
                } else {
                    0.0
                },
                wall_gain: if topology.gains_on_walls {
                    (0..n)
                        .map(|i| f(format!("param.wall_gain.{i}")))
                        .collect::<Result<_, _>>()?
                } else {
                    vec![]
                },
            };
            params
                .validate(&topology)
                .map_err(|e| IoError::Config(e.to_string()))?;
            ModelKind::Rc { topology, params }
        }
        "almon" => {
            let alpha0 = parse_f64("alpha0", kv.require("alpha0")?)?;
            let mut specs = Vec::new();
            let mut omega = Vec::new();
            let mut zeta = Vec::new();
            let mut s = 0usize;
            while let Some(spec_str) = kv.get(&format!("spec.{s}")) {
                let parts: Vec<&str> = spec_str.split(',').collect();
                if parts.len() != 4 {
                    return Err(IoError::Config(format!(
                        "spec.{s}: expected regressor,l,t,q, got {spec_str:?}"
                    )));
                }
                let spec = AlmonSpec::new(
                    parse_regressor(parts[0])?,
                    parse_usize("start_lag", parts[1])?,
                    parse_usize("end_lag", parts[2])?,
                    parse_usize("poly_order", parts[3])?,
                )
                .map_err(|e| IoError::Config(e.to_string()))?;
                let w: Vec<f64> = (0..spec.n_coeffs())
                    .map(|j| {
                        let key = format!("omega.{s}.{j}");
                        parse_f64(&key, kv.require(&key)?)
                    })
                    .collect::<Result<_, _>>()?;
                let basis = crate::regression::almon_basis(
                    spec.start_lag,
                    spec.end_lag,
                    spec.poly_order,
                )
                .map_err(|e| IoError::Config(e.to_string()))?;
                zeta.push(basis.mul_vec(&w));
                omega.push(w);
                specs.push(spec);
                s += 1;
            }
            if specs.is_empty() {
                return Err(IoError::Config("almon model has no specs".into()));
            }
            let preset = AlmonPreset::parse(&architecture).unwrap_or(AlmonPreset::Custom);
            ModelKind::Almon(AlmonModel {
                alpha0,
                omega,
                zeta,
                specs,
                preset,
            })
        }
        other => {
            return Err(IoError::Config(format!("unknown model kind {other:?}")));
        }
    };

    Ok(StoredModel {
        model: FittedModel {
            method,
            architecture,
            training_days,
            kind: model_kind,
        },
        objective,
        iterations,
        converged,
    })
}
