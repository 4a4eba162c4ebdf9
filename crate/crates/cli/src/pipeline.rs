//! The four pipeline stages behind the subcommands.

use std::fmt;
use std::path::{Path, PathBuf};

use thermident_core::dataset::Dataset;
use thermident_core::estimation::estimate;
use thermident_core::eval::{run_sim1, run_sim2, run_sim3, EvalReport, FittedModel, ModelKind, SimType};
use thermident_core::grid::{power_sample, PowerParams};
use thermident_core::io::{
    read_dataset, read_params, read_report, write_dataset, write_params, write_report,
    write_trace, MethodSel, ReportRow, ScenarioConfig, StoredModel, TraceColumn,
};
use thermident_core::plant::{gen_weather, generate_dataset};
use thermident_core::regression::{build_design, lls_fit_preset, AlmonPreset};
use thermident_core::rng::fnv1a64;
use thermident_core::thermal::{RcPreset, RcTopology, ThermalState};

use crate::args::Args;
use crate::par::parallel_map;

#[derive(Debug)]
pub struct PipelineError(String);

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for PipelineError {
    fn from(e: E) -> Self {
        PipelineError(e.to_string())
    }
}

fn err(msg: impl Into<String>) -> PipelineError {
    PipelineError(msg.into())
}

/// One estimation/evaluation unit: a method fitted to an architecture on a
/// training window.
#[derive(Debug, Clone)]
struct Cell {
    method: MethodSel,
    architecture: String,
    window_days: u32,
}

impl Cell {
    fn stem(&self) -> String {
        format!("{}_{}_{}d", self.method, self.architecture, self.window_days)
    }
}

pub struct Pipeline {
    cfg: ScenarioConfig,
    out: PathBuf,
    hash: String,
}

impl Pipeline {
    pub fn new(args: &Args) -> Result<Pipeline, PipelineError> {
        let mut cfg = ScenarioConfig::from_file(&args.config)?;
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        let hash = cfg.config_hash();
        Ok(Pipeline {
            cfg,
            out: args.out.clone(),
            hash,
        })
    }

    fn meta(&self) -> Vec<(String, String)> {
        vec![
            ("config_hash".into(), self.hash.clone()),
            ("seed".into(), self.cfg.seed.to_string()),
            ("building".into(), self.cfg.building.name().into()),
        ]
    }

    fn data_dir(&self) -> PathBuf {
        self.out.join("data")
    }

    fn params_dir(&self) -> PathBuf {
        self.out.join("params")
    }

    fn traces_dir(&self) -> PathBuf {
        self.out.join("traces")
    }

    fn eval_dir(&self) -> PathBuf {
        self.out.join("eval")
    }

    fn train_path(&self) -> PathBuf {
        self.data_dir()
            .join(format!("{}_train.csv", self.cfg.building))
    }

    fn test_path(&self) -> PathBuf {
        self.data_dir()
            .join(format!("{}_test.csv", self.cfg.building))
    }

    fn results_path(&self) -> PathBuf {
        self.eval_dir().join("results.csv")
    }

    fn report_path(&self) -> PathBuf {
        self.out.join("report.csv")
    }

    fn check_hash(&self, meta: &[(String, String)], what: &Path) -> Result<(), PipelineError> {
        match meta.iter().find(|(k, _)| k == "config_hash") {
            Some((_, h)) if *h == self.hash => Ok(()),
            Some((_, h)) => Err(err(format!(
                "{} was produced with config hash {h}, current config hashes to {}; regenerate or fix the config",
                what.display(),
                self.hash
            ))),
            None => Err(err(format!(
                "{} carries no config hash; not a pipeline artifact",
                what.display()
            ))),
        }
    }

    /// All requested cells in deterministic order: RC methods fan out over
    /// RC architectures and training windows; the regression fit uses its
    /// building's architecture on the full training span.
    fn cells(&self) -> Vec<Cell> {
        let rc_archs: Vec<&String> = self
            .cfg
            .architectures
            .iter()
            .filter(|a| self.cfg.building.rc_architectures().contains(&a.as_str()))
            .collect();
        let has_als_arch = self
            .cfg
            .architectures
            .iter()
            .any(|a| a == self.cfg.building.als_architecture());
        let mut cells = Vec::new();
        for method in &self.cfg.methods {
            match method {
                MethodSel::Rc(_) => {
                    for arch in &rc_archs {
                        for w in &self.cfg.windows {
                            cells.push(Cell {
                                method: *method,
                                architecture: (*arch).clone(),
                                window_days: *w,
                            });
                        }
                    }
                }
                MethodSel::Als => {
                    if has_als_arch {
                        cells.push(Cell {
                            method: *method,
                            architecture: self.cfg.building.als_architecture().into(),
                            window_days: self.cfg.train_days,
                        });
                    }
                }
            }
        }
        cells
    }

    /// Rolls the truth plant closed-loop over the whole span and splits it
    /// into contiguous training and testing datasets.
    pub fn generate(&self) -> Result<i32, PipelineError> {
        let cfg = &self.cfg;
        std::fs::create_dir_all(self.data_dir())?;
        let weather = gen_weather(&cfg.weather_config())?;
        let plant = cfg.building.truth_plant();
        let thermo = cfg.thermostat(cfg.train_setpoint);
        let full = generate_dataset(
            &plant,
            &thermo,
            &weather,
            cfg.t_s(),
            cfg.meas_noise_std,
            cfg.seed,
        )?;
        let spd = full.samples_per_day();
        let mut train = full.slice(0, cfg.train_days as usize * spd)?;
        let mut test = full.slice(cfg.train_days as usize * spd, cfg.test_days as usize * spd)?;
        let mut meta = self.meta();
        meta.push(("role".into(), "train".into()));
        train.meta = meta.clone();
        write_dataset(&train, &self.train_path())?;
        meta.last_mut().unwrap().1 = "test".into();
        test.meta = meta;
        write_dataset(&test, &self.test_path())?;
        println!(
            "generate: wrote {} ({} samples) and {} ({} samples)",
            self.train_path().display(),
            train.len(),
            self.test_path().display(),
            test.len()
        );
        Ok(0)
    }

    /// Fits every cell and writes one parameter file each. Returns exit
    /// code 3 when any cell fails to converge (its file is still written
    /// when a result exists).
    pub fn estimate(&self) -> Result<i32, PipelineError> {
        let train = read_dataset(&self.train_path())?;
        self.check_hash(&train.meta, &self.train_path())?;
        std::fs::create_dir_all(self.params_dir())?;
        let cells = self.cells();
        let outcomes = parallel_map(&cells, |cell| {
            (cell.stem(), self.run_estimate_cell(cell, &train))
        });
        let mut all_converged = true;
        for (stem, outcome) in outcomes {
            match outcome {
                Ok(stored) => {
                    if !stored.converged {
                        all_converged = false;
                        eprintln!("estimate: cell {stem} did not converge (objective {})", stored.objective);
                    }
                    let path = self.params_dir().join(format!("{stem}.params"));
                    write_params(&stored, &path, &self.meta())?;
                    println!(
                        "estimate: {stem} objective={} converged={}",
                        stored.objective, stored.converged
                    );
                }
                Err(e) => {
                    all_converged = false;
                    eprintln!("estimate: cell {stem} failed: {e}");
                }
            }
        }
        Ok(if all_converged { 0 } else { 3 })
    }

    fn run_estimate_cell(
        &self,
        cell: &Cell,
        train: &Dataset,
    ) -> Result<StoredModel, PipelineError> {
        let cfg = &self.cfg;
        match cell.method {
            MethodSel::Rc(method) => {
                let window = train.last_days(cell.window_days)?;
                let preset = RcPreset::parse(&cell.architecture)
                    .ok_or_else(|| err(format!("unknown RC preset {}", cell.architecture)))?;
                let topology = RcTopology::preset(preset);
                let noise = cfg.noise_for(&topology, window.t_z[0]);
                let cell_seed = cfg.seed ^ fnv1a64(cell.stem().as_bytes());
                let ocfg = cfg.optimizer_config(cell_seed);
                let result = estimate(method, &window, &topology, &noise, &ocfg)?;
                Ok(StoredModel {
                    model: FittedModel::rc(
                        method.name(),
                        cell.architecture.clone(),
                        cell.window_days,
                        topology,
                        result.theta_hat,
                    ),
                    objective: result.objective,
                    iterations: result.iterations,
                    converged: result.converged,
                })
            }
            MethodSel::Als => {
                let preset = AlmonPreset::parse(&cell.architecture)
                    .ok_or_else(|| err(format!("unknown regression preset {}", cell.architecture)))?;
                let design = build_design(train, &preset.specs())?;
                let model = lls_fit_preset(&design, preset)?;
                // residual sum of squares as the reported objective
                let mut beta = vec![model.alpha0];
                for w in &model.omega {
                    beta.extend_from_slice(w);
                }
                let fitted = design.x.mul_vec(&beta);
                let rss: f64 = design
                    .target
                    .iter()
                    .zip(&fitted)
                    .map(|(y, f)| (y - f) * (y - f))
                    .sum();
                Ok(StoredModel {
                    model: FittedModel::almon(
                        "ALS",
                        cell.architecture.clone(),
                        cell.window_days,
                        model,
                    ),
                    objective: rss,
                    iterations: 0,
                    converged: true,
                })
            }
        }
    }

    /// Runs the three simulation types for every fitted cell, writing one
    /// trace per (cell, sim) and the combined results table.
    pub fn evaluate(&self) -> Result<i32, PipelineError> {
        let test = read_dataset(&self.test_path())?;
        self.check_hash(&test.meta, &self.test_path())?;
        std::fs::create_dir_all(self.traces_dir())?;
        std::fs::create_dir_all(self.eval_dir())?;
        let cells = self.cells();
        let stored: Vec<StoredModel> = cells
            .iter()
            .map(|cell| {
                let path = self.params_dir().join(format!("{}.params", cell.stem()));
                if !path.exists() {
                    return Err(err(format!(
                        "missing parameter file {} (run `thermident estimate` first)",
                        path.display()
                    )));
                }
                let text_meta = read_params(&path)?;
                Ok(text_meta)
            })
            .collect::<Result<_, PipelineError>>()?;
        let outcomes = parallel_map(&stored, |s| self.run_eval_cell(s, &test));
        let mut reports = Vec::new();
        for outcome in outcomes {
            reports.extend(outcome?);
        }
        write_report(&reports, &self.results_path(), &self.meta())?;
        println!(
            "evaluate: wrote {} ({} rows)",
            self.results_path().display(),
            reports.len()
        );
        Ok(0)
    }

    fn power_params(&self) -> PowerParams {
        PowerParams::constant(self.cfg.cop, self.cfg.p_other, self.cfg.power_factor)
    }

    fn power_columns(&self, q_hvac: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let params = self.power_params();
        let mut p_hvac = Vec::with_capacity(q_hvac.len());
        let mut p_total = Vec::with_capacity(q_hvac.len());
        let mut q_reactive = Vec::with_capacity(q_hvac.len());
        for &q in q_hvac {
            let s = power_sample(q, self.cfg.p_other, self.cfg.power_factor, &params)
                .expect("validated power parameters");
            p_hvac.push(s.p_hvac);
            p_total.push(s.p_total);
            q_reactive.push(s.q_reactive);
        }
        (p_hvac, p_total, q_reactive)
    }

    fn trace_meta(&self, report: &EvalReport, extra: &[(String, String)]) -> Vec<(String, String)> {
        let mut meta = self.meta();
        meta.push(("method".into(), report.method.clone()));
        meta.push(("architecture".into(), report.architecture.clone()));
        meta.push(("training_days".into(), report.training_days.to_string()));
        meta.push(("sim".into(), report.sim.to_string()));
        meta.push(("divergent".into(), report.divergent.to_string()));
        meta.extend_from_slice(extra);
        meta
    }

    fn run_eval_cell(
        &self,
        stored: &StoredModel,
        test: &Dataset,
    ) -> Result<Vec<EvalReport>, PipelineError> {
        let cfg = &self.cfg;
        let model = &stored.model;
        // prediction offsets into the test timeline per sim type
        let (off1, off2) = match &model.kind {
            ModelKind::Rc { .. } => (1usize, 0usize),
            ModelKind::Almon(a) => (a.max_end_lag() + 1, a.max_end_lag() + 1),
        };
        let mut reports = Vec::with_capacity(3);

        let (preds1, rep1) = run_sim1(model, test)?;
        self.write_open_loop_trace(&rep1, test, &preds1, off1)?;
        reports.push(rep1);

        let x0 = ThermalState::uniform(
            test.t_z[0],
            match &model.kind {
                ModelKind::Rc { topology, .. } => topology.n_hidden,
                ModelKind::Almon(_) => 0,
            },
        );
        let (preds2, rep2) = run_sim2(model, test, Some(&x0))?;
        self.write_open_loop_trace(&rep2, test, &preds2, off2)?;
        reports.push(rep2);

        let weather = test.disturbances();
        let thermo = cfg.thermostat(cfg.sim3_setpoint);
        let (trace3, rep3) = run_sim3(model, &weather, cfg.t_s(), &thermo, Some(&x0), cfg.cop)?;
        let (p_hvac, p_total, q_reactive) = self.power_columns(&trace3.q_hvac);
        let band_low = vec![trace3.band_low; trace3.t_z.len()];
        let band_high = vec![trace3.band_high; trace3.t_z.len()];
        write_trace(
            &self.traces_dir().join(format!("{}.csv", rep3.trace_id)),
            &self.trace_meta(&rep3, &[("t_offset".into(), "0".into())]),
            &[
                TraceColumn { name: "t_z", values: &trace3.t_z },
                TraceColumn { name: "q_hvac", values: &trace3.q_hvac },
                TraceColumn { name: "p_hvac", values: &p_hvac },
                TraceColumn { name: "p_total", values: &p_total },
                TraceColumn { name: "q_reactive", values: &q_reactive },
                TraceColumn { name: "band_low", values: &band_low },
                TraceColumn { name: "band_high", values: &band_high },
            ],
        )?;
        reports.push(rep3);
        Ok(reports)
    }

    /// Sim1/Sim2 trace: reference vs prediction plus the grid-edge power
    /// quantities of the recorded HVAC input over the predicted span.
    fn write_open_loop_trace(
        &self,
        report: &EvalReport,
        test: &Dataset,
        preds: &[f64],
        offset: usize,
    ) -> Result<(), PipelineError> {
        let n = preds.len();
        let refs = &test.t_z[offset..offset + n];
        let q = &test.q_hvac[offset..offset + n];
        let (p_hvac, p_total, q_reactive) = self.power_columns(q);
        write_trace(
            &self.traces_dir().join(format!("{}.csv", report.trace_id)),
            &self.trace_meta(report, &[("t_offset".into(), offset.to_string())]),
            &[
                TraceColumn { name: "y_ref", values: refs },
                TraceColumn { name: "y_hat", values: preds },
                TraceColumn { name: "q_hvac", values: q },
                TraceColumn { name: "p_hvac", values: &p_hvac },
                TraceColumn { name: "p_total", values: &p_total },
                TraceColumn { name: "q_reactive", values: &q_reactive },
            ],
        )?;
        Ok(())
    }

    /// Pivots the results table into one row per cell with the three sim
    /// scores side by side.
    pub fn report(&self) -> Result<i32, PipelineError> {
        let rows = read_report(&self.results_path())?;
        // hash check on the results file itself
        let text = std::fs::read_to_string(self.results_path())?;
        let meta: Vec<(String, String)> = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .filter_map(|l| l.trim().split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        self.check_hash(&meta, &self.results_path())?;

        let mut keys: Vec<(String, String, u32)> = rows
            .iter()
            .map(|r| (r.method.clone(), r.architecture.clone(), r.training_days))
            .collect();
        keys.sort();
        keys.dedup();
        let find = |key: &(String, String, u32), sim: SimType| -> Option<&ReportRow> {
            rows.iter().find(|r| {
                r.method == key.0
                    && r.architecture == key.1
                    && r.training_days == key.2
                    && r.sim == sim
            })
        };
        let mut out = String::new();
        for (k, v) in self.meta() {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("method,architecture,training_days,sim1_accuracy,sim2_accuracy,sim3_occupancy\n");
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for key in &keys {
            let s1 = find(key, SimType::Sim1).and_then(|r| r.average_accuracy);
            let s2 = find(key, SimType::Sim2).and_then(|r| r.average_accuracy);
            let s3 = find(key, SimType::Sim3).and_then(|r| r.deadband_occupancy);
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                key.0,
                key.1,
                key.2,
                fmt_opt(s1),
                fmt_opt(s2),
                fmt_opt(s3)
            ));
        }
        std::fs::write(self.report_path(), out)?;
        println!(
            "report: wrote {} ({} cells)",
            self.report_path().display(),
            keys.len()
        );
        Ok(0)
    }
}
