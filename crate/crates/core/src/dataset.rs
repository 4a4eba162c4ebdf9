//! Aligned time series of control, disturbances, and measured output.

use thiserror::Error;

use crate::thermal::DisturbanceSample;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset columns differ in length")]
    RaggedColumns,
    #[error("sample period must be positive, got {0}")]
    InvalidSamplePeriod(f64),
    #[error("row {row}: cooling and heating power are both non-zero (p_c={p_c}, p_h={p_h})")]
    PowerOverlap { row: usize, p_c: f64, p_h: f64 },
    #[error("row {row}, column {column}: non-finite value")]
    NonFinite { row: usize, column: &'static str },
    #[error("requested {requested} samples but dataset has {available}")]
    SliceTooLong { requested: usize, available: usize },
}

/// One building's recorded operation at fixed sample period `t_s` seconds.
///
/// `t_z` is the measured output; `q_hvac` the heat-rate control input
/// (positive heating, negative cooling); `p_c`/`p_h` the electrical power
/// split by mode; `t_am`/`q_int`/`q_solar` the disturbances. `t0_s` is the
/// offset of the first sample from the scenario epoch, so slices keep their
/// absolute timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub t_s: f64,
    pub t0_s: u64,
    pub t_z: Vec<f64>,
    pub q_hvac: Vec<f64>,
    pub p_c: Vec<f64>,
    pub p_h: Vec<f64>,
    pub t_am: Vec<f64>,
    pub q_int: Vec<f64>,
    pub q_solar: Vec<f64>,
    /// Free-form metadata carried into file headers (config hash, seeds, ...).
    pub meta: Vec<(String, String)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.t_z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_z.is_empty()
    }

    pub fn disturbance(&self, k: usize) -> DisturbanceSample {
        DisturbanceSample::new(self.t_am[k], self.q_int[k], self.q_solar[k])
    }

    pub fn disturbances(&self) -> Vec<DisturbanceSample> {
        (0..self.len()).map(|k| self.disturbance(k)).collect()
    }

    pub fn samples_per_day(&self) -> usize {
        (86_400.0 / self.t_s).round() as usize
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if !(self.t_s.is_finite() && self.t_s > 0.0) {
            return Err(DatasetError::InvalidSamplePeriod(self.t_s));
        }
        let n = self.t_z.len();
        let cols: [(&str, &Vec<f64>); 7] = [
            ("t_z", &self.t_z),
            ("q_hvac", &self.q_hvac),
            ("p_c", &self.p_c),
            ("p_h", &self.p_h),
            ("t_am", &self.t_am),
            ("q_int", &self.q_int),
            ("q_solar", &self.q_solar),
        ];
        for (_, col) in &cols {
            if col.len() != n {
                return Err(DatasetError::RaggedColumns);
            }
        }
        for row in 0..n {
            for (name, col) in &cols {
                if !col[row].is_finite() {
                    return Err(DatasetError::NonFinite { row, column: name });
                }
            }
            if self.p_c[row] != 0.0 && self.p_h[row] != 0.0 {
                return Err(DatasetError::PowerOverlap {
                    row,
                    p_c: self.p_c[row],
                    p_h: self.p_h[row],
                });
            }
        }
        Ok(())
    }

    /// Contiguous sub-range, timestamps preserved.
    pub fn slice(&self, start: usize, len: usize) -> Result<Dataset, DatasetError> {
        if start + len > self.len() {
            return Err(DatasetError::SliceTooLong {
                requested: start + len,
                available: self.len(),
            });
        }
        let r = start..start + len;
        Ok(Dataset {
            t_s: self.t_s,
            t0_s: self.t0_s + (start as u64) * (self.t_s as u64),
            t_z: self.t_z[r.clone()].to_vec(),
            q_hvac: self.q_hvac[r.clone()].to_vec(),
            p_c: self.p_c[r.clone()].to_vec(),
            p_h: self.p_h[r.clone()].to_vec(),
            t_am: self.t_am[r.clone()].to_vec(),
            q_int: self.q_int[r.clone()].to_vec(),
            q_solar: self.q_solar[r].to_vec(),
            meta: self.meta.clone(),
        })
    }

    /// The trailing `days` worth of samples.
    pub fn last_days(&self, days: u32) -> Result<Dataset, DatasetError> {
        let want = days as usize * self.samples_per_day();
        if want > self.len() {
            return Err(DatasetError::SliceTooLong {
                requested: want,
                available: self.len(),
            });
        }
        self.slice(self.len() - want, want)
    }
}
