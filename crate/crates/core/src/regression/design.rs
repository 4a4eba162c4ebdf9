//! Regression design-matrix assembly from a dataset.

use super::almon::{degree_days, transform_regressor, AlmonSpec, RegressorName};
use super::RegressionError;
use crate::dataset::Dataset;
use crate::linalg::Mat;

/// Design matrix for the transformed regression. Row `r` corresponds to time
/// index `k = burn_in + r` and predicts the target at `k + 1`; the first
/// column is the intercept, followed by one block of `q+1` transformed
/// columns per spec.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub x: Mat,
    pub target: Vec<f64>,
    /// Leading samples dropped to cover the longest lag window.
    pub burn_in: usize,
    pub specs: Vec<AlmonSpec>,
    /// `(block name, first column, column count)` for diagnostics.
    pub blocks: Vec<(String, usize, usize)>,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.x.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.cols()
    }

    /// Name of the block owning a column (for rank-deficiency messages).
    pub fn block_of_column(&self, col: usize) -> &str {
        for (name, start, len) in &self.blocks {
            if col >= *start && col < start + len {
                return name;
            }
        }
        "intercept"
    }
}

fn regressor_series(dataset: &Dataset, name: RegressorName) -> Vec<f64> {
    match name {
        RegressorName::Tz => dataset.t_z.clone(),
        RegressorName::Pc => dataset.p_c.clone(),
        RegressorName::Ph => dataset.p_h.clone(),
        RegressorName::Dc => dataset.t_am.iter().map(|&t| degree_days(t).0).collect(),
        RegressorName::Dh => dataset.t_am.iter().map(|&t| degree_days(t).1).collect(),
    }
}

/// Builds the transformed design aligned so each row's target is the
/// next-step zone temperature.
pub fn build_design(dataset: &Dataset, specs: &[AlmonSpec]) -> Result<DesignMatrix, RegressionError> {
    if specs.is_empty() {
        return Err(RegressionError::InvalidSpec("no regressor specs given".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let burn_in = specs.iter().map(|s| s.end_lag).max().unwrap();
    let n = dataset.len();
    // usable rows: k in [burn_in, n-2], target at k+1
    if n < burn_in + 2 {
        return Err(RegressionError::InsufficientData {
            needed: burn_in + 2,
            got: n,
        });
    }
    let n_rows = n - burn_in - 1;
    let n_cols = 1 + specs.iter().map(|s| s.n_coeffs()).sum::<usize>();

    let series: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| regressor_series(dataset, s.regressor))
        .collect();

    let mut blocks = Vec::with_capacity(specs.len());
    let mut col = 1;
    for s in specs {
        blocks.push((s.regressor.name().to_string(), col, s.n_coeffs()));
        col += s.n_coeffs();
    }

    let mut x = Mat::zeros(n_rows, n_cols);
    let mut target = Vec::with_capacity(n_rows);
    for r in 0..n_rows {
        let k = burn_in + r;
        x.set(r, 0, 1.0);
        let mut c = 1;
        for (s, z) in specs.iter().zip(&series) {
            let transformed = transform_regressor(z, s, k)?;
            for v in transformed {
                x.set(r, c, v);
                c += 1;
            }
        }
        target.push(dataset.t_z[k + 1]);
    }
    if !x.is_finite() || target.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NonFinite("design matrix".into()));
    }
    Ok(DesignMatrix {
        x,
        target,
        burn_in,
        specs: specs.to_vec(),
        blocks,
    })
}
