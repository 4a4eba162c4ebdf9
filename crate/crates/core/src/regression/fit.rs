//! Least-squares fitting of the transformed regression and the fitted model.

use super::almon::{almon_basis, AlmonSpec, RegressorName};
use super::design::DesignMatrix;
use super::RegressionError;
use crate::linalg::LinalgError;

/// Shipped regression architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlmonPreset {
    /// Residential: no heating-power block (the house has no heating).
    RA,
    /// Commercial: both cooling- and heating-power blocks.
    CA,
    Custom,
}

impl AlmonPreset {
    pub fn name(&self) -> &'static str {
        match self {
            AlmonPreset::RA => "R-A",
            AlmonPreset::CA => "C-A",
            AlmonPreset::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<AlmonPreset> {
        match s {
            "R-A" => Some(AlmonPreset::RA),
            "C-A" => Some(AlmonPreset::CA),
            "custom" => Some(AlmonPreset::Custom),
            _ => None,
        }
    }

    /// Lag windows and polynomial orders of the preset.
    pub fn specs(&self) -> Vec<AlmonSpec> {
        let spec = |r, l, t, q| AlmonSpec::new(r, l, t, q).unwrap();
        match self {
            AlmonPreset::RA => vec![
                spec(RegressorName::Tz, 6, 14, 2),
                spec(RegressorName::Pc, 0, 11, 2),
                spec(RegressorName::Dc, 6, 17, 1),
                spec(RegressorName::Dh, 6, 17, 1),
            ],
            AlmonPreset::CA => vec![
                spec(RegressorName::Tz, 6, 14, 2),
                spec(RegressorName::Pc, 0, 8, 2),
                spec(RegressorName::Ph, 0, 8, 2),
                spec(RegressorName::Dc, 6, 17, 1),
                spec(RegressorName::Dh, 6, 17, 1),
            ],
            AlmonPreset::Custom => vec![],
        }
    }
}

impl std::fmt::Display for AlmonPreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fitted structured regression: intercept, per-regressor polynomial
/// coefficients, and the lag weights they expand to.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmonModel {
    pub alpha0: f64,
    /// Polynomial coefficients per spec, each of length `q+1`.
    pub omega: Vec<Vec<f64>>,
    /// Recovered lag weights per spec, each of length `t-l+1`;
    /// `zeta[s] = basis(spec) * omega[s]` exactly.
    pub zeta: Vec<Vec<f64>>,
    pub specs: Vec<AlmonSpec>,
    pub preset: AlmonPreset,
}

impl AlmonModel {
    /// Longest lag any regressor reaches back.
    pub fn max_end_lag(&self) -> usize {
        self.specs.iter().map(|s| s.end_lag).max().unwrap_or(0)
    }

    /// One-step prediction of the target at `k + 1` from lagged values
    /// supplied by `get(regressor, index)`. Caller guarantees
    /// `k >= max_end_lag()`.
    pub fn predict(&self, k: usize, get: &dyn Fn(RegressorName, usize) -> f64) -> f64 {
        let mut y = self.alpha0;
        for (s, spec) in self.specs.iter().enumerate() {
            for (idx, i) in (spec.start_lag..=spec.end_lag).enumerate() {
                y += self.zeta[s][idx] * get(spec.regressor, k - i);
            }
        }
        y
    }
}

/// Fits the transformed design by QR least squares and expands the
/// polynomial coefficients back to lag weights.
pub fn lls_fit(design: &DesignMatrix) -> Result<AlmonModel, RegressionError> {
    if design.n_rows() < design.n_cols() {
        return Err(RegressionError::Underdetermined {
            rows: design.n_rows(),
            cols: design.n_cols(),
        });
    }
    let beta = match design.x.lstsq_qr(&design.target) {
        Ok(beta) => beta,
        Err(LinalgError::RankDeficient { column }) => {
            return Err(RegressionError::RankDeficient {
                block: design.block_of_column(column).to_string(),
            })
        }
        Err(e) => return Err(RegressionError::InvalidSpec(e.to_string())),
    };
    let alpha0 = beta[0];
    let mut omega = Vec::with_capacity(design.specs.len());
    let mut zeta = Vec::with_capacity(design.specs.len());
    let mut col = 1;
    for spec in &design.specs {
        let w = beta[col..col + spec.n_coeffs()].to_vec();
        col += spec.n_coeffs();
        let basis = almon_basis(spec.start_lag, spec.end_lag, spec.poly_order)?;
        zeta.push(basis.mul_vec(&w));
        omega.push(w);
    }
    Ok(AlmonModel {
        alpha0,
        omega,
        zeta,
        specs: design.specs.clone(),
        preset: AlmonPreset::Custom,
    })
}

/// [`lls_fit`] tagged with the preset the specs came from.
pub fn lls_fit_preset(design: &DesignMatrix, preset: AlmonPreset) -> Result<AlmonModel, RegressionError> {
    let mut model = lls_fit(design)?;
    model.preset = preset;
    Ok(model)
}
