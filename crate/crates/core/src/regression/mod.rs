//! Structured autoregressive thermal models with polynomial lag restrictions.
//!
//! The next zone temperature is regressed on lagged zone temperatures,
//! cooling/heating power, and cooling/heating degree values. Restricting each
//! lag-weight sequence to a low-order polynomial in the lag index collapses
//! many collinear lag columns into a handful of transformed regressors, which
//! an ordinary least-squares fit handles comfortably.

mod almon;
mod design;
mod fit;
mod rollout;

pub use almon::{almon_basis, degree_days, transform_regressor, AlmonSpec, RegressorName, BALANCE_POINT_C};
pub use design::{build_design, DesignMatrix};
pub use fit::{lls_fit, lls_fit_preset, AlmonModel, AlmonPreset};
pub use rollout::{simulate_regression, RegressionInputs};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegressionError {
    #[error("invalid lag spec: {0}")]
    InvalidSpec(String),
    #[error("dataset too short: need {needed} samples, have {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("history too short: need {needed} leading samples, have {got}")]
    InsufficientHistory { needed: usize, got: usize },
    #[error("design matrix is rank deficient in block {block}")]
    RankDeficient { block: String },
    #[error("design has {rows} rows but {cols} columns; need rows >= columns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("input sequences differ in length")]
    LengthMismatch,
    #[error("non-finite value in {0}")]
    NonFinite(String),
}
