//! Recursive rollout of a fitted regression model.

use super::almon::{degree_days, RegressorName};
use super::fit::AlmonModel;
use super::RegressionError;

/// Exogenous input sequences for a rollout, all the same length and aligned
/// with the zone-temperature timeline.
#[derive(Debug, Clone)]
pub struct RegressionInputs {
    pub p_c: Vec<f64>,
    pub p_h: Vec<f64>,
    pub t_am: Vec<f64>,
}

impl RegressionInputs {
    pub fn len(&self) -> usize {
        self.p_c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_c.is_empty()
    }

    fn validate(&self) -> Result<(), RegressionError> {
        if self.p_h.len() != self.p_c.len() || self.t_am.len() != self.p_c.len() {
            return Err(RegressionError::LengthMismatch);
        }
        Ok(())
    }
}

/// Rolls the model forward, feeding each prediction back into its own
/// temperature lags. `history` seeds indices `0..history.len()`; predictions
/// are returned for indices `history.len()..inputs.len()` in order.
///
/// Degree values are derived internally from `t_am`, so callers supply raw
/// ambient temperature.
pub fn simulate_regression(
    model: &AlmonModel,
    history: &[f64],
    inputs: &RegressionInputs,
) -> Result<Vec<f64>, RegressionError> {
    inputs.validate()?;
    let needed = model.max_end_lag() + 1;
    if history.len() < needed {
        return Err(RegressionError::InsufficientHistory {
            needed,
            got: history.len(),
        });
    }
    if inputs.len() < history.len() {
        return Err(RegressionError::LengthMismatch);
    }
    let mut t_z = history.to_vec();
    let start = history.len();
    let mut preds = Vec::with_capacity(inputs.len() - start);
    for j in start..inputs.len() {
        let k = j - 1;
        let pred = model.predict(k, &|reg, idx| match reg {
            RegressorName::Tz => t_z[idx],
            RegressorName::Pc => inputs.p_c[idx],
            RegressorName::Ph => inputs.p_h[idx],
            RegressorName::Dc => degree_days(inputs.t_am[idx]).0,
            RegressorName::Dh => degree_days(inputs.t_am[idx]).1,
        });
        if !pred.is_finite() {
            return Err(RegressionError::NonFinite(format!("prediction at index {j}")));
        }
        t_z.push(pred);
        preds.push(pred);
    }
    Ok(preds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::almon::AlmonSpec;
    use crate::regression::fit::AlmonPreset;
    use approx::assert_abs_diff_eq;

    fn constant_model(alpha0: f64) -> AlmonModel {
        let specs = vec![AlmonSpec::new(RegressorName::Tz, 1, 3, 1).unwrap()];
        AlmonModel {
            alpha0,
            omega: vec![vec![0.0, 0.0]],
            zeta: vec![vec![0.0, 0.0, 0.0]],
            specs,
            preset: AlmonPreset::Custom,
        }
    }

    #[test]
    fn zero_coefficients_give_constant_trajectory() {
        let model = constant_model(21.5);
        let history = vec![22.0, 22.1, 22.2, 22.3];
        let inputs = RegressionInputs {
            p_c: vec![0.0; 10],
            p_h: vec![0.0; 10],
            t_am: vec![25.0; 10],
        };
        let preds = simulate_regression(&model, &history, &inputs).unwrap();
        assert_eq!(preds.len(), 6);
        for p in preds {
            assert_eq!(p, 21.5);
        }
    }

    #[test]
    fn single_step_reduces_to_one_step_predictor() {
        // AR model t_z(k+1) = 0.5 t_z(k-1) + 10
        let specs = vec![AlmonSpec::new(RegressorName::Tz, 1, 2, 1).unwrap()];
        let basis = crate::regression::almon::almon_basis(1, 2, 1).unwrap();
        let omega = vec![1.0, -0.5]; // zeta_1 = 1 - 0.5 = 0.5, zeta_2 = 1 - 1 = 0
        let zeta = basis.mul_vec(&omega);
        let model = AlmonModel {
            alpha0: 10.0,
            omega: vec![omega],
            zeta: vec![zeta],
            specs,
            preset: AlmonPreset::Custom,
        };
        let history = vec![20.0, 24.0, 26.0];
        let inputs = RegressionInputs {
            p_c: vec![0.0; 4],
            p_h: vec![0.0; 4],
            t_am: vec![25.0; 4],
        };
        let preds = simulate_regression(&model, &history, &inputs).unwrap();
        assert_eq!(preds.len(), 1);
        // k = 2: 0.5 * t_z(1) + 0 * t_z(0) + 10 = 0.5*24 + 10
        assert_abs_diff_eq!(preds[0], 22.0, epsilon = 1e-12);
    }

    #[test]
    fn predictions_feed_back_into_lags() {
        // t_z(k+1) = 0.5 t_z(k): each prediction halves the previous one
        let specs = vec![AlmonSpec::new(RegressorName::Tz, 0, 0, 0).unwrap()];
        let model = AlmonModel {
            alpha0: 0.0,
            omega: vec![vec![0.5]],
            zeta: vec![vec![0.5]],
            specs,
            preset: AlmonPreset::Custom,
        };
        let history = vec![16.0];
        let inputs = RegressionInputs {
            p_c: vec![0.0; 4],
            p_h: vec![0.0; 4],
            t_am: vec![25.0; 4],
        };
        let preds = simulate_regression(&model, &history, &inputs).unwrap();
        assert_eq!(preds, vec![8.0, 4.0, 2.0]);
    }

    #[test]
    fn insufficient_history_rejected() {
        let model = constant_model(21.0);
        let history = vec![22.0, 22.1]; // needs max_end_lag + 1 = 4
        let inputs = RegressionInputs {
            p_c: vec![0.0; 10],
            p_h: vec![0.0; 10],
            t_am: vec![25.0; 10],
        };
        assert!(matches!(
            simulate_regression(&model, &history, &inputs),
            Err(RegressionError::InsufficientHistory { needed: 4, got: 2 })
        ));
    }
}
