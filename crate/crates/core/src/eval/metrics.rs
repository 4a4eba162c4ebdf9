//! Accuracy metric shared by the open-loop simulation regimes.

use super::EvalError;

/// Average accuracy in percent: `100 - MAPE`. Exactly 100 iff the
/// predictions equal the references; unboundedly negative for bad fits.
pub fn average_accuracy(y: &[f64], y_hat: &[f64]) -> Result<f64, EvalError> {
    if y.len() != y_hat.len() || y.is_empty() {
        return Err(EvalError::LengthMismatch {
            y: y.len(),
            y_hat: y_hat.len(),
        });
    }
    let mut acc = 0.0;
    for (k, (a, b)) in y.iter().zip(y_hat).enumerate() {
        if *a == 0.0 {
            return Err(EvalError::ZeroReference { index: k });
        }
        acc += ((a - b) / a).abs();
    }
    Ok(100.0 - 100.0 * acc / y.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_prediction_scores_100() {
        let y = [20.0, 21.0, 22.0];
        assert_eq!(average_accuracy(&y, &y).unwrap(), 100.0);
    }

    #[test]
    fn hand_computed_mape() {
        // errors 5% and 4%: accuracy 100 - 4.5 = 95.5
        let y = [20.0, 25.0];
        let y_hat = [19.0, 26.0];
        assert_abs_diff_eq!(average_accuracy(&y, &y_hat).unwrap(), 95.5, epsilon = 1e-12);
    }

    #[test]
    fn hundred_percent_error_scores_zero() {
        let y = [20.0];
        let y_hat = [40.0];
        assert_abs_diff_eq!(average_accuracy(&y, &y_hat).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_reference_rejected() {
        let y = [20.0, 0.0];
        let y_hat = [20.0, 1.0];
        assert!(matches!(
            average_accuracy(&y, &y_hat),
            Err(EvalError::ZeroReference { index: 1 })
        ));
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(average_accuracy(&[1.0], &[1.0, 2.0]).is_err());
        assert!(average_accuracy(&[], &[]).is_err());
    }

    #[test]
    fn only_exact_match_scores_100() {
        let y = [20.0, 21.0];
        let y_hat = [20.0, 21.0 + 1e-9];
        assert!(average_accuracy(&y, &y_hat).unwrap() < 100.0);
    }
}
