//! Lag specifications, degree-day regressors, and the polynomial lag basis.

use super::RegressionError;
use crate::linalg::Mat;

/// Balance-point temperature separating cooling from heating degrees, °C.
pub const BALANCE_POINT_C: f64 = 19.44;

/// Cooling and heating degrees of one ambient sample. Exactly one of the two
/// is non-zero (both vanish at the balance point).
pub fn degree_days(t_am: f64) -> (f64, f64) {
    let d_c = (t_am - BALANCE_POINT_C).max(0.0);
    let d_h = (BALANCE_POINT_C - t_am).max(0.0);
    (d_c, d_h)
}

/// The five regressors the structured model draws on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressorName {
    /// Zone temperature (autoregressive term).
    Tz,
    /// Cooling power.
    Pc,
    /// Heating power.
    Ph,
    /// Cooling degrees.
    Dc,
    /// Heating degrees.
    Dh,
}

impl RegressorName {
    pub fn name(&self) -> &'static str {
        match self {
            RegressorName::Tz => "T_z",
            RegressorName::Pc => "P_c",
            RegressorName::Ph => "P_h",
            RegressorName::Dc => "D_c",
            RegressorName::Dh => "D_h",
        }
    }
}

impl std::fmt::Display for RegressorName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One regressor's lag window `[start_lag, end_lag]` and the polynomial order
/// of its lag-weight restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlmonSpec {
    pub regressor: RegressorName,
    pub start_lag: usize,
    pub end_lag: usize,
    pub poly_order: usize,
}

impl AlmonSpec {
    pub fn new(
        regressor: RegressorName,
        start_lag: usize,
        end_lag: usize,
        poly_order: usize,
    ) -> Result<Self, RegressionError> {
        let spec = AlmonSpec {
            regressor,
            start_lag,
            end_lag,
            poly_order,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), RegressionError> {
        if self.start_lag > self.end_lag {
            return Err(RegressionError::InvalidSpec(format!(
                "{}: start lag {} exceeds end lag {}",
                self.regressor, self.start_lag, self.end_lag
            )));
        }
        if self.poly_order >= self.n_lags() {
            return Err(RegressionError::InvalidSpec(format!(
                "{}: polynomial order {} must be below the lag count {}",
                self.regressor,
                self.poly_order,
                self.n_lags()
            )));
        }
        Ok(())
    }

    /// Number of lags in the window, `end - start + 1`.
    pub fn n_lags(&self) -> usize {
        self.end_lag - self.start_lag + 1
    }

    /// Number of polynomial coefficients, `poly_order + 1`.
    pub fn n_coeffs(&self) -> usize {
        self.poly_order + 1
    }
}

/// Basis matrix mapping polynomial coefficients to lag weights: row for lag
/// `i` holds `[i^0, i^1, ..., i^q]`, so `zeta = M * omega`. The lag index `i`
/// is the absolute lag value, not an offset from the window start.
pub fn almon_basis(start_lag: usize, end_lag: usize, poly_order: usize) -> Result<Mat, RegressionError> {
    let spec = AlmonSpec::new(RegressorName::Tz, start_lag, end_lag, poly_order)?;
    let mut m = Mat::zeros(spec.n_lags(), spec.n_coeffs());
    for (row, i) in (start_lag..=end_lag).enumerate() {
        let mut p = 1.0; // i^0 = 1, including 0^0
        for j in 0..=poly_order {
            m.set(row, j, p);
            p *= i as f64;
        }
    }
    Ok(m)
}

/// Transformed regressor values at time `k`: for each `j`,
/// `z~_j(k) = sum_{i=l..t} i^j z(k-i)`. A dot product of these with the
/// polynomial coefficients equals the full lag-weighted sum.
pub fn transform_regressor(
    z: &[f64],
    spec: &AlmonSpec,
    k: usize,
) -> Result<Vec<f64>, RegressionError> {
    spec.validate()?;
    if k < spec.end_lag || k >= z.len() {
        return Err(RegressionError::InsufficientHistory {
            needed: spec.end_lag + 1,
            got: k.min(z.len()),
        });
    }
    let mut out = vec![0.0; spec.n_coeffs()];
    for i in spec.start_lag..=spec.end_lag {
        let zv = z[k - i];
        let mut p = 1.0;
        for item in out.iter_mut() {
            *item += p * zv;
            p *= i as f64;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degree_days_above_threshold() {
        let (d_c, d_h) = degree_days(25.0);
        assert_abs_diff_eq!(d_c, 5.56, epsilon = 1e-12);
        assert_eq!(d_h, 0.0);
    }

    #[test]
    fn degree_days_at_threshold() {
        let (d_c, d_h) = degree_days(BALANCE_POINT_C);
        assert_eq!(d_c, 0.0);
        assert_eq!(d_h, 0.0);
    }

    #[test]
    fn degree_days_below_threshold() {
        let (d_c, d_h) = degree_days(10.0);
        assert_eq!(d_c, 0.0);
        assert_abs_diff_eq!(d_h, 9.44, epsilon = 1e-12);
    }

    #[test]
    fn degree_days_complementary() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..1000 {
            let t = rng.uniform(-40.0, 60.0);
            let (d_c, d_h) = degree_days(t);
            assert_eq!(d_c * d_h, 0.0);
            assert!(d_c >= 0.0 && d_h >= 0.0);
        }
    }

    #[test]
    fn basis_small_window() {
        let m = almon_basis(0, 2, 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 2));
        assert_eq!(m.row_slice(0), &[1.0, 0.0]);
        assert_eq!(m.row_slice(1), &[1.0, 1.0]);
        assert_eq!(m.row_slice(2), &[1.0, 2.0]);
    }

    #[test]
    fn basis_order_zero_gives_equal_weights() {
        let m = almon_basis(2, 5, 0).unwrap();
        let omega = [0.7];
        for row in 0..m.rows() {
            let zeta: f64 = m.row_slice(row)[0] * omega[0];
            assert_eq!(zeta, 0.7);
        }
    }

    #[test]
    fn basis_absolute_lag_indexing() {
        let m = almon_basis(6, 14, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (9, 3));
        assert_eq!(m.row_slice(0), &[1.0, 6.0, 36.0]);
    }

    #[test]
    fn basis_rejects_saturated_order() {
        assert!(almon_basis(0, 2, 3).is_err());
    }

    #[test]
    fn transform_hand_sum() {
        // z(k)=2, z(k-1)=3, z(k-2)=4 with l=0, t=2, q=1
        let z = [4.0, 3.0, 2.0];
        let spec = AlmonSpec::new(RegressorName::Tz, 0, 2, 1).unwrap();
        let out = transform_regressor(&z, &spec, 2).unwrap();
        assert_eq!(out, vec![9.0, 11.0]);
    }

    #[test]
    fn transform_zero_series() {
        let z = [0.0; 10];
        let spec = AlmonSpec::new(RegressorName::Pc, 1, 4, 2).unwrap();
        let out = transform_regressor(&z, &spec, 7).unwrap();
        assert_eq!(out, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn transform_needs_history() {
        let z = [1.0, 2.0];
        let spec = AlmonSpec::new(RegressorName::Tz, 0, 2, 1).unwrap();
        assert!(transform_regressor(&z, &spec, 1).is_err());
    }

    #[test]
    fn transform_equivalent_to_lag_weight_dot_product() {
        // brute-force double sum: sum_j omega_j * z~_j(k) == sum_i zeta_i z(k-i)
        let mut rng = SplitMix64::new(17);
        for _ in 0..20 {
            let z: Vec<f64> = (0..30).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let spec = AlmonSpec::new(RegressorName::Dc, 2, 9, 3).unwrap();
            let omega: Vec<f64> = (0..spec.n_coeffs()).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let k = 25;
            let transformed = transform_regressor(&z, &spec, k).unwrap();
            let via_transform: f64 = transformed.iter().zip(&omega).map(|(t, o)| t * o).sum();
            let basis = almon_basis(spec.start_lag, spec.end_lag, spec.poly_order).unwrap();
            let zeta = basis.mul_vec(&omega);
            let direct: f64 = (spec.start_lag..=spec.end_lag)
                .zip(&zeta)
                .map(|(i, zt)| zt * z[k - i])
                .sum();
            assert_abs_diff_eq!(via_transform, direct, epsilon = 1e-12);
        }
    }
}
