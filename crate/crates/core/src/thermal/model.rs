//! Assembly of the continuous-time heat-balance matrices and their
//! forward-Euler discretization.

use super::topology::{RcParameters, RcTopology};
use super::ThermalError;
use crate::linalg::Mat;

/// Per-second rate matrices of `dx/dt = A x + B u + D w` with output
/// `y = C x`. State order: zone first, hidden nodes after. Disturbance
/// columns: ambient temperature, internal heat, solar heat.
#[derive(Debug, Clone)]
pub struct ContinuousStateSpace {
    pub a_mat: Mat,
    pub b_mat: Mat,
    pub d_mat: Mat,
    pub c_mat: Mat,
}

impl ContinuousStateSpace {
    pub fn n_states(&self) -> usize {
        self.a_mat.rows()
    }
}

/// Forward-Euler step matrices: `x(k+1) = ad x(k) + bd u(k) + dd w(k)`.
#[derive(Debug, Clone)]
pub struct DiscreteStateSpace {
    pub ad: Mat,
    pub bd: Mat,
    pub dd: Mat,
    pub c: Mat,
    /// Step size in seconds.
    pub t_s: f64,
    /// Set when `t_s * |a_ii| >= 1` for some node: the explicit Euler step is
    /// outside its stability region and rollouts may blow up.
    pub stability_warning: bool,
}

impl DiscreteStateSpace {
    pub fn n_states(&self) -> usize {
        self.ad.rows()
    }
}

/// Assembles the heat-balance matrices for a topology/parameter pair.
///
/// Each conductive exchange `(T_other - T_node)/R` contributes `1/(R C_node)`
/// off-diagonal (or into the ambient disturbance column) and subtracts the
/// same amount from the node's diagonal, so every row of `A` plus its ambient
/// column sums to zero: equal temperatures everywhere mean no conductive flow.
pub fn build_state_space(
    topology: &RcTopology,
    params: &RcParameters,
) -> Result<ContinuousStateSpace, ThermalError> {
    params.validate(topology)?;
    let n = topology.n_states();
    let mut a = Mat::zeros(n, n);
    let mut b = Mat::zeros(n, 1);
    let mut d = Mat::zeros(n, 3);

    // zone node (row 0)
    {
        let cz = params.c_z;
        let mut diag = 0.0;
        for (i, &r) in params.r_zw.iter().enumerate() {
            let g = 1.0 / (r * cz);
            a.set(0, 1 + i, g);
            diag -= g;
        }
        let g_amb = 1.0 / (params.r_za * cz);
        diag -= g_amb;
        a.set(0, 0, diag);
        d.set(0, 0, g_amb);
        b.set(0, 0, params.a_z / cz);
        d.set(0, 1, params.b_z / cz);
        d.set(0, 2, params.d_z / cz);
    }

    // hidden nodes (rows 1..=n_hidden)
    let pairs = topology.coupled_pairs();
    for i in 0..topology.n_hidden {
        let cw = params.c_w[i];
        let row = 1 + i;
        let mut diag = 0.0;
        let g_zone = 1.0 / (params.r_zw[i] * cw);
        a.set(row, 0, g_zone);
        diag -= g_zone;
        for (k, &(p, q)) in pairs.iter().enumerate() {
            let other = if p == i {
                Some(q)
            } else if q == i {
                Some(p)
            } else {
                None
            };
            if let Some(j) = other {
                let g = 1.0 / (params.r_w[k] * cw);
                a.set(row, 1 + j, g);
                diag -= g;
            }
        }
        if let Some(r_wa) = params.r_wa[i] {
            let g_amb = 1.0 / (r_wa * cw);
            diag -= g_amb;
            d.set(row, 0, g_amb);
        }
        a.set(row, row, diag);
        if topology.gains_on_walls {
            let g = params.wall_gain[i] / cw;
            d.set(row, 1, g);
            d.set(row, 2, g);
        }
    }

    let mut c = Mat::zeros(1, n);
    c.set(0, 0, 1.0);
    Ok(ContinuousStateSpace {
        a_mat: a,
        b_mat: b,
        d_mat: d,
        c_mat: c,
    })
}

/// Forward-Euler discretization: `ad = I + t_s A`, `bd = t_s B`, `dd = t_s D`.
pub fn discretize(css: &ContinuousStateSpace, t_s: f64) -> Result<DiscreteStateSpace, ThermalError> {
    if !(t_s.is_finite() && t_s > 0.0) {
        return Err(ThermalError::InvalidTimeStep(t_s));
    }
    let n = css.n_states();
    let ad = Mat::identity(n).add(&css.a_mat.scale(t_s));
    let stability_warning = (0..n).any(|i| t_s * css.a_mat.get(i, i).abs() >= 1.0);
    Ok(DiscreteStateSpace {
        ad,
        bd: css.b_mat.scale(t_s),
        dd: css.d_mat.scale(t_s),
        c: css.c_mat.clone(),
        t_s,
        stability_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::topology::RcPreset;
    use approx::assert_abs_diff_eq;

    fn r2_params() -> (RcTopology, RcParameters) {
        let topo = RcTopology::preset(RcPreset::R2);
        let params = RcParameters {
            r_za: 10.0,
            r_zw: vec![5.0],
            r_w: vec![],
            r_wa: vec![Some(8.0)],
            c_z: 1000.0,
            c_w: vec![5000.0],
            a_z: 1.0,
            b_z: 0.0,
            d_z: 0.5,
            wall_gain: vec![],
        };
        (topo, params)
    }

    #[test]
    fn single_node_matrices() {
        let topo = RcTopology::preset(RcPreset::R1);
        let p = RcParameters::single_node(10.0, 1000.0, 1.0, 0.0, 0.0);
        let ss = build_state_space(&topo, &p).unwrap();
        assert_abs_diff_eq!(ss.a_mat.get(0, 0), -1e-4, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.b_mat.get(0, 0), 1e-3, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.d_mat.get(0, 0), 1e-4, epsilon = 1e-18);
        assert_eq!(ss.d_mat.get(0, 1), 0.0);
        assert_eq!(ss.d_mat.get(0, 2), 0.0);
        assert_eq!(ss.c_mat.get(0, 0), 1.0);
    }

    #[test]
    fn two_node_matrices_match_symbolic_expansion() {
        // independent hand expansion of the two heat balances:
        //   a00 = -(1/r_za + 1/r_zw)/c_z      a01 = (1/r_zw)/c_z
        //   a10 = (1/r_zw)/c_w                a11 = -(1/r_zw + 1/r_wa)/c_w
        //   d00 = 1/(r_za c_z)                d10 = 1/(r_wa c_w)
        let (topo, p) = r2_params();
        let ss = build_state_space(&topo, &p).unwrap();
        assert_abs_diff_eq!(ss.a_mat.get(0, 0), -(0.1 + 0.2) / 1000.0, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.a_mat.get(0, 1), 0.2 / 1000.0, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.a_mat.get(1, 0), 0.2 / 5000.0, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.a_mat.get(1, 1), -(0.2 + 0.125) / 5000.0, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.d_mat.get(0, 0), 1.0 / (10.0 * 1000.0), epsilon = 1e-18);
        assert_abs_diff_eq!(ss.d_mat.get(1, 0), 1.0 / (8.0 * 5000.0), epsilon = 1e-18);
        assert_abs_diff_eq!(ss.d_mat.get(0, 2), 0.5 / 1000.0, epsilon = 1e-18);
        assert_abs_diff_eq!(ss.b_mat.get(0, 0), 1.0 / 1000.0, epsilon = 1e-18);
        assert_eq!(ss.b_mat.get(1, 0), 0.0);
    }

    #[test]
    fn zero_sum_coupling_rows() {
        let (topo, p) = r2_params();
        let ss = build_state_space(&topo, &p).unwrap();
        for i in 0..ss.n_states() {
            let row_sum: f64 = (0..ss.n_states()).map(|j| ss.a_mat.get(i, j)).sum();
            assert!(
                (row_sum + ss.d_mat.get(i, 0)).abs() <= 1e-12,
                "row {i} violates zero-sum coupling"
            );
        }
    }

    #[test]
    fn equal_temperatures_give_zero_conductive_derivative() {
        let (topo, p) = r2_params();
        let ss = build_state_space(&topo, &p).unwrap();
        // x = t_am everywhere, no heat inputs: dx/dt = A x + D [t_am,0,0] = 0
        let t = 23.7;
        let dx: Vec<f64> = (0..2)
            .map(|i| ss.a_mat.get(i, 0) * t + ss.a_mat.get(i, 1) * t + ss.d_mat.get(i, 0) * t)
            .collect();
        for v in dx {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn euler_discretization() {
        let topo = RcTopology::preset(RcPreset::R1);
        let p = RcParameters::single_node(10.0, 1000.0, 1.0, 0.0, 0.0);
        let ss = build_state_space(&topo, &p).unwrap();
        let dss = discretize(&ss, 600.0).unwrap();
        assert_abs_diff_eq!(dss.ad.get(0, 0), 0.94, epsilon = 1e-15);
        assert_abs_diff_eq!(dss.bd.get(0, 0), 0.6, epsilon = 1e-15);
        assert!(!dss.stability_warning);
    }

    #[test]
    fn zero_step_rejected() {
        let topo = RcTopology::preset(RcPreset::R1);
        let p = RcParameters::single_node(10.0, 1000.0, 1.0, 0.0, 0.0);
        let ss = build_state_space(&topo, &p).unwrap();
        assert!(matches!(
            discretize(&ss, 0.0),
            Err(ThermalError::InvalidTimeStep(_))
        ));
    }

    #[test]
    fn unstable_step_flags_warning() {
        let topo = RcTopology::preset(RcPreset::R1);
        let p = RcParameters::single_node(10.0, 1000.0, 1.0, 0.0, 0.0);
        let ss = build_state_space(&topo, &p).unwrap();
        // |a00| = 1e-4, so t_s = 10000 sits exactly on the boundary
        let dss = discretize(&ss, 10_000.0).unwrap();
        assert!(dss.stability_warning);
    }

    #[test]
    fn metzler_structure() {
        let (topo, p) = r2_params();
        let ss = build_state_space(&topo, &p).unwrap();
        for i in 0..2 {
            assert!(ss.a_mat.get(i, i) < 0.0);
            for j in 0..2 {
                if i != j {
                    assert!(ss.a_mat.get(i, j) >= 0.0);
                }
            }
        }
    }
}
