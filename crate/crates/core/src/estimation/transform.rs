//! Packing of physical parameters into the optimizer's unconstrained-ish
//! search space.
//!
//! Resistances and capacitances are optimized in log space, gain fractions
//! through a logistic transform, and initial-state temperatures linearly.
//! The optimizer therefore only ever sees a plain box, while every unpacked
//! parameter vector is valid by construction.

use super::optimizer::Bounds;
use crate::rng::SplitMix64;
use crate::thermal::{RcParameters, RcTopology, ThermalState};

/// Widest admissible logit magnitude; keeps fractions inside (1e-7, 1 - 1e-7).
const LOGIT_LIMIT: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamKind {
    /// Strictly positive, searched in natural log space.
    LogPositive,
    /// Fraction in [0, 1], searched through a logistic transform.
    UnitFraction,
    /// Plain linear variable (initial-state temperature).
    Linear,
}

#[derive(Debug, Clone)]
pub struct ParamEntry {
    pub name: String,
    pub kind: ParamKind,
    /// Box in transformed space.
    pub lower: f64,
    pub upper: f64,
    /// Multistart sampling range in transformed space.
    pub start_lo: f64,
    pub start_hi: f64,
}

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln().clamp(-LOGIT_LIMIT, LOGIT_LIMIT)
}

fn resistance_entry(name: String) -> ParamEntry {
    ParamEntry {
        name,
        kind: ParamKind::LogPositive,
        lower: (1e-5f64).ln(),
        upper: (1e3f64).ln(),
        start_lo: (1e-4f64).ln(),
        start_hi: (1e-1f64).ln(),
    }
}

fn capacitance_entry(name: String) -> ParamEntry {
    ParamEntry {
        name,
        kind: ParamKind::LogPositive,
        lower: (1e2f64).ln(),
        upper: (1e10f64).ln(),
        start_lo: (1e5f64).ln(),
        start_hi: (1e8f64).ln(),
    }
}

fn fraction_entry(name: String) -> ParamEntry {
    ParamEntry {
        name,
        kind: ParamKind::UnitFraction,
        lower: -LOGIT_LIMIT,
        upper: LOGIT_LIMIT,
        start_lo: logit(0.05),
        start_hi: logit(0.95),
    }
}

fn temperature_entry(name: String, hint: f64) -> ParamEntry {
    ParamEntry {
        name,
        kind: ParamKind::Linear,
        lower: -20.0,
        upper: 60.0,
        start_lo: hint - 1.0,
        start_hi: hint + 1.0,
    }
}

/// Ordered free-parameter list for a topology, optionally followed by the
/// initial-state block used by single-shooting fits.
#[derive(Debug, Clone)]
pub struct ParamLayout {
    topology: RcTopology,
    entries: Vec<ParamEntry>,
    n_theta: usize,
    with_x0: bool,
}

impl ParamLayout {
    pub fn for_topology(topology: &RcTopology) -> ParamLayout {
        let mut entries = Vec::new();
        entries.push(resistance_entry("r_za".into()));
        for i in 0..topology.n_hidden {
            entries.push(resistance_entry(format!("r_zw[{i}]")));
        }
        for (i, j) in topology.coupled_pairs() {
            entries.push(resistance_entry(format!("r_w[{i}][{j}]")));
        }
        for (i, &coupled) in topology.wall_ambient.iter().enumerate() {
            if coupled {
                entries.push(resistance_entry(format!("r_wa[{i}]")));
            }
        }
        entries.push(capacitance_entry("c_z".into()));
        for i in 0..topology.n_hidden {
            entries.push(capacitance_entry(format!("c_w[{i}]")));
        }
        entries.push(fraction_entry("a_z".into()));
        if topology.zone_internal_gain {
            entries.push(fraction_entry("b_z".into()));
        }
        if topology.zone_solar_gain {
            entries.push(fraction_entry("d_z".into()));
        }
        if topology.gains_on_walls {
            for i in 0..topology.n_hidden {
                entries.push(fraction_entry(format!("wall_gain[{i}]")));
            }
        }
        let n_theta = entries.len();
        debug_assert_eq!(n_theta, topology.free_parameter_count());
        ParamLayout {
            topology: topology.clone(),
            entries,
            n_theta,
            with_x0: false,
        }
    }

    /// Layout extended with initial node temperatures, seeded near the first
    /// measured output.
    pub fn with_initial_state(topology: &RcTopology, y0: f64) -> ParamLayout {
        let mut layout = ParamLayout::for_topology(topology);
        layout.entries.push(temperature_entry("x0.t_z".into(), y0));
        for i in 0..topology.n_hidden {
            layout
                .entries
                .push(temperature_entry(format!("x0.t_w[{i}]"), y0));
        }
        layout.with_x0 = true;
        layout
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn entries(&self) -> &[ParamEntry] {
        &self.entries
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::new(
            self.entries.iter().map(|e| e.lower).collect(),
            self.entries.iter().map(|e| e.upper).collect(),
        )
    }

    /// Transformed coordinates of a physical parameter set (and initial state
    /// when the layout carries one).
    pub fn pack(&self, params: &RcParameters, x0: Option<&ThermalState>) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        let topo = &self.topology;
        v.push(params.r_za.ln());
        for &r in &params.r_zw {
            v.push(r.ln());
        }
        for &r in &params.r_w {
            v.push(r.ln());
        }
        for (i, &coupled) in topo.wall_ambient.iter().enumerate() {
            if coupled {
                v.push(params.r_wa[i].expect("r_wa present").ln());
            }
        }
        v.push(params.c_z.ln());
        for &c in &params.c_w {
            v.push(c.ln());
        }
        v.push(logit(params.a_z));
        if topo.zone_internal_gain {
            v.push(logit(params.b_z));
        }
        if topo.zone_solar_gain {
            v.push(logit(params.d_z));
        }
        if topo.gains_on_walls {
            for &g in &params.wall_gain {
                v.push(logit(g));
            }
        }
        if self.with_x0 {
            let x0 = x0.expect("layout carries an initial state");
            v.push(x0.t_z);
            v.extend_from_slice(&x0.t_w);
        }
        v
    }

    /// Physical parameters from transformed coordinates.
    pub fn unpack_params(&self, v: &[f64]) -> RcParameters {
        assert_eq!(v.len(), self.dim());
        let topo = &self.topology;
        let mut it = v.iter().copied();
        let mut next = || it.next().expect("layout cursor");
        let r_za = next().exp();
        let r_zw: Vec<f64> = (0..topo.n_hidden).map(|_| next().exp()).collect();
        let r_w: Vec<f64> = (0..topo.coupled_pairs().len()).map(|_| next().exp()).collect();
        let mut r_wa = vec![None; topo.n_hidden];
        for (i, &coupled) in topo.wall_ambient.iter().enumerate() {
            if coupled {
                r_wa[i] = Some(next().exp());
            }
        }
        let c_z = next().exp();
        let c_w: Vec<f64> = (0..topo.n_hidden).map(|_| next().exp()).collect();
        let a_z = logistic(next());
        let b_z = if topo.zone_internal_gain { logistic(next()) } else { 0.0 };
        let d_z = if topo.zone_solar_gain { logistic(next()) } else { 0.0 };
        let wall_gain: Vec<f64> = if topo.gains_on_walls {
            (0..topo.n_hidden).map(|_| logistic(next())).collect()
        } else {
            vec![]
        };
        RcParameters {
            r_za,
            r_zw,
            r_w,
            r_wa,
            c_z,
            c_w,
            a_z,
            b_z,
            d_z,
            wall_gain,
        }
    }

    /// Initial state block, when present.
    pub fn unpack_x0(&self, v: &[f64]) -> Option<ThermalState> {
        if !self.with_x0 {
            return None;
        }
        let start = self.n_theta;
        Some(ThermalState::new(
            v[start],
            v[start + 1..].to_vec(),
        ))
    }

    /// Deterministic multistart point inside the per-entry start ranges.
    pub fn sample_start(&self, rng: &mut SplitMix64) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| rng.uniform(e.start_lo, e.start_hi))
            .collect()
    }
}
